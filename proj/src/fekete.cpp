#include "ddim/fekete.hpp"

#include "ddim/kernels.hpp"
#include "ddim/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace ddim {

Domain Domain::segment() { return Domain(DomainKind::segment); }
Domain Domain::circle() { return Domain(DomainKind::circle); }
Domain Domain::square_boundary() { return Domain(DomainKind::square_boundary); }
Domain Domain::solid_square() { return Domain(DomainKind::solid_square); }

Domain Domain::cantor_approximant(double lambda, int generation) {
  if (!(lambda > 0.0 && lambda < 0.5)) throw InvalidInput("cantor domain: lambda must lie in (0, 1/2)");
  if (generation < 0 || generation > 20) throw InvalidInput("cantor domain: generation must lie in [0, 20]");
  Domain d(DomainKind::cantor_approximant);
  d.lambda_ = lambda;
  d.generation_ = generation;
  std::vector<double> starts = {0.0};
  double len = 1.0;
  for (int g = 1; g <= generation; ++g) {
    const double child = len * lambda;
    std::vector<double> next;
    next.reserve(starts.size() * 2);
    for (double s : starts) {
      next.push_back(s);
      next.push_back(s + len - child);
    }
    starts = std::move(next);
    len = child;
  }
  d.starts_ = std::move(starts);
  d.length_ = len;
  return d;
}

Domain Domain::parse(const std::string& spec) {
  if (spec == "segment") return segment();
  if (spec == "circle") return circle();
  if (spec == "square_boundary") return square_boundary();
  if (spec == "solid_square") return solid_square();
  if (spec.rfind("cantor:", 0) == 0) {
    std::istringstream is(spec.substr(7));
    double lambda = 0.0;
    char colon = 0;
    int gen = -1;
    if (is >> lambda >> colon >> gen && colon == ':' && is.eof()) return cantor_approximant(lambda, gen);
  }
  throw InvalidInput("unknown domain '" + spec + "'");
}

std::string Domain::id() const {
  switch (kind_) {
    case DomainKind::segment: return "segment";
    case DomainKind::circle: return "circle";
    case DomainKind::square_boundary: return "square_boundary";
    case DomainKind::solid_square: return "solid_square";
    case DomainKind::cantor_approximant: {
      std::ostringstream os;
      os << "cantor:" << lambda_ << ':' << generation_;
      return os.str();
    }
  }
  return "?";
}

double Domain::diameter() const { return kind_ == DomainKind::segment || kind_ == DomainKind::circle ? 1.0 : std::sqrt(2.0); }

double Domain::project_axis(double t) const {
  auto it = std::upper_bound(starts_.begin(), starts_.end(), t);
  // candidate intervals: the one starting at or before t, and the next
  double best = std::numeric_limits<double>::infinity(), out = t;
  auto consider = [&](std::vector<double>::const_iterator s) {
    const double c = std::clamp(t, *s, *s + length_);
    if (std::abs(c - t) < best) {
      best = std::abs(c - t);
      out = c;
    }
  };
  if (it != starts_.begin()) consider(std::prev(it));
  if (it != starts_.end()) consider(it);
  return out;
}

void Domain::project(Eigen::Ref<Eigen::RowVectorXd> x) const {
  switch (kind_) {
    case DomainKind::segment:
      x(0) = std::clamp(x(0), 0.0, 1.0);
      return;
    case DomainKind::circle: {
      const double dx = x(0) - 0.5, dy = x(1) - 0.5;
      const double r = std::hypot(dx, dy);
      if (r == 0.0) {
        x(0) = 1.0;
        x(1) = 0.5;
      } else {
        x(0) = 0.5 + 0.5 * dx / r;
        x(1) = 0.5 + 0.5 * dy / r;
      }
      return;
    }
    case DomainKind::solid_square:
      x(0) = std::clamp(x(0), 0.0, 1.0);
      x(1) = std::clamp(x(1), 0.0, 1.0);
      return;
    case DomainKind::square_boundary: {
      x(0) = std::clamp(x(0), 0.0, 1.0);
      x(1) = std::clamp(x(1), 0.0, 1.0);
      const double gaps[4] = {x(0), 1.0 - x(0), x(1), 1.0 - x(1)};
      const auto k = std::min_element(gaps, gaps + 4) - gaps;
      if (gaps[k] == 0.0) return;
      if (k == 0) x(0) = 0.0;
      if (k == 1) x(0) = 1.0;
      if (k == 2) x(1) = 0.0;
      if (k == 3) x(1) = 1.0;
      return;
    }
    case DomainKind::cantor_approximant:
      x(0) = project_axis(x(0));
      x(1) = project_axis(x(1));
      return;
  }
}

bool Domain::contains(const Eigen::Ref<const Eigen::RowVectorXd>& x, double tol) const {
  Eigen::RowVectorXd y = x;
  project(y);
  return (y - x).norm() <= tol;
}

Eigen::RowVectorXd Domain::sample(Rng& rng) const {
  Eigen::RowVectorXd x(dim());
  if (kind_ == DomainKind::cantor_approximant) {
    // uniform on the product of intervals; projecting a square sample would pile points on corners
    const double count = static_cast<double>(starts_.size());
    for (int k = 0; k < 2; ++k) {
      const auto i = std::min(static_cast<std::size_t>(rng.uniform() * count), starts_.size() - 1);
      x(k) = starts_[i] + rng.uniform() * length_;
    }
    return x;
  }
  for (int k = 0; k < dim(); ++k) x(k) = rng.uniform();
  project(x);
  return x;
}

double fekete_energy(const PointMatrix& x, double alpha) {
  const Index n = x.rows();
  if (n < 2) throw InvalidInput("fekete_energy: need at least two points");
  const double b[1] = {alpha};
  PairExtrema<double> ext;
  const double s = riesz_pair_sums(x, std::span<const double>(b, 1), &ext).front();
  if (!(ext.min_sq > 0.0)) throw SingularInput("fekete_energy: coincident points");
  return s / (0.5 * static_cast<double>(n) * static_cast<double>(n - 1));
}

double fekete_energy(const PointSet& x, double alpha) { return fekete_energy(x.points(), alpha); }

namespace {

constexpr double kCollision = 1e-9;

struct Run {
  PointMatrix x;
  double f = std::numeric_limits<double>::infinity();
  int iterations = 0;
  bool converged = false;
  std::vector<double> history;
};

// F and its gradient; returns +inf when two points are closer than kCollision.
double energy_and_gradient(const PointMatrix& x, double alpha, PointMatrix* grad) {
  const Index n = x.rows();
  const double norm = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
  double f = 0.0;
  if (grad) grad->setZero(n, x.cols());
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      const Eigen::RowVectorXd diff = x.row(i) - x.row(j);
      const double r2 = diff.squaredNorm();
      if (r2 < kCollision * kCollision) return std::numeric_limits<double>::infinity();
      const double term = std::pow(r2, -0.5 * alpha);
      f += term;
      if (grad) {
        const Eigen::RowVectorXd g = (-alpha * term / r2) * diff;
        grad->row(i) += g;
        grad->row(j) -= g;
      }
    }
  }
  if (grad) *grad /= norm;
  return f / norm;
}

void project_all(const Domain& dom, PointMatrix& x) {
  for (Index i = 0; i < x.rows(); ++i) {
    Eigen::RowVectorXd row = x.row(i);
    dom.project(row);
    x.row(i) = row;
  }
}

Run descend(const Domain& dom, PointMatrix x, double alpha, int budget) {
  Run run;
  project_all(dom, x);
  PointMatrix g(x.rows(), x.cols()), g_new(x.rows(), x.cols());
  double f = energy_and_gradient(x, alpha, &g);
  if (!std::isfinite(f)) throw SingularInput("fekete_optimize: starting configuration has coincident points");
  run.history.push_back(f);
  double step = 0.01 / std::max(g.cwiseAbs().maxCoeff(), 1e-300);
  for (int it = 0; it < budget; ++it) {
    run.iterations = it + 1;
    PointMatrix trial;
    double f_trial = std::numeric_limits<double>::infinity();
    double s = step;
    bool accepted = false;
    for (int bt = 0; bt < 80; ++bt, s *= 0.5) {
      trial = x - s * g;
      project_all(dom, trial);
      f_trial = energy_and_gradient(trial, alpha, nullptr);
      if (!std::isfinite(f_trial)) continue;  // collision guard
      const double decrease = (g.array() * (x - trial).array()).sum();
      if (f_trial <= f - 1e-4 * decrease && f_trial <= f) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      run.converged = true;  // no descent direction left at rounding level
      break;
    }
    const double rel = (f - f_trial) / f;
    energy_and_gradient(trial, alpha, &g_new);
    const PointMatrix dx = trial - x;
    const PointMatrix dg = g_new - g;
    const double sy = (dx.array() * dg.array()).sum();
    step = sy > 0.0 ? dx.squaredNorm() / sy : 2.0 * s;
    x = std::move(trial);
    g = g_new;
    f = f_trial;
    run.history.push_back(f);
    if (rel < 1e-10) {
      run.converged = true;
      break;
    }
  }
  run.x = std::move(x);
  run.f = f;
  return run;
}

}  // namespace

FeketeResult fekete_optimize(const Domain& domain, Index n, double alpha, int budget, int restarts,
                             std::uint64_t seed, const std::vector<PointMatrix>& extra_starts) {
  if (n < 2) throw InvalidInput("fekete_optimize: N must be >= 2");
  if (budget <= 0) throw InvalidInput("fekete_optimize: budget must be positive");
  if (restarts <= 0) throw InvalidInput("fekete_optimize: restarts must be positive");
  if (!(alpha > 0.0)) throw InvalidInput("fekete_optimize: alpha must be positive");
  const int runs = std::max<int>(restarts, static_cast<int>(extra_starts.size()));
  std::vector<Run> results(static_cast<std::size_t>(runs));
  parallel_for(static_cast<std::size_t>(runs), [&](std::size_t r) {
    PointMatrix start;
    if (r < extra_starts.size()) {
      start = extra_starts[r];
      if (start.rows() != n || start.cols() != domain.dim()) throw InvalidInput("fekete_optimize: bad starting configuration");
    } else {
      Rng rng(derive_seed(seed, r));
      start.resize(n, domain.dim());
      for (Index i = 0; i < n; ++i) start.row(i) = domain.sample(rng);
    }
    results[r] = descend(domain, std::move(start), alpha, budget);
  });
  std::size_t best = 0;
  for (std::size_t r = 1; r < results.size(); ++r) {
    if (results[r].f < results[best].f) best = r;
  }
  const double f = fekete_energy(results[best].x, alpha);
  FeketeResult out{PointSet(results[best].x, "fekete " + domain.id() + " N=" + std::to_string(n)),
                   alpha,
                   domain.id(),
                   f,
                   1.0 / f,
                   results[best].iterations,
                   results[best].converged,
                   runs,
                   static_cast<int>(best),
                   "projected-gradient/bb+armijo",
                   results[best].history};
  return out;
}

TransfiniteCurve transfinite_diameter_curve(const Domain& domain, double alpha, Index n_max, int budget, int restarts,
                                            std::uint64_t seed) {
  if (n_max < 3) throw InvalidInput("transfinite_diameter_curve: n_max must be >= 3");
  TransfiniteCurve curve;
  std::vector<PointMatrix> warm;
  for (Index n = 2; n <= n_max; ++n) {
    FeketeResult r = fekete_optimize(domain, n, alpha, budget, restarts, derive_seed(seed, static_cast<std::uint64_t>(n)), warm);
    TransfiniteEntry e;
    e.n = n;
    e.f_alpha = r.f_alpha;
    e.d_n = r.d_n_alpha;
    e.converged = r.converged;
    if (!curve.entries.empty() && e.d_n > curve.entries.back().d_n + 1e-6) {
      e.monotonicity_violation = true;
      ++curve.violations;
    }
    curve.entries.push_back(e);

    // Warm start for N+1: the optimum plus the farthest of 512 samples.
    const PointMatrix& x = r.configuration.points();
    Rng rng(derive_seed(seed ^ 0x5eedULL, static_cast<std::uint64_t>(n)));
    Eigen::RowVectorXd far;
    double far_d = -1.0;
    for (int s = 0; s < 512; ++s) {
      const Eigen::RowVectorXd c = domain.sample(rng);
      const double d = (x.rowwise() - c).rowwise().norm().minCoeff();
      if (d > far_d) {
        far_d = d;
        far = c;
      }
    }
    PointMatrix next(n + 1, x.cols());
    next.topRows(n) = x;
    next.row(n) = far;
    warm.assign(1, std::move(next));
  }
  curve.capacity_estimate = curve.entries.back().d_n;
  const Index half = std::max<Index>(2, n_max / 2);
  curve.richardson_estimate = 2.0 * curve.entries.back().d_n - curve.entries[static_cast<std::size_t>(half - 2)].d_n;
  return curve;
}

WeightedPoints equilibrium_counting_measure(const FeketeResult& r) {
  const Index n = r.configuration.size();
  return {r.configuration, Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n))};
}

double truncated_kernel_energy(const WeightedPoints& nu, double alpha, double level) {
  if (!(level > 0.0)) throw InvalidInput("truncated_kernel_energy: level must be positive");
  const PointMatrix& x = nu.points.points();
  const Index n = x.rows();
  double off = 0.0;
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      const double r = (x.row(i) - x.row(j)).norm();
      const double k = r > 0.0 ? std::min(std::pow(r, -alpha), level) : level;
      off += nu.weights(i) * nu.weights(j) * k;
    }
  }
  return 2.0 * off + level * nu.weights.squaredNorm();
}

}  // namespace ddim
