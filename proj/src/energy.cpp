#include "ddim/energy.hpp"

#include "ddim/kernels.hpp"
#include "ddim/parallel.hpp"
#include "ddim/random.hpp"

#include <algorithm>
#include <cmath>

namespace ddim {

std::vector<EnergyReport> riesz_sums(const PointSet& a, std::span<const double> betas) {
  if (a.size() < 2) throw InvalidInput("riesz_sum: need at least two points");
  for (double b : betas) {
    if (!(b >= 0.0) || !std::isfinite(b)) throw InvalidInput("riesz_sum: beta must be finite and >= 0");
  }
  PairExtrema<double> ext;
  const std::vector<double> half = riesz_pair_sums(a.points(), betas, &ext);
  if (!(ext.min_sq > 0.0)) throw SingularInput("riesz_sum: coincident points");
  const double diam = a.diameter();
  const double n2 = static_cast<double>(a.size()) * static_cast<double>(a.size());
  std::vector<EnergyReport> out;
  out.reserve(betas.size());
  for (std::size_t b = 0; b < betas.size(); ++b) {
    EnergyReport r;
    r.beta = betas[b];
    r.n = a.size();
    r.raw_sum = 2.0 * half[b];
    r.normalized = r.raw_sum / n2;
    r.scale_invariant_ratio = std::pow(diam, betas[b]) * r.normalized;
    r.diameter = diam;
    out.push_back(r);
  }
  return out;
}

EnergyReport riesz_sum(const PointSet& a, double beta) {
  const double b[1] = {beta};
  return riesz_sums(a, std::span<const double>(b, 1)).front();
}

EmpiricalMeasure make_empirical_measure(const PointSet& a, double alpha, double delta) {
  if (!(alpha > 0.0)) throw InvalidInput("empirical measure: alpha must be positive");
  EmpiricalMeasure mu{a, a.size() >= 2 ? rescale_to_unit(a) : a, delta};
  if (delta > 0.0) return mu;
  if (a.size() == 1) {
    mu.delta = 1.0;
  } else {
    const double n = static_cast<double>(a.size());
    mu.delta = std::min(std::pow(n, -1.0 / alpha), mu.base.min_separation() / 4.0);
  }
  return mu;
}

EnergySplit energy_split(const EmpiricalMeasure& mu, double alpha) {
  const int d = mu.base.dim();
  if (!(alpha > 0.0) || !(alpha < d)) throw InvalidInput("energy_split: alpha must lie in (0, d)");
  if (!(mu.delta > 0.0)) throw InvalidInput("energy_split: delta must be positive");
  EnergySplit s;
  s.i_proxy = std::pow(mu.delta, -alpha) / static_cast<double>(mu.base.size());
  s.ii_proxy = mu.original.size() >= 2 ? riesz_sum(mu.original, alpha).scale_invariant_ratio : 0.0;
  return s;
}

MonteCarloEstimate monte_carlo_energy(const EmpiricalMeasure& mu, double alpha, std::uint64_t n_pairs,
                                      std::uint64_t seed) {
  if (n_pairs == 0) throw InvalidInput("monte_carlo_energy: need at least one sample");
  if (!(alpha > 0.0) || !(alpha < mu.base.dim())) throw InvalidInput("monte_carlo_energy: alpha must lie in (0, d)");
  constexpr std::uint64_t kBlock = 1 << 16;
  const std::uint64_t blocks = (n_pairs + kBlock - 1) / kBlock;
  const PointMatrix& p = mu.base.points();
  const auto n = static_cast<std::uint64_t>(p.rows());
  const Index d = p.cols();
  const double h = -0.5 * alpha;
  std::vector<double> sums(blocks), squares(blocks);
  parallel_for(blocks, [&](std::size_t b) {
    Rng rng(derive_seed(seed, b));
    Eigen::VectorXd u(d), v(d);
    const std::uint64_t count = std::min(kBlock, n_pairs - b * kBlock);
    double s = 0.0, s2 = 0.0;
    for (std::uint64_t k = 0; k < count; ++k) {
      const Index i = static_cast<Index>(rng.below(n));
      const Index j = static_cast<Index>(rng.below(n));
      rng.unit_ball(u);
      rng.unit_ball(v);
      double r2 = 0.0;
      for (Index c = 0; c < d; ++c) {
        const double diff = p(i, c) - p(j, c) + mu.delta * (u[c] - v[c]);
        r2 += diff * diff;
      }
      const double term = std::exp(h * std::log(r2));
      s += term;
      s2 += term * term;
    }
    sums[b] = s;
    squares[b] = s2;
  });
  const double total = static_cast<double>(n_pairs);
  MonteCarloEstimate est;
  est.samples = n_pairs;
  est.value = tree_sum(sums) / total;
  const double second = tree_sum(squares) / total;
  est.std_error = std::sqrt(std::max(0.0, second - est.value * est.value) / total);
  return est;
}

std::vector<EnergyReport> energy_curve(const SetFamily& f, std::span<const double> betas) {
  std::vector<EnergyReport> out;
  for (const auto& m : f.members) {
    auto rows = riesz_sums(m, betas);
    out.insert(out.end(), rows.begin(), rows.end());
  }
  return out;
}

}  // namespace ddim
