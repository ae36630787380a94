#include "ddim/generators.hpp"

#include "ddim/random.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

namespace ddim {

Frame parse_frame(const std::string& s) {
  if (s == "natural") return Frame::natural;
  if (s == "separated") return Frame::separated;
  throw InvalidInput("unknown frame '" + s + "' (expected natural or separated)");
}

const char* to_string(Frame f) { return f == Frame::natural ? "natural" : "separated"; }

PointSet gen_lattice(int d, int q) {
  if (d < 1) throw InvalidInput("gen_lattice: d must be >= 1");
  if (q < 1) throw InvalidInput("gen_lattice: q must be >= 1");
  const double count = std::pow(q + 1.0, d);
  if (count > 5.0e7) throw ResourceLimit("gen_lattice: (q+1)^d exceeds 5e7 points");
  const auto n = static_cast<Index>(count);
  PointMatrix p(n, d);
  std::vector<int> k(d, 0);
  for (Index i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) p(i, j) = k[j];
    for (int j = d - 1; j >= 0; --j) {
      if (++k[j] <= q) break;
      k[j] = 0;
    }
  }
  return PointSet(std::move(p), "lattice d=" + std::to_string(d) + " q=" + std::to_string(q));
}

PointSet gen_delone(int d, int q, double jitter, std::uint64_t seed, Frame frame) {
  if (d < 1) throw InvalidInput("gen_delone: d must be >= 1");
  if (q < 1) throw InvalidInput("gen_delone: q must be >= 1");
  if (!(jitter >= 0.0 && jitter <= 0.4)) throw InvalidInput("gen_delone: jitter must lie in [0, 0.4]");
  const double count = std::pow(static_cast<double>(q), d);
  if (count > 5.0e7) throw ResourceLimit("gen_delone: q^d exceeds 5e7 points");
  const auto n = static_cast<Index>(count);
  const double scale = frame == Frame::separated ? 1.0 / (1.0 - 2.0 * jitter) : 1.0;
  Rng rng(derive_seed(seed, static_cast<std::uint64_t>(q)));
  PointMatrix p(n, d);
  Eigen::VectorXd u(d);
  std::vector<int> cell(d, 0);
  for (Index i = 0; i < n; ++i) {
    rng.unit_ball(u);
    for (int j = 0; j < d; ++j) p(i, j) = scale * (cell[j] + 0.5 + jitter * u[j]);
    for (int j = d - 1; j >= 0; --j) {
      if (++cell[j] < q) break;
      cell[j] = 0;
    }
  }
  return PointSet(std::move(p), "delone d=" + std::to_string(d) + " q=" + std::to_string(q));
}

namespace {

PointSet product_of_reciprocals(int first, int last, double scale, std::string label) {
  const Index k = last - first + 1;
  PointMatrix p(k * k, 2);
  Index r = 0;
  for (int i = first; i <= last; ++i) {
    for (int j = first; j <= last; ++j) {
      p(r, 0) = scale / i;
      p(r, 1) = scale / j;
      ++r;
    }
  }
  return PointSet(std::move(p), std::move(label));
}

}  // namespace

PointSet gen_reciprocal_grid(int m, Frame frame) {
  if (m < 2) throw InvalidInput("gen_reciprocal_grid: M must be >= 2");
  if (static_cast<double>(m) * m > 5.0e7) throw ResourceLimit("gen_reciprocal_grid: M^2 exceeds 5e7 points");
  const double scale = frame == Frame::separated ? static_cast<double>(m) * m : 1.0;
  return product_of_reciprocals(1, m, scale, "reciprocal_grid M=" + std::to_string(m));
}

TailShape reciprocal_tail_shape(int m, double eps) {
  if (m < 3) throw InvalidInput("reciprocal_tail: M must be >= 3");
  if (!(eps > 0.0 && eps < 4.0)) throw InvalidInput("reciprocal_tail: eps must lie in (0, 4)");
  TailShape s;
  s.m = m;
  const double width = std::pow(static_cast<double>(m), 1.0 - eps / 4.0);
  s.k = static_cast<int>(std::floor(width + 1e-9));
  if (s.k < 2 || s.k > m) throw InvalidInput("reciprocal_tail: M^(1-eps/4) must lie in [2, M]");
  s.first = m - s.k + 1;
  s.large_m = m - width > m / 2.0;
  return s;
}

PointSet gen_reciprocal_tail(int m, double eps, Frame frame) {
  const TailShape s = reciprocal_tail_shape(m, eps);
  if (static_cast<double>(s.k) * s.k > 5.0e7) throw ResourceLimit("gen_reciprocal_tail: K^2 exceeds 5e7 points");
  const double scale = frame == Frame::separated ? static_cast<double>(m) * m : 1.0;
  return product_of_reciprocals(s.first, m, scale, "reciprocal_tail M=" + std::to_string(m));
}

PointSet gen_reciprocal_sequence(double a, int m, Frame frame) {
  if (!(a > 0.0)) throw InvalidInput("gen_reciprocal_sequence: a must be positive");
  if (m < 2) throw InvalidInput("gen_reciprocal_sequence: M must be >= 2");
  if (m > 50000000) throw ResourceLimit("gen_reciprocal_sequence: M exceeds 5e7");
  const double gap = std::pow(m - 1.0, -1.0 / a) - std::pow(static_cast<double>(m), -1.0 / a);
  if (!(gap > 0.0)) throw InvalidInput("gen_reciprocal_sequence: consecutive terms not resolvable in double precision");
  const double scale = frame == Frame::separated ? 1.0 / gap : 1.0;
  PointMatrix p(m, 1);
  for (int n = 1; n <= m; ++n) p(n - 1, 0) = scale * std::pow(static_cast<double>(n), -1.0 / a);
  return PointSet(std::move(p), "reciprocal_sequence M=" + std::to_string(m));
}

namespace {

CantorSet build_cantor(CantorKind kind, double lambda, int m, Frame frame, std::vector<double> sides) {
  // Nearest centers across the gap opened at generation k are
  // sides[k-1] - 2 sides[k] + sides[M] apart.
  double sep = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= m; ++k) sep = std::min(sep, sides[k - 1] - 2.0 * sides[k] + sides[m]);
  const double extent = std::sqrt(2.0) * (1.0 - sides[m]);
  if (!(sep > 0.0) || extent / sep > kMaxCantorAspect) {
    throw InvalidInput("cantor: generation " + std::to_string(m) +
                       " is not resolvable in double precision (diameter/separation > 4.5e11)");
  }
  const double scale = frame == Frame::separated ? 1.0 / sep : 1.0;
  const Index n = Index(1) << (2 * m);
  PointMatrix p(n, 2);
  std::vector<std::uint64_t> paths(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    const auto path = static_cast<std::uint64_t>(i);
    double x = 0.5 * sides[m], y = 0.5 * sides[m];
    for (int g = 1; g <= m; ++g) {
      const unsigned quad = (path >> (2 * (g - 1))) & 3u;
      const double offset = sides[g - 1] - sides[g];
      if (quad & 1u) x += offset;
      if (quad & 2u) y += offset;
    }
    p(i, 0) = scale * x;
    p(i, 1) = scale * y;
    paths[static_cast<std::size_t>(i)] = path;
  }
  const char* name = kind == CantorKind::fixed ? "cantor_fixed" : "cantor_vanishing";
  CantorSet c{PointSet(std::move(p), std::string(name) + " M=" + std::to_string(m)),
              kind,
              lambda,
              m,
              std::move(paths),
              std::move(sides),
              sep,
              frame};
  return c;
}

}  // namespace

CantorSet gen_cantor_fixed(double lambda, int m, Frame frame) {
  if (!(lambda > 0.0 && lambda < 0.5)) throw InvalidInput("gen_cantor_fixed: lambda must lie in (0, 1/2)");
  if (m < 1 || m > 12) throw InvalidInput("gen_cantor_fixed: M must lie in [1, 12]");
  std::vector<double> sides(m + 1, 1.0);
  for (int k = 1; k <= m; ++k) sides[k] = sides[k - 1] * lambda;
  return build_cantor(CantorKind::fixed, lambda, m, frame, std::move(sides));
}

CantorSet gen_cantor_vanishing(double lambda, int m, Frame frame) {
  if (!(lambda > 0.0 && lambda < 0.25)) throw InvalidInput("gen_cantor_vanishing: lambda must lie in (0, 1/4)");
  if (m < 1 || m > 12) throw InvalidInput("gen_cantor_vanishing: M must lie in [1, 12]");
  std::vector<double> sides(m + 1, 1.0);
  for (int k = 1; k <= m; ++k) sides[k] = sides[k - 1] * lambda / std::ldexp(1.0, k - 1);
  return build_cantor(CantorKind::vanishing, lambda, m, frame, std::move(sides));
}

CantorSet cantor_prune(const CantorSet& a, int k, PruneMode mode, int preferred) {
  const int m = a.generations;
  if (k < 1 || k > m) throw InvalidInput("cantor_prune: scale k must lie in [1, M]");
  if (preferred < 0 || preferred > 3) throw InvalidInput("cantor_prune: survivor quadrant must lie in [0, 3]");
  const int g = mode == PruneMode::p ? k : m - k + 1;
  const std::uint64_t prefix_mask = (std::uint64_t(1) << (2 * (g - 1))) - 1;
  const int shift = 2 * (g - 1);

  // Surviving quadrant per generation-(g-1) square.
  std::map<std::uint64_t, unsigned> present;
  for (std::uint64_t path : a.paths) present[path & prefix_mask] |= 1u << ((path >> shift) & 3u);
  std::vector<Index> keep;
  for (std::size_t i = 0; i < a.paths.size(); ++i) {
    const std::uint64_t path = a.paths[i];
    const unsigned mask = present[path & prefix_mask];
    unsigned survivor = static_cast<unsigned>(preferred);
    if (!(mask & (1u << survivor))) {
      survivor = 0;
      while (!(mask & (1u << survivor))) ++survivor;
    }
    if (((path >> shift) & 3u) == survivor) keep.push_back(static_cast<Index>(i));
  }
  CantorSet out = a;
  out.points = a.points.subset(keep);
  out.paths.clear();
  for (Index i : keep) out.paths.push_back(a.paths[static_cast<std::size_t>(i)]);
  return out;
}

namespace {

template <typename T>
T param_or(const nlohmann::json& p, const char* key, T fallback) {
  return p.contains(key) ? p.at(key).get<T>() : fallback;
}

template <typename T>
T param_req(const nlohmann::json& p, const char* key, const std::string& id) {
  if (!p.contains(key)) throw InvalidInput(id + ": missing parameter '" + key + "'");
  try {
    return p.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw InvalidInput(id + ": parameter '" + key + "' has the wrong type");
  }
}

}  // namespace

std::vector<std::string> generator_ids() {
  return {"lattice",         "delone",       "reciprocal_grid", "reciprocal_tail", "reciprocal_sequence",
          "cantor_fixed",    "cantor_vanishing"};
}

SetFamily generate_family(const GeneratorSpec& spec) {
  const std::string& id = spec.id;
  nlohmann::json p = spec.params.is_null() ? nlohmann::json::object() : spec.params;
  if (!p.is_object()) throw InvalidInput(id + ": params must be an object");
  SetFamily f;
  f.generator_id = id;

  auto push = [&f](PointSet s, double growth) {
    f.members.push_back(std::move(s));
    f.growth_values.push_back(growth);
  };

  if (id == "lattice" || id == "delone") {
    const int d = param_req<int>(p, "d", id);
    const auto qs = param_req<std::vector<int>>(p, "q", id);
    f.growth_variable = "N";
    if (id == "lattice") {
      for (int q : qs) {
        PointSet s = gen_lattice(d, q);
        const double n = static_cast<double>(s.size());
        push(std::move(s), n);
      }
    } else {
      const double jitter = param_or<double>(p, "jitter", 0.3);
      const auto seed = param_or<std::uint64_t>(p, "seed", 1);
      const Frame frame = parse_frame(param_or<std::string>(p, "frame", "separated"));
      p["jitter"] = jitter;
      p["seed"] = seed;
      p["frame"] = to_string(frame);
      for (int q : qs) {
        PointSet s = gen_delone(d, q, jitter, seed, frame);
        const double n = static_cast<double>(s.size());
        push(std::move(s), n);
      }
    }
  } else if (id == "reciprocal_grid" || id == "reciprocal_tail" || id == "reciprocal_sequence" ||
             id == "cantor_fixed" || id == "cantor_vanishing") {
    const auto ms = param_req<std::vector<int>>(p, "M", id);
    const Frame frame = parse_frame(param_or<std::string>(p, "frame", "natural"));
    p["frame"] = to_string(frame);
    f.growth_variable = "M";
    for (int m : ms) {
      if (id == "reciprocal_grid") {
        push(gen_reciprocal_grid(m, frame), m);
      } else if (id == "reciprocal_tail") {
        push(gen_reciprocal_tail(m, param_req<double>(p, "eps", id), frame), m);
      } else if (id == "reciprocal_sequence") {
        push(gen_reciprocal_sequence(param_req<double>(p, "a", id), m, frame), m);
      } else if (id == "cantor_fixed") {
        push(gen_cantor_fixed(param_req<double>(p, "lambda", id), m, frame).points, m);
      } else {
        push(gen_cantor_vanishing(param_req<double>(p, "lambda", id), m, frame).points, m);
      }
    }
  } else {
    throw InvalidInput("unknown generator '" + id + "'");
  }
  f.params = p;
  f.validate();
  return f;
}

}  // namespace ddim
