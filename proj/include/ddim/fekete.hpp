#pragma once

#include "ddim/pointset.hpp"
#include "ddim/random.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ddim {

enum class DomainKind { segment, circle, square_boundary, solid_square, cantor_approximant };

/// Compact constraint set inside [0,1]^d with an exact nearest-point
/// projection:
///   segment             [0,1]; clamp
///   circle              center (1/2,1/2), radius 1/2; radial (the center
///                       maps to (1, 1/2))
///   square_boundary     boundary of [0,1]^2; clamp, then push interior
///                       points to the nearest edge
///   solid_square        [0,1]^2; clamp
///   cantor_approximant  product of the generation-k fixed-ratio Cantor
///                       intervals in [0,1]; per-axis nearest interval, which
///                       is exact for a product set
class Domain {
 public:
  static Domain segment();
  static Domain circle();
  static Domain square_boundary();
  static Domain solid_square();
  static Domain cantor_approximant(double lambda, int generation);
  /// "segment", "circle", "square_boundary", "solid_square",
  /// "cantor:<lambda>:<generation>"
  static Domain parse(const std::string& spec);

  DomainKind kind() const { return kind_; }
  int dim() const { return kind_ == DomainKind::segment ? 1 : 2; }
  std::string id() const;
  double diameter() const;

  void project(Eigen::Ref<Eigen::RowVectorXd> x) const;
  bool contains(const Eigen::Ref<const Eigen::RowVectorXd>& x, double tol = 1e-12) const;
  /// Bounding-box sample followed by projection.
  Eigen::RowVectorXd sample(Rng& rng) const;

 private:
  explicit Domain(DomainKind k) : kind_(k) {}
  double project_axis(double t) const;

  DomainKind kind_;
  double lambda_ = 0.0;
  int generation_ = 0;
  /// sorted interval left ends and common length (cantor only)
  std::vector<double> starts_;
  double length_ = 0.0;
};

/// (1 / C(N,2)) * sum_{i<j} |x_i - x_j|^(-alpha). Requires N >= 2 and distinct
/// points.
double fekete_energy(const PointMatrix& x, double alpha);
double fekete_energy(const PointSet& x, double alpha);

struct FeketeResult {
  PointSet configuration;
  double alpha = 0.0;
  std::string domain;
  double f_alpha = 0.0;
  /// 1 / f_alpha
  double d_n_alpha = 0.0;
  int iterations = 0;
  bool converged = false;
  int restarts = 0;
  int best_restart = 0;
  std::string optimizer;
  /// F after each accepted step of the winning run, starting value first
  std::vector<double> f_history;
};

/// Best of `restarts` runs of projected gradient descent (Barzilai-Borwein
/// trial step, Armijo backtracking, step halving on near-collisions below
/// 1e-9). A run stops when the relative decrease of F falls below 1e-10 or
/// after `budget` iterations. Run r starts from extra_starts[r] when given,
/// otherwise from random domain samples seeded by (seed, r). Ties in F go to
/// the lower run index. The result is a local minimizer only.
FeketeResult fekete_optimize(const Domain& domain, Index n, double alpha, int budget, int restarts,
                             std::uint64_t seed, const std::vector<PointMatrix>& extra_starts = {});

struct TransfiniteEntry {
  Index n = 0;
  double f_alpha = 0.0;
  double d_n = 0.0;
  bool converged = false;
  /// D_N > D_{N-1} + 1e-6: the optimizer missed a minimizer at N or N-1
  bool monotonicity_violation = false;
};

struct TransfiniteCurve {
  std::vector<TransfiniteEntry> entries;
  /// last D_N
  double capacity_estimate = 0.0;
  /// 2 D_N - D_{N/2}, the limit under a 1/N correction
  double richardson_estimate = 0.0;
  std::size_t violations = 0;
};

/// D_N for N = 2..n_max. Each N also starts once from the N-1 optimum plus
/// the domain sample farthest from it.
TransfiniteCurve transfinite_diameter_curve(const Domain& domain, double alpha, Index n_max, int budget,
                                            int restarts = 8, std::uint64_t seed = 1);

struct WeightedPoints {
  PointSet points;
  Eigen::VectorXd weights;
};

/// Uniform weights 1/N on the configuration.
WeightedPoints equilibrium_counting_measure(const FeketeResult& r);

/// sum_{i,j} w_i w_j min(|x_i - x_j|^(-alpha), level), diagonal included
/// (each diagonal term equals level).
double truncated_kernel_energy(const WeightedPoints& nu, double alpha, double level);

}  // namespace ddim
