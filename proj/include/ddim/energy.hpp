#pragma once

// Riesz sums use the ordered-pair convention: raw_sum counts every unordered
// pair twice, raw_sum = 2 * sum_{i<j} |a_i - a_j|^(-beta).
//
// Reproducibility: sums are bit-identical for any thread count (fixed row
// blocking, see kernels.hpp) and agree with a naive double loop to 1e-12
// relative.

#include "ddim/pointset.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace ddim {

struct EnergyReport {
  double beta = 0.0;
  Index n = 0;
  double raw_sum = 0.0;
  /// raw_sum / N^2
  double normalized = 0.0;
  /// diam^beta * normalized; invariant under scaling of the set
  double scale_invariant_ratio = 0.0;
  double diameter = 0.0;
};

/// Requires N >= 2, beta >= 0. Coincident points raise SingularInput.
EnergyReport riesz_sum(const PointSet& a, double beta);
/// All exponents in one pass over the pairs.
std::vector<EnergyReport> riesz_sums(const PointSet& a, std::span<const double> betas);

/// Normalized sum of uniform probability measures on delta-balls centered at
/// the points of the unit-diameter copy of a set.
struct EmpiricalMeasure {
  PointSet original;
  /// unit-diameter copy (equal to original when N = 1)
  PointSet base;
  double delta = 0.0;
};

/// delta <= 0 selects the default min(N^(-1/alpha), min_sep(base)/4); for a
/// single point the default is 1.
EmpiricalMeasure make_empirical_measure(const PointSet& a, double alpha, double delta = 0.0);

struct EnergySplit {
  /// diagonal part: N^-1 delta^-alpha
  double i_proxy = 0.0;
  /// off-diagonal part: scale-invariant ratio of the Riesz sum at beta = alpha
  double ii_proxy = 0.0;
};

/// Requires 0 < alpha < d.
EnergySplit energy_split(const EmpiricalMeasure& mu, double alpha);

/// Monte Carlo estimate of the double integral of |x-y|^-alpha against
/// mu x mu, with independent x and y. Samples are drawn in fixed blocks, each
/// from its own derived stream, so the estimate depends only on
/// (mu, alpha, n_pairs, seed).
struct MonteCarloEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::uint64_t samples = 0;
};
MonteCarloEstimate monte_carlo_energy(const EmpiricalMeasure& mu, double alpha, std::uint64_t n_pairs,
                                      std::uint64_t seed);

/// Riesz reports for every member and exponent, member-major.
std::vector<EnergyReport> energy_curve(const SetFamily& f, std::span<const double> betas);

}  // namespace ddim
