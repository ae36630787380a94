#pragma once

// Distance sets exclude the zero distance: only pairs a != a' are counted.

#include "ddim/pointset.hpp"

#include <span>
#include <string>
#include <vector>

namespace ddim {

/// Largest N accepted by the binned count, which materializes all
/// N(N-1)/2 distances.
inline constexpr Index kMaxBinnedPoints = 20000;

struct DistanceSummary {
  Index n_points = 0;
  double tau = 0.0;
  Index distinct_count = 0;
  double min_distance = 0.0;
  double max_distance = 0.0;
  std::string method;  // "exact-integer" or "binned"
};

/// Exact count of distinct squared distances for integer coordinates
/// (checked within tol, then rounded). Squared distances must fit in int64.
DistanceSummary distance_count_exact(const PointSet& a, double tol = kDefaultTol);

/// Sorted pair distances clustered by single linkage: a new distance value
/// starts wherever the gap to its predecessor exceeds tau. Requires
/// tau < min_separation / 2 and N <= kMaxBinnedPoints.
DistanceSummary distance_count_binned(const PointSet& a, double tau);

/// All N(N-1)/2 pair distances, ascending.
std::vector<double> sorted_pair_distances(const PointSet& a);

/// Representatives of the distance clusters at tolerance tau (first member
/// of each cluster).
std::vector<double> distinct_distances(const PointSet& a, double tau);

/// Length of the union of [t - 2 delta, t + 2 delta] over the given distances.
double fattened_distance_length(std::span<const double> distances, double delta);
/// Same over the distinct distances of a at tolerance tau (default
/// min_separation * 1e-9).
double fattened_distance_length(const PointSet& a, double delta, double tau = 0.0);

}  // namespace ddim
