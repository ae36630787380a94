#include "ddim/distances.hpp"

#include "ddim/kernels.hpp"
#include "ddim/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

namespace ddim {

DistanceSummary distance_count_exact(const PointSet& a, double tol) {
  const PointMatrix& p = a.points();
  const Index n = p.rows();
  if (n < 2) throw InvalidInput("distance_count_exact: need at least two points");
  if (n > kMaxBinnedPoints) throw ResourceLimit("distance_count_exact: N exceeds 20000");
  Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> q(n, p.cols());
  for (Index i = 0; i < n; ++i) {
    for (Index k = 0; k < p.cols(); ++k) {
      const double r = std::round(p(i, k));
      if (std::abs(p(i, k) - r) > tol) throw InvalidInput("distance_count_exact: coordinates must be integral");
      if (std::abs(r) > 1.0e9) throw InvalidInput("distance_count_exact: coordinates exceed +-1e9");
      q(i, k) = static_cast<std::int64_t>(r);
    }
  }
  std::vector<std::int64_t> sq;
  sq.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      std::int64_t s = 0;
      for (Index k = 0; k < q.cols(); ++k) {
        const std::int64_t diff = q(i, k) - q(j, k);
        s += diff * diff;
      }
      sq.push_back(s);
    }
  }
  std::sort(sq.begin(), sq.end());
  if (sq.front() == 0) throw SingularInput("distance_count_exact: coincident points");
  DistanceSummary s;
  s.n_points = n;
  s.method = "exact-integer";
  s.distinct_count = static_cast<Index>(std::unique(sq.begin(), sq.end()) - sq.begin());
  s.min_distance = std::sqrt(static_cast<double>(sq.front()));
  s.max_distance = std::sqrt(static_cast<double>(sq[static_cast<std::size_t>(s.distinct_count - 1)]));
  return s;
}

std::vector<double> sorted_pair_distances(const PointSet& a) {
  const PointMatrix& p = a.points();
  const Index n = p.rows();
  if (n > kMaxBinnedPoints) throw ResourceLimit("pair distances: N exceeds 20000");
  std::vector<double> out(static_cast<std::size_t>(n * (n - 1) / 2));
  // Row i's block starts at i*n - i*(i+1)/2, so tasks write disjoint ranges.
  const std::size_t tasks = detail::task_count(n);
  parallel_for(tasks, [&](std::size_t t) {
    const Index begin = static_cast<Index>(t) * kRowsPerTask;
    const Index end = std::min(n, begin + kRowsPerTask);
    for (Index i = begin; i < end; ++i) {
      double* row = out.data() + (i * n - i * (i + 1) / 2);
      detail::row_squared_distances(p, i, row);
      for (Index j = 0; j < n - i - 1; ++j) row[j] = std::sqrt(row[j]);
    }
  });
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

void check_tau(const PointSet& a, double tau) {
  if (a.size() < 2) throw InvalidInput("distance_count_binned: need at least two points");
  if (!(tau > 0.0)) throw InvalidInput("distance_count_binned: tau must be positive");
  const double sep = a.min_separation();
  if (!(sep > 0.0)) throw SingularInput("distance_count_binned: coincident points");
  if (!(tau < sep / 2.0)) throw InvalidInput("distance_count_binned: tau must be below min_separation/2");
}

}  // namespace

std::vector<double> distinct_distances(const PointSet& a, double tau) {
  check_tau(a, tau);
  const std::vector<double> all = sorted_pair_distances(a);
  std::vector<double> reps;
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (i == 0 || all[i] - all[i - 1] > tau) reps.push_back(all[i]);
  }
  return reps;
}

DistanceSummary distance_count_binned(const PointSet& a, double tau) {
  check_tau(a, tau);
  if (a.size() > kMaxBinnedPoints) throw ResourceLimit("distance_count_binned: N exceeds 20000");
  const std::vector<double> all = sorted_pair_distances(a);
  DistanceSummary s;
  s.n_points = a.size();
  s.tau = tau;
  s.method = "binned";
  s.min_distance = all.front();
  s.max_distance = all.back();
  Index count = 0;
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (i == 0 || all[i] - all[i - 1] > tau) ++count;
  }
  s.distinct_count = count;
  return s;
}

double fattened_distance_length(std::span<const double> distances, double delta) {
  if (!(delta > 0.0)) throw InvalidInput("fattened_distance_length: delta must be positive");
  std::vector<double> t(distances.begin(), distances.end());
  std::sort(t.begin(), t.end());
  double total = 0.0;
  double lo = 0.0, hi = -std::numeric_limits<double>::infinity();
  for (double x : t) {
    const double a = x - 2.0 * delta, b = x + 2.0 * delta;
    if (a > hi) {
      if (hi > lo) total += hi - lo;
      lo = a;
      hi = b;
    } else {
      hi = std::max(hi, b);
    }
  }
  if (hi > lo) total += hi - lo;
  return total;
}

double fattened_distance_length(const PointSet& a, double delta, double tau) {
  const double t = tau > 0.0 ? tau : a.min_separation() * 1e-9;
  return fattened_distance_length(distinct_distances(a, t), delta);
}

}  // namespace ddim
