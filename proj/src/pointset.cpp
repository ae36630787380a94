#include "ddim/pointset.hpp"

#include "ddim/kernels.hpp"
#include "ddim/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace ddim {

PointSet::PointSet(PointMatrix points, std::string label)
    : label_(std::move(label)), cache_(std::make_shared<Cache>()) {
  if (points.rows() < 1) throw InvalidInput("PointSet: need at least one point");
  if (points.cols() < 1) throw InvalidInput("PointSet: dimension must be positive");
  if (!points.allFinite()) throw InvalidInput("PointSet: coordinates must be finite");
  pts_ = std::make_shared<const PointMatrix>(std::move(points));
}

void PointSet::fill_cache() const {
  std::call_once(cache_->once, [this] {
    if (size() < 2) return;
    const auto e = pair_extrema(*pts_);
    cache_->diameter = std::sqrt(e.max_sq);
    cache_->min_sep = std::sqrt(e.min_sq);
  });
}

double PointSet::diameter() const {
  fill_cache();
  return cache_->diameter;
}

double PointSet::min_separation() const {
  if (size() < 2) throw InvalidInput("min_separation: undefined for a single point");
  fill_cache();
  return cache_->min_sep;
}

PointSet PointSet::scaled(double t) const { return PointSet(*pts_ * t, label_); }

PointSet PointSet::subset(std::span<const Index> rows) const {
  PointMatrix out(static_cast<Index>(rows.size()), pts_->cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] < 0 || rows[i] >= size()) throw InvalidInput("PointSet::subset: row index out of range");
    out.row(static_cast<Index>(i)) = pts_->row(rows[i]);
  }
  return PointSet(std::move(out), label_);
}

PointSet PointSet::relabeled(std::string label) const {
  PointSet copy = *this;
  copy.label_ = std::move(label);
  return copy;
}

double diameter(const PointSet& a) { return a.diameter(); }

double min_separation(const PointSet& a) { return a.min_separation(); }

PointSet rescale_to_unit(const PointSet& a) {
  if (a.size() < 2) throw InvalidInput("rescale_to_unit: need at least two points");
  const double diam = a.diameter();
  if (!(diam > 0.0)) throw SingularInput("rescale_to_unit: zero diameter");
  return a.scaled(1.0 / diam);
}

std::vector<Index> SetFamily::sizes() const {
  std::vector<Index> out;
  out.reserve(members.size());
  for (const auto& m : members) out.push_back(m.size());
  return out;
}

void SetFamily::validate() const {
  if (members.empty()) throw InvalidInput("SetFamily: no members");
  if (growth_values.size() != members.size()) throw InvalidInput("SetFamily: growth_values misaligned with members");
  for (std::size_t i = 1; i < members.size(); ++i) {
    if (members[i].size() <= members[i - 1].size()) throw InvalidInput("SetFamily: sizes must be strictly increasing");
    if (members[i].dim() != members[0].dim()) throw InvalidInput("SetFamily: members differ in dimension");
  }
}

FattenedSet::FattenedSet(PointSet b, double d) : base(std::move(b)), delta(d) {
  if (!(delta > 0.0) || !std::isfinite(delta)) throw InvalidInput("FattenedSet: delta must be positive");
}

double neighborhood_measure(const FattenedSet& f, double resolution) {
  const double delta = f.delta;
  const double h = resolution;
  if (!(h > 0.0)) throw InvalidInput("neighborhood_measure: resolution must be positive");
  if (h > delta / 4.0 * (1.0 + 1e-12)) throw InvalidInput("neighborhood_measure: resolution must be <= delta/4");
  const PointMatrix& p = f.base.points();
  const Index n = p.rows();
  const int d = f.base.dim();

  const Eigen::RowVectorXd lo = p.colwise().minCoeff();
  const Eigen::RowVectorXd hi = p.colwise().maxCoeff();
  // Cell k on axis j has center lo_j + (k + 1/2) h; k is stored shifted by
  // `base` so keys are nonnegative.
  const double reach = delta / h + 1.0;
  std::vector<std::int64_t> base(d), radix(d);
  double key_space = 1.0;
  double cells_per_point = 1.0;
  for (int j = 0; j < d; ++j) {
    base[j] = static_cast<std::int64_t>(std::floor(-reach)) - 1;
    radix[j] = static_cast<std::int64_t>(std::ceil((hi(j) - lo(j)) / h + reach)) - base[j] + 2;
    key_space *= static_cast<double>(radix[j]);
    cells_per_point *= 2.0 * reach + 1.0;
  }
  if (key_space > 9.0e18) throw ResourceLimit("neighborhood_measure: grid too fine for this extent");
  if (cells_per_point * static_cast<double>(n) > 4.0e8) {
    throw ResourceLimit("neighborhood_measure: too many candidate cells; coarsen the resolution");
  }

  std::vector<std::uint64_t> keys;
  keys.reserve(static_cast<std::size_t>(cells_per_point * 0.6 * static_cast<double>(n)));
  const double r2max = delta * delta;
  std::vector<std::int64_t> kmin(d), kmax(d), k(d);
  for (Index i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) {
      const double u = (p(i, j) - lo(j)) / h - 0.5;
      kmin[j] = static_cast<std::int64_t>(std::ceil(u - delta / h));
      kmax[j] = static_cast<std::int64_t>(std::floor(u + delta / h));
      k[j] = kmin[j];
    }
    for (;;) {
      double r2 = 0.0;
      std::uint64_t key = 0;
      for (int j = 0; j < d; ++j) {
        const double c = lo(j) + (static_cast<double>(k[j]) + 0.5) * h - p(i, j);
        r2 += c * c;
        key = key * static_cast<std::uint64_t>(radix[j]) + static_cast<std::uint64_t>(k[j] - base[j]);
      }
      if (r2 <= r2max) keys.push_back(key);
      int j = d - 1;
      while (j >= 0 && k[j] == kmax[j]) {
        k[j] = kmin[j];
        --j;
      }
      if (j < 0) break;
      ++k[j];
    }
  }
  std::sort(keys.begin(), keys.end());
  const auto count = static_cast<double>(std::unique(keys.begin(), keys.end()) - keys.begin());
  return count * std::pow(h, d);
}

double uniform_minkowski_ratio(const FattenedSet& f, double alpha, double resolution) {
  const int d = f.base.dim();
  if (!(alpha > 0.0) || alpha > d) throw InvalidInput("uniform_minkowski_ratio: alpha must lie in (0, d]");
  const double h = resolution > 0.0 ? resolution : f.delta / 10.0;
  return neighborhood_measure(f, h) / std::pow(f.delta, d - alpha);
}

const char* to_string(Nesting n) {
  switch (n) {
    case Nesting::nested: return "nested";
    case Nesting::not_nested: return "not_nested";
    case Nesting::indeterminate: return "indeterminate";
  }
  return "?";
}

Eigen::VectorXd nearest_distances(const PointMatrix& query, const PointMatrix& ref) {
  if (query.cols() != ref.cols()) throw InvalidInput("nearest_distances: dimension mismatch");
  if (ref.rows() == 0) throw InvalidInput("nearest_distances: empty reference set");
  const Index n = query.rows();
  Eigen::VectorXd out(n);
  const std::size_t tasks = detail::task_count(n);
  parallel_for(tasks, [&](std::size_t t) {
    const Index begin = static_cast<Index>(t) * kRowsPerTask;
    const Index end = std::min(n, begin + kRowsPerTask);
    for (Index i = begin; i < end; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (Index j = 0; j < ref.rows(); ++j) {
        double r2 = 0.0;
        for (Index k = 0; k < ref.cols(); ++k) {
          const double diff = ref(j, k) - query(i, k);
          r2 += diff * diff;
        }
        best = std::min(best, r2);
      }
      out(i) = std::sqrt(best);
    }
  });
  return out;
}

Nesting nesting_check(const PointSet& outer, double outer_delta, const PointSet& inner, double inner_delta,
                      double tol) {
  if (outer.dim() != inner.dim()) throw InvalidInput("nesting_check: dimension mismatch");
  const Eigen::VectorXd dist = nearest_distances(inner.points(), outer.points());
  const double far = dist.maxCoeff();
  if (far <= outer_delta - inner_delta - tol) return Nesting::nested;
  if (far > outer_delta + tol) return Nesting::not_nested;
  return Nesting::indeterminate;
}

std::vector<Nesting> is_nested_family(const SetFamily& f, double alpha, double tol) {
  if (!(alpha > 0.0)) throw InvalidInput("is_nested_family: alpha must be positive");
  std::vector<Nesting> out;
  for (std::size_t i = 1; i < f.members.size(); ++i) {
    const PointSet& a = f.members[i - 1];
    const PointSet& b = f.members[i];
    const PointSet ua = a.size() >= 2 ? rescale_to_unit(a) : a;
    const PointSet ub = b.size() >= 2 ? rescale_to_unit(b) : b;
    const double da = std::pow(static_cast<double>(a.size()), -1.0 / alpha);
    const double db = std::pow(static_cast<double>(b.size()), -1.0 / alpha);
    out.push_back(nesting_check(ua, da, ub, db, tol));
  }
  return out;
}

}  // namespace ddim
