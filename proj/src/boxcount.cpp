#include "ddim/dimension.hpp"

#include <algorithm>
#include <cmath>

namespace ddim {

double box_count(const PointSet& a, double delta) {
  if (!(delta > 0.0) || !std::isfinite(delta)) throw InvalidInput("box_count: delta must be positive");
  const PointMatrix& p = a.points();
  const Index d = p.cols();
  const double side = 2.0 * delta / std::sqrt(static_cast<double>(d));
  const Eigen::RowVectorXd lo = p.colwise().minCoeff();
  const Eigen::RowVectorXd hi = p.colwise().maxCoeff();
  std::vector<std::uint64_t> radix(static_cast<std::size_t>(d));
  double space = 1.0;
  for (Index k = 0; k < d; ++k) {
    radix[static_cast<std::size_t>(k)] = static_cast<std::uint64_t>(std::floor((hi(k) - lo(k)) / side)) + 1;
    space *= static_cast<double>(radix[static_cast<std::size_t>(k)]);
  }
  if (space > 1.8e19) throw ResourceLimit("box_count: delta below the finest resolvable scale for this extent");
  std::vector<std::uint64_t> keys(static_cast<std::size_t>(p.rows()));
  for (Index i = 0; i < p.rows(); ++i) {
    std::uint64_t key = 0;
    for (Index k = 0; k < d; ++k) {
      const auto r = radix[static_cast<std::size_t>(k)];
      const auto c = std::min<std::uint64_t>(static_cast<std::uint64_t>(std::floor((p(i, k) - lo(k)) / side)), r - 1);
      key = key * r + c;
    }
    keys[static_cast<std::size_t>(i)] = key;
  }
  std::sort(keys.begin(), keys.end());
  return static_cast<double>(std::unique(keys.begin(), keys.end()) - keys.begin());
}

BoxCountReport box_counting(const PointSet& a, std::span<const double> deltas, double level) {
  if (deltas.empty()) throw InvalidInput("box_counting: empty delta list");
  if (deltas.size() < 2) throw InvalidInput("box_counting: a slope needs at least two deltas");
  for (std::size_t i = 1; i < deltas.size(); ++i) {
    if (!(deltas[i] < deltas[i - 1])) throw InvalidInput("box_counting: deltas must be strictly decreasing");
  }
  BoxCountReport r;
  r.level = level;
  std::vector<double> inv;
  for (double delta : deltas) {
    r.deltas.push_back(delta);
    r.counts.push_back(box_count(a, delta));
    inv.push_back(1.0 / delta);
  }
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < inv.size(); ++i) {
    lx.push_back(std::log(inv[i]));
    ly.push_back(std::log(r.counts[i]));
  }
  r.fit = fit_line(lx, ly);
  r.fitted_dimension = r.fit.slope;
  const double half = r.fit.n > 2 ? student_t_quantile(level, static_cast<double>(r.fit.n - 2)) * r.fit.stderr_slope
                                  : std::numeric_limits<double>::infinity();
  r.ci_low = r.fitted_dimension - half;
  r.ci_high = r.fitted_dimension + half;
  return r;
}

}  // namespace ddim
