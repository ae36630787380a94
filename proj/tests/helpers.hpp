#pragma once

#include "ddim/pointset.hpp"
#include "ddim/random.hpp"

#include <cmath>
#include <initializer_list>

namespace testing {

inline ddim::PointSet make_points(std::initializer_list<std::initializer_list<double>> rows) {
  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto d = static_cast<Eigen::Index>(rows.begin()->size());
  ddim::PointMatrix p(n, d);
  Eigen::Index i = 0;
  for (const auto& r : rows) {
    Eigen::Index k = 0;
    for (double v : r) p(i, k++) = v;
    ++i;
  }
  return ddim::PointSet(std::move(p));
}

inline ddim::PointSet random_points(Eigen::Index n, int d, std::uint64_t seed, double scale = 1.0) {
  ddim::Rng rng(seed);
  ddim::PointMatrix p(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (int k = 0; k < d; ++k) p(i, k) = scale * rng.uniform();
  }
  return ddim::PointSet(std::move(p));
}

// Random rotation (orthogonal factor of a Gaussian-ish matrix) and translation.
inline ddim::PointSet random_isometry(const ddim::PointSet& a, std::uint64_t seed) {
  ddim::Rng rng(seed);
  const int d = a.dim();
  Eigen::MatrixXd m(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) m(i, j) = rng.uniform(-1.0, 1.0);
  }
  const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(m).householderQ();
  Eigen::RowVectorXd t(d);
  for (int k = 0; k < d; ++k) t(k) = rng.uniform(-10.0, 10.0);
  ddim::PointMatrix p = (a.points() * q).rowwise() + t;
  return ddim::PointSet(std::move(p));
}

// Plain double loop over unordered pairs, std::pow per term.
inline double naive_pair_sum(const ddim::PointMatrix& p, double beta) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < p.rows(); ++j) s += std::pow((p.row(i) - p.row(j)).norm(), -beta);
  }
  return s;
}

}  // namespace testing
