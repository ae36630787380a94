#include "ddim/fit.hpp"

#include "ddim/core.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <cmath>
#include <string>

namespace ddim {

LineFit fit_line(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw InvalidInput("fit: xs and ys differ in length");
  const std::size_t n = xs.size();
  if (n < 2) throw InvalidInput("fit: need at least 2 points");
  Eigen::MatrixXd design(n, 2);
  Eigen::VectorXd y(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(xs[i]) || !std::isfinite(ys[i])) throw InvalidInput("fit: non-finite sample");
    design(i, 0) = 1.0;
    design(i, 1) = xs[i];
    y(i) = ys[i];
  }
  const double xmin = design.col(1).minCoeff();
  const double xmax = design.col(1).maxCoeff();
  if (!(xmax > xmin)) throw InvalidInput("fit: degenerate abscissae (all x equal)");

  const Eigen::Vector2d beta = design.colPivHouseholderQr().solve(y);
  const Eigen::VectorXd resid = y - design * beta;
  const double sse = resid.squaredNorm();
  const double ybar = y.mean();
  const double sst = (y.array() - ybar).square().sum();
  const double xbar = design.col(1).mean();
  const double sxx = (design.col(1).array() - xbar).square().sum();

  LineFit fit;
  fit.n = n;
  fit.intercept = beta(0);
  fit.slope = beta(1);
  fit.r2 = sst > 0.0 ? 1.0 - sse / sst : 1.0;
  fit.stderr_slope = n > 2 ? std::sqrt(sse / static_cast<double>(n - 2) / sxx) : 0.0;
  return fit;
}

LineFit fit_exponent(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw InvalidInput("fit_exponent: xs and ys differ in length");
  if (xs.size() < 3) throw InvalidInput("fit_exponent: need at least 3 points, got " + std::to_string(xs.size()));
  std::vector<double> lx(xs.size()), ly(ys.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] > 0.0) || !(ys[i] > 0.0)) throw InvalidInput("fit_exponent: samples must be positive");
    lx[i] = std::log(xs[i]);
    ly[i] = std::log(ys[i]);
  }
  return fit_line(lx, ly);
}

std::vector<double> local_log_slopes(std::span<const double> xs, std::span<const double> ys) {
  std::vector<double> out;
  for (std::size_t i = 1; i < xs.size(); ++i) {
    out.push_back((std::log(ys[i]) - std::log(ys[i - 1])) / (std::log(xs[i]) - std::log(xs[i - 1])));
  }
  return out;
}

double student_t_quantile(double level, double dof) {
  if (!(dof > 0.0)) return std::numeric_limits<double>::infinity();
  const boost::math::students_t dist(dof);
  return boost::math::quantile(boost::math::complement(dist, (1.0 - level) / 2.0));
}

}  // namespace ddim
