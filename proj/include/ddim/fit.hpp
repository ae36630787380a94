#pragma once

#include <span>
#include <vector>

namespace ddim {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double stderr_slope = 0.0;
  double r2 = 1.0;
  std::size_t n = 0;
};

/// Ordinary least squares y = intercept + slope * x. Needs at least two
/// points with distinct x; the slope standard error needs three.
LineFit fit_line(std::span<const double> xs, std::span<const double> ys);

/// Least squares on (log x, log y). Requires >= 3 points, all positive, and
/// at least two distinct x values.
LineFit fit_exponent(std::span<const double> xs, std::span<const double> ys);

/// Local slopes d log y / d log x between consecutive samples.
std::vector<double> local_log_slopes(std::span<const double> xs, std::span<const double> ys);

/// Two-sided Student-t quantile with `dof` degrees of freedom at confidence
/// level `level` (e.g. 0.95).
double student_t_quantile(double level, double dof);

}  // namespace ddim
