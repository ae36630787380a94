#pragma once

// Asymptotic conditions are tested as exponents: "X_N <~ N^c" becomes a
// least-squares slope of log X_N against log N compared with c + tol.
//
// The diameter statistic of a member is diam / min_separation, i.e. the
// diameter of its 1-separated rescaling, so families may be given in any
// frame.

#include "ddim/fit.hpp"
#include "ddim/generators.hpp"
#include "ddim/pointset.hpp"

#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace ddim {

inline constexpr double kDefaultSlopeTol = 0.05;

/// Per-family cache of the statistics the adaptability checks fit.
class FamilyProfile {
 public:
  explicit FamilyProfile(SetFamily f);

  const SetFamily& family() const { return family_; }
  /// N per member.
  const std::vector<double>& sizes() const { return sizes_; }
  /// diam / min_separation per member.
  const std::vector<double>& diameter_stat() const { return diam_stat_; }
  /// Scale-invariant Riesz ratio per member at beta, computed on first use.
  const std::vector<double>& ratio(double beta);
  /// Computes all missing betas in one pass per member.
  void prefetch(std::span<const double> betas);

 private:
  SetFamily family_;
  std::vector<double> sizes_;
  std::vector<double> diam_stat_;
  std::map<double, std::vector<double>> ratios_;
};

struct EnergyExponent {
  double beta = 0.0;
  LineFit fit;
  bool ok = false;
};

struct AdaptabilityVerdict {
  std::string kind;  // "minkowski" or "hausdorff"
  double alpha = 0.0;
  double tol = kDefaultSlopeTol;
  /// extra allowance on the energy slopes (the N^eps relaxation)
  double slack = 0.0;

  LineFit diam_fit;
  std::vector<double> diam_local_slopes;
  /// local slopes strictly increasing with total rise > 10 tol: the
  /// statistic grows faster than any power of N over the sampled range
  bool diam_diverging = false;
  bool diam_condition_ok = false;

  /// false when the energy condition was not evaluated (Minkowski checks, or
  /// Hausdorff checks whose diameter condition already failed)
  bool energy_checked = false;
  std::vector<EnergyExponent> energy_fits;
  bool energy_condition_ok = false;

  bool ok = false;
};

/// {1/8, 1/4, 1/2, 3/4, ...} intersected with (0, alpha); {alpha/2} when
/// alpha <= 1/8. Nested in alpha above 1/8, which keeps verdicts monotone
/// there; every entry above 1/8 takes the sqrt-only energy path.
std::vector<double> default_beta_grid(double alpha);

/// ok iff the fitted slope of log diam vs log N is <= 1/alpha + tol and the
/// statistic is not diverging. Needs >= 3 members.
AdaptabilityVerdict check_minkowski_adaptable(FamilyProfile& profile, double alpha, double tol = kDefaultSlopeTol);
AdaptabilityVerdict check_minkowski_adaptable(const SetFamily& f, double alpha, double tol = kDefaultSlopeTol);

/// Minkowski condition plus: for every beta in beta_grid (default
/// default_beta_grid(alpha)), the slope of log ratio_beta vs log N is
/// <= tol + slack. beta_grid must lie in (0, alpha).
AdaptabilityVerdict check_hausdorff_adaptable(FamilyProfile& profile, double alpha, std::span<const double> beta_grid = {},
                                              double tol = kDefaultSlopeTol, double slack = 0.0);
AdaptabilityVerdict check_hausdorff_adaptable(const SetFamily& f, double alpha, std::span<const double> beta_grid = {},
                                              double tol = kDefaultSlopeTol, double slack = 0.0);

struct PruneResult {
  PointSet subset;
  std::vector<Index> kept;
  Index removed = 0;
  bool achieved = false;
};

/// While some pair of surviving points is closer than
/// eps * N_current^(-1/alpha) * diam(A), removes the larger index of the
/// lexicographically first such pair. Stops when separated or after
/// floor(N/2) removals. The subset keeps A's coordinates and order.
PruneResult prune_to_separation(const PointSet& a, double alpha, double eps);

/// A rule producing subsets B_N of each member with #B_N >~ N^(1 - eps).
struct SubsetStrategy {
  std::string name;
  double eps = 0.0;
  std::function<bool(const SetFamily&)> applies;
  /// Throws InvalidInput when the strategy cannot produce a valid family.
  std::function<SetFamily(const SetFamily&)> apply;
};

SubsetStrategy identity_strategy();
/// prune_to_separation of every member at a fixed alpha (0 selects the
/// ambient dimension d) and separation factor sep.
SubsetStrategy prune_strategy(double alpha = 0.0, double sep = 0.5);
/// Replaces a reciprocal_grid family by its tails D_{M,eps}^2; size loss
/// exponent eps/4.
SubsetStrategy reciprocal_tail_strategy(double eps);
/// Applies mode at scales 1..levels to each member of a Cantor family.
SubsetStrategy cantor_prune_strategy(PruneMode mode, int levels);

/// Every registered strategy that applies to f.
std::vector<SubsetStrategy> default_strategies(const SetFamily& f);

struct AlphaGrid {
  double lo = 0.1;
  double step = 0.05;
  /// 0 selects the ambient dimension d
  double hi = 0.0;
};
std::vector<double> alpha_values(const AlphaGrid& g, int d);

struct StrategyTrace {
  std::string name;
  double eps = 0.0;
  bool accepted = false;
  std::string reason;
  LineFit size_fit;
  double best_alpha = 0.0;
  std::vector<AdaptabilityVerdict> verdicts;
};

struct DimensionEstimate {
  std::string kind;
  double value = 0.0;
  std::string strategy_used = "none";
  /// always true: only the listed strategies are searched
  bool lower_bound = true;
  std::vector<double> alpha_grid;
  std::vector<StrategyTrace> strategies;
};

struct EstimateOptions {
  AlphaGrid grid;
  double tol = kDefaultSlopeTol;
  double slack = 0.0;
};

/// Largest grid alpha for which some strategy's subset family is Minkowski
/// (resp. Hausdorff) alpha-adaptable; 0 when none is. Each strategy scans the
/// grid downward from the top and stops at its first pass, testing only
/// alphas above the best found so far.
DimensionEstimate estimate_minkowski_dimension(const SetFamily& f, const std::vector<SubsetStrategy>& strategies,
                                               const EstimateOptions& opt = {});
DimensionEstimate estimate_hausdorff_dimension(const SetFamily& f, const std::vector<SubsetStrategy>& strategies,
                                               const EstimateOptions& opt = {});

/// As above; the identity strategy reads from profile, sharing its cached energies.
DimensionEstimate estimate_minkowski_dimension(FamilyProfile& profile, const std::vector<SubsetStrategy>& strategies,
                                               const EstimateOptions& opt = {});
DimensionEstimate estimate_hausdorff_dimension(FamilyProfile& profile, const std::vector<SubsetStrategy>& strategies,
                                               const EstimateOptions& opt = {});

struct BoxCountReport {
  std::vector<double> deltas;
  std::vector<double> counts;
  LineFit fit;
  double fitted_dimension = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double level = 0.95;
};

/// Occupied cells of the axis-aligned grid of side 2 delta / sqrt(d)
/// anchored at the bounding-box minimum (each cell lies in a delta-ball).
/// The dimension is the slope of log count vs log(1/delta) with a Student-t
/// confidence interval. deltas: nonempty, positive, strictly decreasing.
BoxCountReport box_counting(const PointSet& a, std::span<const double> deltas, double level = 0.95);
/// Count for a single delta.
double box_count(const PointSet& a, double delta);

}  // namespace ddim
