#include "ddim/dimension.hpp"

#include "ddim/energy.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>
#include <sstream>

namespace ddim {

FamilyProfile::FamilyProfile(SetFamily f) : family_(std::move(f)) {
  family_.validate();
  for (const auto& m : family_.members) {
    if (m.size() < 2) throw InvalidInput("FamilyProfile: every member needs at least two points");
    const double sep = m.min_separation();
    if (!(sep > 0.0)) throw SingularInput("FamilyProfile: member with coincident points");
    sizes_.push_back(static_cast<double>(m.size()));
    diam_stat_.push_back(m.diameter() / sep);
  }
}

void FamilyProfile::prefetch(std::span<const double> betas) {
  std::vector<double> missing;
  for (double b : betas) {
    if (!ratios_.count(b) && std::find(missing.begin(), missing.end(), b) == missing.end()) missing.push_back(b);
  }
  if (missing.empty()) return;
  std::vector<std::vector<double>> cols(missing.size());
  for (const auto& m : family_.members) {
    const auto reports = riesz_sums(m, missing);
    for (std::size_t k = 0; k < missing.size(); ++k) cols[k].push_back(reports[k].scale_invariant_ratio);
  }
  for (std::size_t k = 0; k < missing.size(); ++k) ratios_.emplace(missing[k], std::move(cols[k]));
}

const std::vector<double>& FamilyProfile::ratio(double beta) {
  const double b[1] = {beta};
  prefetch(b);
  return ratios_.at(beta);
}

std::vector<double> default_beta_grid(double alpha) {
  std::vector<double> out;
  if (0.125 < alpha) out.push_back(0.125);
  for (int k = 1; 0.25 * k < alpha; ++k) out.push_back(0.25 * k);
  if (out.empty()) out.push_back(alpha / 2.0);
  return out;
}

namespace {

void fill_diameter(FamilyProfile& profile, double alpha, double tol, AdaptabilityVerdict& v) {
  if (!(alpha > 0.0)) throw InvalidInput("adaptability: alpha must be positive");
  v.alpha = alpha;
  v.tol = tol;
  v.diam_fit = fit_exponent(profile.sizes(), profile.diameter_stat());
  v.diam_local_slopes = local_log_slopes(profile.sizes(), profile.diameter_stat());
  const auto& s = v.diam_local_slopes;
  bool increasing = s.size() >= 2;
  for (std::size_t i = 1; i < s.size(); ++i) increasing = increasing && s[i] > s[i - 1];
  v.diam_diverging = increasing && s.back() - s.front() > 10.0 * tol;
  v.diam_condition_ok = v.diam_fit.slope <= 1.0 / alpha + tol && !v.diam_diverging;
}

}  // namespace

AdaptabilityVerdict check_minkowski_adaptable(FamilyProfile& profile, double alpha, double tol) {
  AdaptabilityVerdict v;
  v.kind = "minkowski";
  fill_diameter(profile, alpha, tol, v);
  v.ok = v.diam_condition_ok;
  return v;
}

AdaptabilityVerdict check_minkowski_adaptable(const SetFamily& f, double alpha, double tol) {
  FamilyProfile profile(f);
  return check_minkowski_adaptable(profile, alpha, tol);
}

AdaptabilityVerdict check_hausdorff_adaptable(FamilyProfile& profile, double alpha, std::span<const double> beta_grid,
                                              double tol, double slack) {
  AdaptabilityVerdict v;
  v.kind = "hausdorff";
  v.slack = slack;
  fill_diameter(profile, alpha, tol, v);
  const std::vector<double> betas =
      beta_grid.empty() ? default_beta_grid(alpha) : std::vector<double>(beta_grid.begin(), beta_grid.end());
  for (double b : betas) {
    if (!(b > 0.0) || !(b < alpha)) throw InvalidInput("check_hausdorff_adaptable: beta grid must lie in (0, alpha)");
  }
  if (!v.diam_condition_ok) return v;

  profile.prefetch(betas);
  v.energy_checked = true;
  v.energy_condition_ok = true;
  for (double b : betas) {
    EnergyExponent e;
    e.beta = b;
    e.fit = fit_exponent(profile.sizes(), profile.ratio(b));
    e.ok = e.fit.slope <= tol + slack;
    v.energy_condition_ok = v.energy_condition_ok && e.ok;
    v.energy_fits.push_back(e);
  }
  v.ok = v.energy_condition_ok;
  return v;
}

AdaptabilityVerdict check_hausdorff_adaptable(const SetFamily& f, double alpha, std::span<const double> beta_grid,
                                              double tol, double slack) {
  FamilyProfile profile(f);
  return check_hausdorff_adaptable(profile, alpha, beta_grid, tol, slack);
}

namespace {

std::string fmt(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

SetFamily derived_family(const SetFamily& f, const std::string& strategy) {
  SetFamily out;
  out.generator_id = f.generator_id;
  out.params = f.params;
  out.params["subset_strategy"] = strategy;
  out.growth_variable = f.growth_variable;
  return out;
}

}  // namespace

SubsetStrategy identity_strategy() {
  SubsetStrategy s;
  s.name = "identity";
  s.eps = 0.0;
  s.applies = [](const SetFamily&) { return true; };
  s.apply = [](const SetFamily& f) { return f; };
  return s;
}

SubsetStrategy prune_strategy(double alpha, double sep) {
  SubsetStrategy s;
  s.name = "prune(alpha=" + (alpha > 0.0 ? fmt(alpha) : std::string("d")) + ",sep=" + fmt(sep) + ")";
  // at most half the points go, so the size exponent is unchanged
  s.eps = 0.0;
  s.applies = [](const SetFamily&) { return true; };
  s.apply = [alpha, sep, name = s.name](const SetFamily& f) {
    SetFamily out = derived_family(f, name);
    for (std::size_t i = 0; i < f.members.size(); ++i) {
      const PointSet& m = f.members[i];
      const double a = alpha > 0.0 ? alpha : static_cast<double>(m.dim());
      PruneResult r = prune_to_separation(m, a, sep);
      if (!r.achieved) throw InvalidInput(name + ": separation not reached within N/2 removals");
      out.members.push_back(std::move(r.subset));
      out.growth_values.push_back(f.growth_values[i]);
    }
    out.validate();
    return out;
  };
  return s;
}

SubsetStrategy reciprocal_tail_strategy(double eps) {
  SubsetStrategy s;
  s.name = "reciprocal_tail(eps=" + fmt(eps) + ")";
  s.eps = eps / 4.0;
  s.applies = [](const SetFamily& f) { return f.generator_id == "reciprocal_grid"; };
  s.apply = [eps, name = s.name](const SetFamily& f) {
    GeneratorSpec spec{"reciprocal_tail", f.params};
    spec.params["eps"] = eps;
    SetFamily out = generate_family(spec);
    out.generator_id = f.generator_id;
    out.params = f.params;
    out.params["subset_strategy"] = name;
    return out;
  };
  return s;
}

SubsetStrategy cantor_prune_strategy(PruneMode mode, int levels) {
  SubsetStrategy s;
  s.name = std::string("cantor_prune(") + (mode == PruneMode::p ? "P" : "P'") + ",L=" + std::to_string(levels) + ")";
  s.eps = 0.0;
  s.applies = [](const SetFamily& f) {
    return f.generator_id == "cantor_fixed" || f.generator_id == "cantor_vanishing";
  };
  s.apply = [mode, levels, name = s.name](const SetFamily& f) {
    const double lambda = f.params.at("lambda").get<double>();
    const Frame frame = parse_frame(f.params.value("frame", std::string("natural")));
    SetFamily out = derived_family(f, name);
    for (double gm : f.growth_values) {
      const int m = static_cast<int>(gm);
      if (m <= levels) throw InvalidInput(name + ": generation " + std::to_string(m) + " has too few scales");
      CantorSet c = f.generator_id == "cantor_fixed" ? gen_cantor_fixed(lambda, m, frame)
                                                     : gen_cantor_vanishing(lambda, m, frame);
      for (int k = 1; k <= levels; ++k) c = cantor_prune(c, k, mode);
      out.members.push_back(c.points);
      out.growth_values.push_back(gm);
    }
    out.validate();
    return out;
  };
  return s;
}

std::vector<SubsetStrategy> default_strategies(const SetFamily& f) {
  std::vector<SubsetStrategy> all = {identity_strategy(), prune_strategy(), reciprocal_tail_strategy(0.2),
                                     cantor_prune_strategy(PruneMode::p, 1),
                                     cantor_prune_strategy(PruneMode::p_prime, 1)};
  std::vector<SubsetStrategy> out;
  for (auto& s : all) {
    if (s.applies(f)) out.push_back(std::move(s));
  }
  return out;
}

std::vector<double> alpha_values(const AlphaGrid& g, int d) {
  const double hi = g.hi > 0.0 ? g.hi : static_cast<double>(d);
  if (!(g.lo > 0.0) || !(g.step > 0.0) || hi < g.lo) throw InvalidInput("alpha grid: need 0 < lo <= hi and step > 0");
  std::vector<double> out;
  const auto steps = static_cast<int>(std::floor((hi - g.lo) / g.step + 1e-9));
  for (int k = 0; k <= steps; ++k) out.push_back(std::round((g.lo + k * g.step) * 1e9) / 1e9);
  return out;
}

namespace {

DimensionEstimate estimate(FamilyProfile& base, const std::vector<SubsetStrategy>& strategies,
                           const EstimateOptions& opt, bool hausdorff) {
  const SetFamily& f = base.family();
  f.validate();
  DimensionEstimate est;
  est.kind = hausdorff ? "hausdorff" : "minkowski";
  est.alpha_grid = alpha_values(opt.grid, f.members.front().dim());
  const std::vector<double> sizes = [&] {
    std::vector<double> s;
    for (auto n : f.sizes()) s.push_back(static_cast<double>(n));
    return s;
  }();

  for (const auto& strategy : strategies) {
    StrategyTrace trace;
    trace.name = strategy.name;
    trace.eps = strategy.eps;
    if (!strategy.applies(f)) {
      trace.reason = "not applicable to generator " + f.generator_id;
      est.strategies.push_back(std::move(trace));
      continue;
    }
    // the identity family is the base family, whose profile the caller may already have filled
    const bool identity = strategy.name == "identity";
    std::unique_ptr<FamilyProfile> owned;
    FamilyProfile* profile = &base;
    try {
      std::optional<SetFamily> b;
      if (!identity) b = strategy.apply(f);
      std::vector<double> sub;
      for (auto n : (identity ? f : *b).sizes()) sub.push_back(static_cast<double>(n));
      trace.size_fit = fit_exponent(sizes, sub);
      if (trace.size_fit.slope < 1.0 - strategy.eps - opt.tol) {
        trace.reason = "subsets too small: size exponent " + fmt(trace.size_fit.slope);
        est.strategies.push_back(std::move(trace));
        continue;
      }
      if (!identity) {
        owned = std::make_unique<FamilyProfile>(std::move(*b));
        profile = owned.get();
      }
    } catch (const Error& e) {
      trace.reason = e.what();
      est.strategies.push_back(std::move(trace));
      continue;
    }
    trace.accepted = true;
    for (auto it = est.alpha_grid.rbegin(); it != est.alpha_grid.rend(); ++it) {
      const double alpha = *it;
      if (alpha <= est.value) break;
      AdaptabilityVerdict v = hausdorff ? check_hausdorff_adaptable(*profile, alpha, {}, opt.tol, opt.slack)
                                        : check_minkowski_adaptable(*profile, alpha, opt.tol);
      const bool ok = v.ok;
      trace.verdicts.push_back(std::move(v));
      if (ok) {
        trace.best_alpha = alpha;
        est.value = alpha;
        est.strategy_used = strategy.name;
        break;
      }
    }
    est.strategies.push_back(std::move(trace));
  }
  return est;
}

}  // namespace

DimensionEstimate estimate_minkowski_dimension(FamilyProfile& profile, const std::vector<SubsetStrategy>& strategies,
                                               const EstimateOptions& opt) {
  return estimate(profile, strategies, opt, false);
}

DimensionEstimate estimate_hausdorff_dimension(FamilyProfile& profile, const std::vector<SubsetStrategy>& strategies,
                                               const EstimateOptions& opt) {
  return estimate(profile, strategies, opt, true);
}

DimensionEstimate estimate_minkowski_dimension(const SetFamily& f, const std::vector<SubsetStrategy>& strategies,
                                               const EstimateOptions& opt) {
  FamilyProfile profile(f);
  return estimate(profile, strategies, opt, false);
}

DimensionEstimate estimate_hausdorff_dimension(const SetFamily& f, const std::vector<SubsetStrategy>& strategies,
                                               const EstimateOptions& opt) {
  FamilyProfile profile(f);
  return estimate(profile, strategies, opt, true);
}

}  // namespace ddim
