#include "ddim/experiment.hpp"

#include "ddim/generators.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

namespace ddim {

namespace {

const std::vector<std::string> kOps = {"generate", "energy_curve", "energy_flatness", "fit", "adapt",
                                       "dimension", "boxcount",    "distances",      "fekete"};

[[noreturn]] void bad(const std::string& what) { throw InvalidInput("config: " + what); }

std::string rounded(double x, int digits = 4) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

}  // namespace

ExperimentConfig parse_experiment_config(const json& j) {
  if (!j.is_object()) bad("top level must be an object");
  ExperimentConfig c;
  c.raw = j;
  if (!j.contains("experiment_id") || !j["experiment_id"].is_string()) bad("experiment_id (string) is required");
  c.experiment_id = j["experiment_id"].get<std::string>();
  if (j.contains("seed")) {
    if (!j["seed"].is_number_integer() || j["seed"].get<std::int64_t>() < 0) bad("seed must be a nonnegative integer");
    c.seed = j["seed"].get<std::uint64_t>();
  }
  c.output_dir = j.value("output_dir", "out/" + c.experiment_id);
  if (j.contains("tol")) {
    if (!j["tol"].is_number() || !(j["tol"].get<double>() > 0.0)) bad("tol must be a positive number");
    c.tol = j["tol"].get<double>();
  }
  c.families = j.value("families", json::object());
  if (!c.families.is_object()) bad("families must be an object");
  for (auto& [name, fam] : c.families.items()) {
    if (!fam.is_object() || !fam.contains("generator") || !fam["generator"].is_string()) {
      bad("family '" + name + "' needs a generator id");
    }
    const auto ids = generator_ids();
    if (std::find(ids.begin(), ids.end(), fam["generator"].get<std::string>()) == ids.end()) {
      bad("family '" + name + "': unknown generator '" + fam["generator"].get<std::string>() + "'");
    }
    if (!fam.contains("params")) fam["params"] = json::object();
    if (!fam["params"].is_object()) bad("family '" + name + "': params must be an object");
    if (fam["generator"] == "delone" && !fam["params"].contains("seed")) fam["params"]["seed"] = c.seed;
  }
  c.pipeline = j.value("pipeline", json::array());
  if (!c.pipeline.is_array()) bad("pipeline must be an array");
  for (std::size_t i = 0; i < c.pipeline.size(); ++i) {
    const json& step = c.pipeline[i];
    if (!step.is_object() || !step.contains("op") || !step["op"].is_string()) bad("step " + std::to_string(i) + " needs an op");
    const std::string op = step["op"].get<std::string>();
    if (std::find(kOps.begin(), kOps.end(), op) == kOps.end()) bad("step " + std::to_string(i) + ": unknown op '" + op + "'");
    if (op != "fekete") {
      if (!step.contains("family") || !step["family"].is_string()) bad("step " + std::to_string(i) + " needs a family");
      if (!c.families.contains(step["family"].get<std::string>())) {
        bad("step " + std::to_string(i) + ": undefined family '" + step["family"].get<std::string>() + "'");
      }
    }
  }
  c.raw["seed"] = c.seed;
  c.raw["output_dir"] = c.output_dir.string();
  c.raw["tol"] = c.tol;
  c.raw["families"] = c.families;
  c.raw["pipeline"] = c.pipeline;
  return c;
}

ExperimentConfig load_experiment_config(const fs::path& file) {
  json j;
  try {
    j = json::parse(read_file(file));
  } catch (const json::exception& e) {
    throw InvalidInput(file.string() + ": " + e.what());
  }
  return parse_experiment_config(j);
}

namespace {

struct Context {
  const ExperimentConfig& config;
  std::map<std::string, SetFamily> families;
  std::string summary;
};

std::vector<double> sizes_of(const SetFamily& f) {
  std::vector<double> s;
  for (auto n : f.sizes()) s.push_back(static_cast<double>(n));
  return s;
}

const SetFamily& need_family(Context& ctx, const json& step) {
  const std::string name = step["family"].get<std::string>();
  auto it = ctx.families.find(name);
  if (it != ctx.families.end()) return it->second;
  const json& spec = ctx.config.families[name];
  SetFamily f = generate_family({spec["generator"].get<std::string>(), spec["params"]});
  return ctx.families.emplace(name, std::move(f)).first->second;
}

std::string stem(const StepStatus& st, const json& step) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%02zu_", st.index);
  std::string s = buf + st.op;
  if (step.contains("family")) s += "_" + step["family"].get<std::string>();
  return s;
}

void emit(Context& ctx, StepStatus& st, const std::string& name, const std::string& content) {
  write_file(ctx.config.output_dir / name, content);
  st.outputs.push_back(name);
}

std::vector<double> betas_of(const json& step) {
  if (!step.contains("betas")) bad("step needs betas");
  return step["betas"].get<std::vector<double>>();
}

void run_step(Context& ctx, const json& step, StepStatus& st) {
  const std::string& op = st.op;
  const double tol = step.value("tol", ctx.config.tol);
  const std::string base = stem(st, step);

  if (op == "generate") {
    const SetFamily& f = need_family(ctx, step);
    const std::string dir = step["family"].get<std::string>();
    save_family(f, ctx.config.output_dir / dir);
    st.outputs.push_back(dir + "/family.json");
    ctx.summary += "- generated " + std::to_string(f.length()) + " members of " + f.generator_id + "\n";
    return;
  }
  if (op == "energy_curve") {
    const SetFamily& f = need_family(ctx, step);
    const auto rows = energy_curve(f, betas_of(step));
    emit(ctx, st, base + ".csv", energy_table_csv(f, rows));
    ctx.summary += "- energy table with " + std::to_string(rows.size()) + " rows\n";
    return;
  }
  if (op == "energy_flatness") {
    const SetFamily& f = need_family(ctx, step);
    const auto betas = betas_of(step);
    const double slope_tol = step.value("slope_tol", tol);
    const double max_ratio = step.value("max_ratio", 3.0);
    const auto rows = energy_curve(f, betas);
    emit(ctx, st, base + ".csv", energy_table_csv(f, rows));
    const auto n = sizes_of(f);
    json out = json::array();
    bool pass = true;
    for (std::size_t b = 0; b < betas.size(); ++b) {
      std::vector<double> ratio;
      for (std::size_t m = 0; m < f.length(); ++m) ratio.push_back(rows[m * betas.size() + b].scale_invariant_ratio);
      const LineFit fit = fit_exponent(n, ratio);
      const auto [lo, hi] = std::minmax_element(ratio.begin(), ratio.end());
      const bool slope_ok = std::abs(fit.slope) <= slope_tol;
      const bool spread_ok = *hi / *lo <= max_ratio;
      pass = pass && slope_ok && spread_ok;
      out.push_back({{"beta", betas[b]}, {"fit", to_json(fit)}, {"max_over_min", *hi / *lo}, {"slope_ok", slope_ok},
                     {"spread_ok", spread_ok}});
      ctx.summary += "- beta " + rounded(betas[b]) + ": slope " + rounded(fit.slope) + " +- " +
                     rounded(fit.stderr_slope, 2) + ", max/min " + rounded(*hi / *lo) +
                     ((slope_ok && spread_ok) ? " (pass)" : " (FAIL)") + "\n";
    }
    emit(ctx, st, base + ".json",
         json({{"betas", out}, {"slope_tol", slope_tol}, {"max_ratio", max_ratio}, {"pass", pass}}).dump(2) + "\n");
    st.check = pass;
    return;
  }
  if (op == "fit") {
    const SetFamily& f = need_family(ctx, step);
    const std::string stat = step.value("statistic", std::string("diameter"));
    const std::string against = step.value("against", std::string("N"));
    std::vector<double> xs = against == "growth" ? f.growth_values : sizes_of(f);
    if (against != "growth" && against != "N") bad("fit: against must be N or growth");
    std::vector<double> ys;
    for (const auto& m : f.members) {
      if (stat == "diameter") {
        ys.push_back(m.diameter());
      } else if (stat == "min_separation") {
        ys.push_back(m.min_separation());
      } else if (stat == "diameter_stat") {
        ys.push_back(m.diameter() / m.min_separation());
      } else if (stat.rfind("ratio:", 0) == 0) {
        ys.push_back(riesz_sum(m, std::stod(stat.substr(6))).scale_invariant_ratio);
      } else if (stat.rfind("raw:", 0) == 0) {
        ys.push_back(riesz_sum(m, std::stod(stat.substr(4))).raw_sum);
      } else {
        bad("fit: unknown statistic '" + stat + "'");
      }
    }
    const LineFit fit = fit_exponent(xs, ys);
    std::string csv = "x,y\n";
    for (std::size_t i = 0; i < xs.size(); ++i) csv += format_double(xs[i]) + ',' + format_double(ys[i]) + '\n';
    emit(ctx, st, base + ".csv", csv);
    json out = {{"statistic", stat}, {"against", against}, {"fit", to_json(fit)}};
    if (step.contains("expect")) {
      const double expect = step["expect"].get<double>();
      const double within = step.value("within", tol);
      st.check = std::abs(fit.slope - expect) <= within;
      out["expect"] = expect;
      out["within"] = within;
      out["pass"] = *st.check;
    }
    emit(ctx, st, base + ".json", out.dump(2) + "\n");
    ctx.summary += "- slope of log " + stat + " vs log " + against + ": " + rounded(fit.slope) + " (r2 " +
                   rounded(fit.r2) + ")\n";
    return;
  }
  if (op == "adapt") {
    const SetFamily& f = need_family(ctx, step);
    const std::string kind = step.value("kind", std::string("hausdorff"));
    if (!step.contains("alpha")) bad("adapt: alpha is required");
    const double alpha = step["alpha"].get<double>();
    AdaptabilityVerdict v;
    if (kind == "minkowski") {
      v = check_minkowski_adaptable(f, alpha, tol);
    } else if (kind == "hausdorff") {
      const std::vector<double> betas = step.contains("betas") ? betas_of(step) : std::vector<double>{};
      v = check_hausdorff_adaptable(f, alpha, betas, tol, step.value("slack", 0.0));
    } else {
      bad("adapt: kind must be minkowski or hausdorff");
    }
    emit(ctx, st, base + ".json", to_json(v).dump(2) + "\n");
    st.check = v.ok;
    ctx.summary += "- " + kind + " " + rounded(alpha) + "-adaptable: " + (v.ok ? "yes" : "no") + " (diam slope " +
                   rounded(v.diam_fit.slope) + ")\n";
    return;
  }
  if (op == "dimension") {
    const SetFamily& f = need_family(ctx, step);
    const std::string kind = step.value("kind", std::string("hausdorff"));
    std::vector<SubsetStrategy> strategies = default_strategies(f);
    if (step.contains("strategies")) {
      const auto names = step["strategies"].get<std::vector<std::string>>();
      std::erase_if(strategies, [&](const SubsetStrategy& s) {
        return std::find(names.begin(), names.end(), s.name) == names.end();
      });
    }
    EstimateOptions opt;
    opt.tol = tol;
    const DimensionEstimate e = kind == "minkowski" ? estimate_minkowski_dimension(f, strategies, opt)
                                                    : estimate_hausdorff_dimension(f, strategies, opt);
    emit(ctx, st, base + ".json", to_json(e).dump(2) + "\n");
    ctx.summary += "- discrete " + kind + " dimension >= " + rounded(e.value) + " (strategy " + e.strategy_used + ")\n";
    return;
  }
  if (op == "boxcount") {
    const SetFamily& f = need_family(ctx, step);
    const auto deltas = step.at("deltas").get<std::vector<double>>();
    const BoxCountReport r = box_counting(f.members.back(), deltas, step.value("level", 0.95));
    emit(ctx, st, base + ".json", to_json(r).dump(2) + "\n");
    ctx.summary += "- box-counting dimension " + rounded(r.fitted_dimension) + " [" + rounded(r.ci_low) + ", " +
                   rounded(r.ci_high) + "]\n";
    return;
  }
  if (op == "distances") {
    const SetFamily& f = need_family(ctx, step);
    json out = json::array();
    for (const auto& m : f.members) {
      const double tau = step.value("tau", m.min_separation() * 1e-9);
      json row = to_json(distance_count_binned(m, tau));
      if (step.contains("delta")) row["fattened_length"] = fattened_distance_length(m, step["delta"].get<double>(), tau);
      out.push_back(row);
    }
    emit(ctx, st, base + ".json", out.dump(2) + "\n");
    ctx.summary += "- distinct distances per member: ";
    for (const auto& row : out) ctx.summary += std::to_string(row["distinct_count"].get<Index>()) + " ";
    ctx.summary += "\n";
    return;
  }
  if (op == "fekete") {
    const Domain dom = Domain::parse(step.value("domain", std::string("segment")));
    const double alpha = step.at("alpha").get<double>();
    const TransfiniteCurve c =
        transfinite_diameter_curve(dom, alpha, step.at("n_max").get<Index>(), step.value("budget", 2000),
                                   step.value("restarts", 8), step.value("seed", ctx.config.seed));
    emit(ctx, st, base + ".json", to_json(c).dump(2) + "\n");
    st.check = c.violations == 0;
    ctx.summary += "- D_N on " + dom.id() + ": last " + rounded(c.capacity_estimate, 6) + ", " +
                   std::to_string(c.violations) + " monotonicity violations\n";
    return;
  }
  bad("unknown op '" + op + "'");
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& config) {
  ExperimentReport report;
  Context ctx{config, {}, {}};
  fs::create_directories(config.output_dir);
  write_file(config.output_dir / "config.json", config.raw.dump(2) + "\n");
  std::string body;
  for (std::size_t i = 0; i < config.pipeline.size(); ++i) {
    const json& step = config.pipeline[i];
    StepStatus st;
    st.index = i;
    st.op = step["op"].get<std::string>();
    ctx.summary.clear();
    try {
      run_step(ctx, step, st);
      st.ok = true;
    } catch (const Error& e) {
      st.message = e.what();
    } catch (const json::exception& e) {
      st.message = std::string("config: ") + e.what();
    }
    report.ok = report.ok && st.ok;
    body += "## Step " + std::to_string(i) + ": " + st.op;
    if (step.contains("family")) body += " (" + step["family"].get<std::string>() + ")";
    body += "\n\n";
    if (step.contains("claim")) body += "Claim checked: " + step["claim"].get<std::string>() + "\n\n";
    body += st.ok ? ctx.summary : "- FAILED: " + st.message + "\n";
    if (st.check) body += std::string("- check: ") + (*st.check ? "pass" : "fail") + "\n";
    for (const auto& o : st.outputs) body += "- output: `" + o + "`\n";
    body += "\n";
    report.steps.push_back(std::move(st));
  }

  json status = json::array();
  for (const auto& s : report.steps) {
    json row = {{"index", s.index}, {"op", s.op}, {"ok", s.ok}, {"message", s.message}, {"outputs", s.outputs}};
    if (s.check) row["check"] = *s.check;
    status.push_back(row);
  }
  write_file(config.output_dir / "status.json", json({{"ok", report.ok}, {"steps", status}}).dump(2) + "\n");
  std::string md = "# " + config.experiment_id + "\n\nseed " + std::to_string(config.seed) + ", slope tolerance " +
                   rounded(config.tol) + ". Steps: " + std::to_string(report.steps.size()) + ", " +
                   (report.ok ? "all succeeded" : "some failed") + ".\n\n" + body;
  write_file(config.output_dir / "summary.md", md);
  return report;
}

}  // namespace ddim
