// ddim: command-line front end.
//
// Exit codes: 0 success, 2 invalid input or usage, 3 singular input,
// 4 resource cap exceeded, 1 anything else.

#include "ddim/dimension.hpp"
#include "ddim/distances.hpp"
#include "ddim/energy.hpp"
#include "ddim/experiment.hpp"
#include "ddim/fekete.hpp"
#include "ddim/generators.hpp"
#include "ddim/io.hpp"
#include "ddim/parallel.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <iostream>
#include <optional>

using namespace ddim;

namespace {

struct Globals {
  std::size_t threads = 0;
  std::optional<std::uint64_t> seed;
  std::string out;
};

// Writes to --out when given, else stdout.
void deliver(const Globals& g, const std::string& content, const std::string& default_name = {}) {
  if (g.out.empty()) {
    std::cout << content;
    return;
  }
  fs::path target = g.out;
  if (!default_name.empty() && fs::is_directory(target)) target /= default_name;
  write_file(target, content);
  std::cerr << "wrote " << target.string() << "\n";
}

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::invalid_input: return 2;
    case ErrorKind::singular_input: return 3;
    case ErrorKind::resource_limit: return 4;
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete dimension diagnostics for finite point sets"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--threads", g.threads, "worker threads (default: DDIM_THREADS or all cores)");
  app.add_option("--seed", g.seed, "seed override");
  app.add_option("--out", g.out, "output file or directory (default: stdout)");

  // generate
  auto* gen = app.add_subcommand("generate", "write a generated family (CSV members + family.json)");
  std::string gen_id, gen_params = "{}";
  gen->add_option("generator", gen_id, "generator id")->required()->check(CLI::IsMember(generator_ids()));
  gen->add_option("--params", gen_params, "generator parameters as a JSON object");

  // energy
  auto* energy = app.add_subcommand("energy", "Riesz sums of a point file or family directory");
  std::string energy_in;
  std::vector<double> energy_betas{1.0};
  energy->add_option("--input", energy_in, "point CSV or family directory")->required();
  energy->add_option("--beta", energy_betas, "exponents")->expected(1, -1);

  // adapt
  auto* adapt = app.add_subcommand("adapt", "Minkowski/Hausdorff adaptability verdict for a family");
  std::string adapt_in, adapt_kind = "hausdorff";
  double adapt_alpha = 1.0, adapt_tol = kDefaultSlopeTol, adapt_slack = 0.0;
  std::vector<double> adapt_betas;
  adapt->add_option("--family", adapt_in, "family directory")->required();
  adapt->add_option("--alpha", adapt_alpha, "exponent")->required();
  adapt->add_option("--kind", adapt_kind)->check(CLI::IsMember({"minkowski", "hausdorff"}));
  adapt->add_option("--betas", adapt_betas, "energy exponents (default: 1/8 and quarter steps below alpha)");
  adapt->add_option("--tol", adapt_tol, "slope tolerance");
  adapt->add_option("--slack", adapt_slack, "extra allowance on energy slopes");

  // dimension
  auto* dim = app.add_subcommand("dimension", "strategy-based lower bound on the discrete dimension");
  std::string dim_in, dim_kind = "hausdorff";
  double dim_tol = kDefaultSlopeTol;
  dim->add_option("--family", dim_in, "family directory")->required();
  dim->add_option("--kind", dim_kind)->check(CLI::IsMember({"minkowski", "hausdorff"}));
  dim->add_option("--tol", dim_tol, "slope tolerance");

  // distances
  auto* dist = app.add_subcommand("distances", "distinct-distance count and fattened distance length");
  std::string dist_in;
  double dist_tau = 0.0, dist_delta = 0.0;
  bool dist_exact = false;
  dist->add_option("--input", dist_in, "point CSV")->required();
  dist->add_option("--tau", dist_tau, "binning tolerance (default min_separation*1e-9)");
  dist->add_option("--delta", dist_delta, "fattening radius for the distance-set length");
  dist->add_flag("--exact", dist_exact, "exact integer counting");

  // fekete
  auto* fek = app.add_subcommand("fekete", "Fekete points and transfinite-diameter approximants");
  std::string fek_domain = "segment";
  double fek_alpha = 1.0;
  Index fek_n = 0, fek_nmax = 0;
  int fek_budget = 2000, fek_restarts = 8;
  fek->add_option("--domain", fek_domain, "segment | circle | square_boundary | solid_square | cantor:<lambda>:<k>");
  fek->add_option("--alpha", fek_alpha, "Riesz exponent");
  auto* fek_n_opt = fek->add_option("--n", fek_n, "number of points");
  auto* fek_nmax_opt = fek->add_option("--n-max", fek_nmax, "compute D_N for N = 2..n-max");
  fek_n_opt->excludes(fek_nmax_opt);
  fek->add_option("--budget", fek_budget, "iterations per restart");
  fek->add_option("--restarts", fek_restarts, "multi-start runs");

  // boxcount
  auto* box = app.add_subcommand("boxcount", "box-counting dimension of a point file");
  std::string box_in;
  std::vector<double> box_deltas;
  int box_kmin = 4, box_kmax = 12;
  box->add_option("--input", box_in, "point CSV")->required();
  box->add_option("--deltas", box_deltas, "decreasing radii (default 2^-k for k in [kmin, kmax])");
  box->add_option("--kmin", box_kmin);
  box->add_option("--kmax", box_kmax);

  // run
  auto* run = app.add_subcommand("run", "run an experiment config");
  std::string run_config;
  run->add_option("config", run_config, "config JSON")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  if (g.threads > 0) set_thread_count(g.threads);

  try {
    if (*gen) {
      json params;
      try {
        params = json::parse(gen_params);
      } catch (const json::exception& e) {
        throw InvalidInput(std::string("--params: ") + e.what());
      }
      if (g.seed && gen_id == "delone") params["seed"] = *g.seed;
      const SetFamily f = generate_family({gen_id, params});
      if (g.out.empty()) throw InvalidInput("generate: --out <directory> is required");
      save_family(f, g.out);
      std::cout << family_manifest(f).dump(2) << "\n";
    } else if (*energy) {
      const SetFamily f = load_family_or_points(energy_in);
      deliver(g, energy_table_csv(f, energy_curve(f, energy_betas)), "energy.csv");
    } else if (*adapt) {
      const SetFamily f = load_family(adapt_in);
      const AdaptabilityVerdict v = adapt_kind == "minkowski"
                                        ? check_minkowski_adaptable(f, adapt_alpha, adapt_tol)
                                        : check_hausdorff_adaptable(f, adapt_alpha, adapt_betas, adapt_tol, adapt_slack);
      deliver(g, to_json(v).dump(2) + "\n", "verdict.json");
    } else if (*dim) {
      const SetFamily f = load_family(dim_in);
      EstimateOptions opt;
      opt.tol = dim_tol;
      const auto strategies = default_strategies(f);
      const DimensionEstimate e = dim_kind == "minkowski" ? estimate_minkowski_dimension(f, strategies, opt)
                                                          : estimate_hausdorff_dimension(f, strategies, opt);
      deliver(g, to_json(e).dump(2) + "\n", "dimension.json");
    } else if (*dist) {
      const PointSet a = load_points_csv(dist_in);
      const double tau = dist_tau > 0.0 ? dist_tau : a.min_separation() * 1e-9;
      json out = to_json(dist_exact ? distance_count_exact(a) : distance_count_binned(a, tau));
      if (dist_delta > 0.0) out["fattened_length"] = fattened_distance_length(a, dist_delta, tau);
      deliver(g, out.dump(2) + "\n", "distances.json");
    } else if (*fek) {
      const Domain d = Domain::parse(fek_domain);
      const std::uint64_t seed = g.seed.value_or(1);
      if (fek_nmax > 0) {
        deliver(g, to_json(transfinite_diameter_curve(d, fek_alpha, fek_nmax, fek_budget, fek_restarts, seed)).dump(2) + "\n",
                "transfinite.json");
      } else {
        if (fek_n < 2) throw InvalidInput("fekete: give --n >= 2 or --n-max");
        const FeketeResult r = fekete_optimize(d, fek_n, fek_alpha, fek_budget, fek_restarts, seed);
        if (!g.out.empty() && fs::is_directory(g.out)) {
          save_points_csv(r.configuration, fs::path(g.out) / "configuration.csv");
          write_file(fs::path(g.out) / "fekete.json", to_json(r).dump(2) + "\n");
        } else {
          std::cout << points_csv(r.configuration);
          std::cerr << to_json(r).dump(2) << "\n";
        }
      }
    } else if (*box) {
      const PointSet a = load_points_csv(box_in);
      if (box_deltas.empty()) {
        for (int k = box_kmin; k <= box_kmax; ++k) box_deltas.push_back(std::ldexp(1.0, -k));
      }
      deliver(g, to_json(box_counting(a, box_deltas)).dump(2) + "\n", "boxcount.json");
    } else if (*run) {
      json raw;
      try {
        raw = json::parse(read_file(run_config));
      } catch (const json::exception& e) {
        throw InvalidInput(run_config + ": " + e.what());
      }
      if (g.seed) raw["seed"] = *g.seed;
      if (!g.out.empty()) raw["output_dir"] = g.out;
      const ExperimentConfig config = parse_experiment_config(raw);
      const ExperimentReport report = run_experiment(config);
      for (const auto& s : report.steps) {
        std::cout << s.index << ' ' << s.op << ": " << (s.ok ? "ok" : "FAILED " + s.message);
        if (s.check) std::cout << (*s.check ? " [check pass]" : " [check fail]");
        std::cout << "\n";
      }
      std::cout << "outputs in " << config.output_dir.string() << "\n";
      return report.ok ? 0 : 1;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
