#pragma once

// Config-driven pipelines.
//
// Config (JSON):
//   {
//     "experiment_id": "delone_energy",
//     "seed": 7,                         // default seed for generators
//     "output_dir": "out/delone",        // overridable from the CLI
//     "tol": 0.05,                       // default slope tolerance
//     "families": {"<name>": {"generator": "<id>", "params": {...}}},
//     "pipeline": [{"op": "<op>", "family": "<name>", ...}, ...]
//   }
//
// Ops and their parameters (defaults in brackets):
//   generate         family
//   energy_curve     family, betas
//   energy_flatness  family, betas, slope_tol [tol], max_ratio [3]
//   fit              family, statistic ("diameter" | "min_separation" |
//                    "diameter_stat" | "ratio:<beta>" | "raw:<beta>"),
//                    against ("N" | "growth") [N]
//   adapt            family, kind ("minkowski" | "hausdorff"), alpha, betas,
//                    tol, slack
//   dimension        family, kind, strategies ([all applicable]), tol
//   boxcount         family, deltas, level [0.95]
//   distances        family, tau, delta
//   fekete           domain, alpha, n_max, budget [2000], restarts [8]
// Every op may carry "claim", a sentence echoed into summary.md.
//
// Outputs in output_dir: config.json (echo with defaults), one directory per
// generated family, NN_<op>[_<family>].{csv,json} per step, status.json and
// summary.md. Nothing time- or host-dependent is written, so identical
// configs give byte-identical outputs.

#include "ddim/io.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace ddim {

struct ExperimentConfig {
  json raw;
  std::string experiment_id;
  std::uint64_t seed = 1;
  fs::path output_dir;
  double tol = 0.05;
  json families = json::object();
  json pipeline = json::array();
};

/// Validates and fills defaults. Throws InvalidInput naming the bad field.
ExperimentConfig parse_experiment_config(const json& j);
ExperimentConfig load_experiment_config(const fs::path& file);

struct StepStatus {
  std::size_t index = 0;
  std::string op;
  bool ok = false;
  std::string message;
  std::vector<std::string> outputs;
  /// op-specific pass/fail when the step checks a criterion
  std::optional<bool> check;
};

struct ExperimentReport {
  std::vector<StepStatus> steps;
  bool ok = true;
};

/// Runs every step; a failed step is reported and the remaining steps still
/// run (steps needing a family that failed to generate fail in turn).
ExperimentReport run_experiment(const ExperimentConfig& config);

}  // namespace ddim
