#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "topofield/optloop.hpp"
#include "topofield/problem.hpp"
#include "topofield/simp.hpp"

namespace topofield {

// Percentage of the epoch budget saved before the conditioned run first
// undercuts the unconditioned run's final compliance.
struct SpeedupResult {
  double percent = 0.0;
  bool improved = false;  // false: conditioned run never went below the final baseline
};

SpeedupResult convergence_speedup(const ConvergenceHistory& hist_cf,
                                  const ConvergenceHistory& hist_base);

struct LoadPosition {
  int x = 0;  // node coordinates
  int y = 0;
};

// Parametric-study specification. Arms ("filters") may contain
// "none", "gamma", "log" and "simp"; speedups are measured for the
// conditioned arms against the "none" arm of the same cell, which shares the
// problem, seed and epoch budget.
struct SweepSpec {
  std::string name;
  GridDomain grid;
  BoundarySpec supports;  // loads come from load_positions
  PassiveMask passive;
  MaterialModel material;
  std::vector<LoadPosition> load_positions;
  int load_dof = 1;          // 0 = x, 1 = y
  double load_value = -1.0;  // unit downward load
  std::vector<double> volume_fractions;
  std::vector<std::string> filters;
  int seeds_per_cell = 3;
  std::uint64_t master_seed = 0;
  int epochs = 400;
  int kernels = 128;
  double learning_rate = 0.002;
  double alpha0 = 1.0;
  double alpha_max = 100.0;
  double alpha_increment = 0.25;
  SIMPConfig simp;

  void validate() const;
  ProblemSpec make_problem(int load_index, int vf_index) const;
};

SweepSpec sweep_from_json(const nlohmann::json& j);
SweepSpec load_sweep(const std::string& path);

// One row per (cell, arm).
struct SweepRecord {
  int load_index = 0;
  int vf_index = 0;
  int seed_index = 0;
  std::uint64_t seed = 0;
  std::string filter;
  bool failed = false;
  std::string error;
  int epochs_run = 0;
  double final_compliance = 0.0;
  double final_vol_frac = 0.0;
  double speedup_pct = 0.0;  // meaningful only when has_speedup
  bool has_speedup = false;  // conditioned arms only
  bool improved = false;
  double wall_seconds = 0.0;  // not serialized: varies run to run
};

struct SweepResult {
  std::vector<SweepRecord> records;  // deterministic order: cell-major, arm order as specified
  int cells = 0;
  int failures = 0;
};

// Executes all cells on a work queue (workers <= 0 picks a machine default).
// Results are independent of the worker count. Per-cell failures are recorded
// in the result, not thrown.
SweepResult run_sweep(const SweepSpec& spec, int workers = 0);

struct FilterSummary {
  std::string filter;
  int records = 0;
  int failures = 0;
  double mean_final_compliance = 0.0;
  double mean_compliance_ratio = 0.0;  // vs the matching none arm
  double mean_speedup = 0.0;
  double median_speedup = 0.0;
  double improved_fraction = 0.0;
};

struct SweepSummary {
  std::vector<FilterSummary> per_filter;
  std::vector<std::string> failures;
};

SweepSummary summarize(const SweepSpec& spec, const SweepResult& result);

std::string sweep_records_csv(const SweepResult& result, const SweepSpec& spec);
nlohmann::json summary_to_json(const SweepSpec& spec, const SweepResult& result,
                               const SweepSummary& summary);

}  // namespace topofield
