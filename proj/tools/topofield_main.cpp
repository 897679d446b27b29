// topofield command-line tool: solve one problem, run a parametric sweep, or
// render a trained density network at higher resolution.

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "topofield/errors.hpp"
#include "topofield/harness.hpp"
#include "topofield/io.hpp"
#include "topofield/neuralfield.hpp"
#include "topofield/optloop.hpp"
#include "topofield/problem.hpp"
#include "topofield/simp.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace topofield;

namespace {

constexpr const char* kVersion = "0.1.0";

constexpr int kExitOk = 0;
constexpr int kExitBadConfig = 2;
constexpr int kExitNumeric = 3;

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::tm tm_utc{};
  gmtime_r(&t, &tm_utc);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

struct SolveFlags {
  std::string config;
  std::string out_dir = "out";
  int64_t seed = -1;
  std::string filter;
  int epochs = -1;
  int kernels = -1;
  double lr = -1.0;
  bool simp = false;
};

json optimization_to_json(const OptimizationConfig& c) {
  return json{{"v_star", c.v_star},
              {"epochs", c.epochs},
              {"filter", to_string(c.filter)},
              {"seed", c.seed},
              {"alpha0", c.alpha0},
              {"alpha_max", c.alpha_max},
              {"alpha_increment", c.alpha_increment},
              {"learning_rate", c.learning_rate},
              {"kernels", c.kernels}};
}

void config_from_manifest_block(const json& j, OptimizationConfig& config) {
  config.v_star = j.value("v_star", config.v_star);
  config.epochs = j.value("epochs", config.epochs);
  if (j.contains("filter")) config.filter = filter_from_string(j.at("filter").get<std::string>());
  config.seed = j.value("seed", config.seed);
  config.alpha0 = j.value("alpha0", config.alpha0);
  config.alpha_max = j.value("alpha_max", config.alpha_max);
  config.alpha_increment = j.value("alpha_increment", config.alpha_increment);
  config.learning_rate = j.value("learning_rate", config.learning_rate);
  config.kernels = j.value("kernels", config.kernels);
}

int cmd_solve(const SolveFlags& flags) {
  ProblemSpec problem;
  OptimizationConfig config;
  json opt_block;

  // Accept a problem config, a preset name, or a previously written manifest
  // (which embeds the resolved problem and optimization blocks).
  if (fs::exists(flags.config)) {
    std::ifstream in(flags.config);
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw ParameterError("bad JSON in " + flags.config + ": " + e.what());
    }
    try {
      problem = problem_from_json(j.contains("problem") ? j.at("problem") : j);
      if (j.contains("optimization")) opt_block = j.at("optimization");
    } catch (const json::exception& e) {
      throw ParameterError("bad config " + flags.config + ": " + e.what());
    }
  } else {
    problem = preset_problem(flags.config);
  }

  config.v_star = problem.volume_fraction;
  if (!opt_block.is_null()) config_from_manifest_block(opt_block, config);
  if (flags.seed >= 0) config.seed = static_cast<std::uint64_t>(flags.seed);
  if (!flags.filter.empty()) config.filter = filter_from_string(flags.filter);
  if (flags.epochs > 0) config.epochs = flags.epochs;
  if (flags.kernels > 0) config.kernels = flags.kernels;
  if (flags.lr > 0) config.learning_rate = flags.lr;
  config.validate();

  fs::create_directories(flags.out_dir);
  const fs::path out(flags.out_dir);

  json manifest;
  manifest["tool"] = "topofield";
  manifest["version"] = kVersion;
  manifest["command"] = flags.simp ? "solve --simp" : "solve";
  manifest["created_utc"] = utc_timestamp();
  manifest["seed"] = config.seed;
  manifest["problem"] = problem_to_json(problem.validated());
  manifest["optimization"] = optimization_to_json(config);
  json outputs = {{"history", "history.csv"},
                  {"density_pgm", "density.pgm"},
                  {"density_csv", "density.csv"},
                  {"manifest", "manifest.json"}};
  if (!flags.simp) {
    outputs["checkpoint"] = "checkpoint.csv";
    outputs["conditioning_csv"] = "conditioning.csv";
  }
  manifest["outputs"] = outputs;
  // written before the run starts so aborted runs stay reproducible
  write_text_file((out / "manifest.json").string(), manifest.dump(2) + "\n");

  ConvergenceHistory history;
  Raster raster;
  if (flags.simp) {
    SIMPConfig simp_cfg;
    simp_cfg.max_iters = config.epochs;
    history = run_simp(problem, simp_cfg);
    raster = field_to_raster(problem.grid, history.final_density.values);
  } else {
    OptimizationRun run = run_optimization(problem, config);
    history = std::move(run.history);
    if (!history.final_density.values.empty())
      raster = field_to_raster(problem.grid, history.final_density.values);
    save_checkpoint((out / "checkpoint.csv").string(), run.params);
    write_raster_csv((out / "conditioning.csv").string(),
                     field_to_raster(problem.grid, run.conditioning.values));
  }

  write_history_csv((out / "history.csv").string(), history);
  if (!raster.values.empty()) {
    write_density_pgm((out / "density.pgm").string(), raster);
    write_raster_csv((out / "density.csv").string(), raster);
  }

  if (!history.ok()) {
    std::cerr << "numeric failure after " << history.records.size()
              << " epochs: " << history.error << "\n(partial outputs written to " << flags.out_dir
              << ")\n";
    return kExitNumeric;
  }
  std::cout << "done: " << history.records.size() << " epochs, final compliance "
            << format_double(history.records.back().compliance) << ", outputs in "
            << flags.out_dir << "\n";
  return kExitOk;
}

int cmd_sweep(const std::string& spec_path, int workers, const std::string& out_dir) {
  const SweepSpec spec = load_sweep(spec_path);
  const SweepResult result = run_sweep(spec, workers);
  const SweepSummary summary = summarize(spec, result);

  fs::create_directories(out_dir);
  const fs::path out(out_dir);
  write_text_file((out / "results.csv").string(), sweep_records_csv(result, spec));
  write_text_file((out / "summary.json").string(),
                  summary_to_json(spec, result, summary).dump(2) + "\n");

  std::cout << "sweep " << spec.name << ": " << result.records.size() << " records, "
            << result.failures << " failures\n";
  for (const auto& fsu : summary.per_filter) {
    std::cout << "  " << fsu.filter << ": mean compliance " << fsu.mean_final_compliance;
    if (fsu.filter == "gamma" || fsu.filter == "log")
      std::cout << ", mean speedup " << fsu.mean_speedup << "%, improved fraction "
                << fsu.improved_fraction;
    std::cout << "\n";
  }
  for (const auto& f : summary.failures) std::cerr << "  failed: " << f << "\n";

  if (result.failures > 0 && result.failures == static_cast<int>(result.records.size())) {
    std::cerr << "every cell failed\n";
    return kExitNumeric;
  }
  return kExitOk;
}

int cmd_render(const std::string& checkpoint_path, const std::string& problem_path, int factor,
               const std::string& filter_name, const std::string& out_path) {
  if (factor < 1) throw ParameterError("render: --factor must be >= 1");
  const NetworkParams params = load_checkpoint(checkpoint_path);
  const ProblemSpec problem = resolve_problem(problem_path);
  const FilterKind filter = filter_from_string(filter_name);
  const Raster raster = render_density(params, problem, filter, factor);
  write_density_pgm(out_path, raster);
  std::cout << "wrote " << raster.width << "x" << raster.height << " raster to " << out_path
            << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"topofield: 2D topology optimization with a neural density field"};
  app.require_subcommand(1);

  SolveFlags solve_flags;
  CLI::App* solve = app.add_subcommand("solve", "run one optimization");
  solve->add_option("config", solve_flags.config, "problem config, preset name, or manifest")
      ->required();
  solve->add_option("--seed", solve_flags.seed, "RNG seed");
  solve->add_option("--filter", solve_flags.filter, "conditioning filter: none, gamma or log");
  solve->add_option("--epochs", solve_flags.epochs, "epoch count");
  solve->add_option("--kernels", solve_flags.kernels, "frequency kernel count");
  solve->add_option("--lr", solve_flags.lr, "Adam learning rate");
  solve->add_option("--out", solve_flags.out_dir, "output directory");
  solve->add_flag("--simp", solve_flags.simp, "run the SIMP baseline instead of the network");

  std::string sweep_spec;
  int sweep_workers = 0;
  std::string sweep_out = "out";
  CLI::App* sweep = app.add_subcommand("sweep", "run a parametric study");
  sweep->add_option("spec", sweep_spec, "sweep spec JSON")->required();
  sweep->add_option("--workers", sweep_workers, "worker threads (0 = auto)");
  sweep->add_option("--out", sweep_out, "output directory");

  std::string render_checkpoint, render_problem = "beam", render_out = "render.pgm";
  std::string render_filter = "none";
  int render_factor = 1;
  CLI::App* render = app.add_subcommand("render", "render a checkpoint at higher resolution");
  render->add_option("checkpoint", render_checkpoint, "checkpoint blob from solve")->required();
  render->add_option("--problem", render_problem, "problem config or preset");
  render->add_option("--factor", render_factor, "upsampling factor");
  render->add_option("--filter", render_filter, "filter the checkpoint was trained with");
  render->add_option("--out", render_out, "output PGM path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);  // prints help text or the parse error
    return code == 0 ? kExitOk : kExitBadConfig;
  }

  try {
    if (*solve) return cmd_solve(solve_flags);
    if (*sweep) return cmd_sweep(sweep_spec, sweep_workers, sweep_out);
    if (*render)
      return cmd_render(render_checkpoint, render_problem, render_factor, render_filter,
                        render_out);
  } catch (const ParameterError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
  return kExitBadConfig;
}
