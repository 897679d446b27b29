#include "topofield/harness.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <numeric>
#include <tuple>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "topofield/errors.hpp"
#include "topofield/io.hpp"
#include "topofield/rng.hpp"

namespace topofield {

SpeedupResult convergence_speedup(const ConvergenceHistory& hist_cf,
                                  const ConvergenceHistory& hist_base) {
  const std::size_t budget = hist_base.records.size();
  if (budget == 0 || hist_cf.records.empty())
    throw ParameterError("convergence_speedup: empty history");
  if (hist_cf.records.size() != budget)
    throw ParameterError("convergence_speedup: mismatched epoch budgets");

  const double c_final = hist_base.records.back().compliance;
  for (std::size_t t = 0; t < budget; ++t) {
    if (hist_cf.records[t].compliance < c_final) {
      return {100.0 * static_cast<double>(budget - t) / static_cast<double>(budget), true};
    }
  }
  return {0.0, false};  // never undercut the baseline's final compliance
}

void SweepSpec::validate() const {
  grid.validate();
  material.validate();
  if (load_positions.empty()) throw ParameterError("sweep: no load positions");
  if (volume_fractions.empty()) throw ParameterError("sweep: no volume fractions");
  if (filters.empty()) throw ParameterError("sweep: no filters");
  if (seeds_per_cell < 1) throw ParameterError("sweep: seeds_per_cell must be >= 1");
  if (epochs < 1) throw ParameterError("sweep: epochs must be >= 1");
  if (load_dof != 0 && load_dof != 1) throw ParameterError("sweep: load_dof must be 0 or 1");

  const std::set<std::string> known{"none", "gamma", "log", "simp"};
  bool has_conditioned = false, has_none = false;
  for (const auto& f : filters) {
    if (!known.count(f)) throw ParameterError("sweep: unknown filter arm '" + f + "'");
    if (f == "gamma" || f == "log") has_conditioned = true;
    if (f == "none") has_none = true;
  }
  if (has_conditioned && !has_none)
    throw ParameterError("sweep: conditioned arms need the \"none\" baseline arm");
  for (double vf : volume_fractions)
    if (!(vf > 0.0 && vf < 1.0)) throw ParameterError("sweep: volume fractions must be in (0, 1)");
  for (const auto& lp : load_positions)
    if (lp.x < 0 || lp.x > grid.nelx || lp.y < 0 || lp.y > grid.nely)
      throw ParameterError("sweep: load position out of range");
  // every generated problem must pass boundary validation
  make_problem(0, 0);
}

ProblemSpec SweepSpec::make_problem(int load_index, int vf_index) const {
  ProblemSpec p;
  p.grid = grid;
  p.material = material;
  p.passive = passive;
  p.bc.fixed_dofs = supports.fixed_dofs;
  const LoadPosition& lp = load_positions.at(static_cast<std::size_t>(load_index));
  p.bc.loads[2 * grid.node_index(lp.x, lp.y) + load_dof] = load_value;
  p.volume_fraction = volume_fractions.at(static_cast<std::size_t>(vf_index));
  std::ostringstream name;
  name << this->name << "_l" << load_index << "_v" << vf_index;
  p.name = name.str();
  return p.validated();
}

namespace {

struct CellJob {
  int load_index, vf_index, seed_index;
};

// Runs every arm of one cell with a shared seed; conditioned arms are paired
// with the none arm for the speedup metric.
std::vector<SweepRecord> run_cell(const SweepSpec& spec, const CellJob& job) {
  const std::uint64_t seed = derive_seed(
      spec.master_seed,
      (static_cast<std::uint64_t>(job.load_index) * spec.volume_fractions.size() +
       static_cast<std::uint64_t>(job.vf_index)) *
              static_cast<std::uint64_t>(spec.seeds_per_cell) +
          static_cast<std::uint64_t>(job.seed_index));
  const ProblemSpec problem = spec.make_problem(job.load_index, job.vf_index);

  OptimizationConfig config;
  config.v_star = problem.volume_fraction;
  config.epochs = spec.epochs;
  config.seed = seed;
  config.kernels = spec.kernels;
  config.learning_rate = spec.learning_rate;
  config.alpha0 = spec.alpha0;
  config.alpha_max = spec.alpha_max;
  config.alpha_increment = spec.alpha_increment;

  ConvergenceHistory baseline;
  bool baseline_ok = false;
  std::vector<SweepRecord> records;
  records.reserve(spec.filters.size());

  for (const auto& arm : spec.filters) {
    SweepRecord rec;
    rec.load_index = job.load_index;
    rec.vf_index = job.vf_index;
    rec.seed_index = job.seed_index;
    rec.seed = seed;
    rec.filter = arm;
    try {
      ConvergenceHistory hist;
      if (arm == "simp") {
        hist = run_simp(problem, spec.simp);
      } else {
        config.filter = filter_from_string(arm);
        hist = run_optimization(problem, config).history;
      }
      if (!hist.ok()) throw NumericError(hist.error);
      rec.epochs_run = static_cast<int>(hist.records.size());
      rec.final_compliance = hist.records.back().compliance;
      rec.wall_seconds = hist.wall_time_seconds;
      rec.final_vol_frac = mean_density(hist.final_density, problem.passive);
      if (arm == "none") {
        baseline = hist;
        baseline_ok = true;
      } else if (arm != "simp") {
        if (!baseline_ok) throw NumericError("baseline arm failed, no pairing");
        const SpeedupResult s = convergence_speedup(hist, baseline);
        rec.speedup_pct = s.percent;
        rec.improved = s.improved;
        rec.has_speedup = true;
      }
    } catch (const std::exception& e) {
      rec.failed = true;
      rec.error = e.what();
    }
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace

SweepResult run_sweep(const SweepSpec& spec, int workers) {
  spec.validate();
  std::vector<CellJob> jobs;
  for (std::size_t li = 0; li < spec.load_positions.size(); ++li)
    for (std::size_t vi = 0; vi < spec.volume_fractions.size(); ++vi)
      for (int si = 0; si < spec.seeds_per_cell; ++si)
        jobs.push_back({static_cast<int>(li), static_cast<int>(vi), si});

  std::vector<std::vector<SweepRecord>> per_cell(jobs.size());
  if (workers <= 0) {
    const unsigned hw = std::thread::hardware_concurrency();
    workers = static_cast<int>(hw == 0 ? 1 : hw);
  }
  workers = std::min<int>(workers, static_cast<int>(jobs.size()));

  std::atomic<std::size_t> next{0};
  auto worker_fn = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      per_cell[i] = run_cell(spec, jobs[i]);
    }
  };
  if (workers <= 1) {
    worker_fn();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker_fn);
    for (auto& t : pool) t.join();
  }

  SweepResult result;
  result.cells = static_cast<int>(jobs.size());
  for (auto& cell : per_cell) {
    for (auto& rec : cell) {
      result.failures += rec.failed ? 1 : 0;
      result.records.push_back(std::move(rec));
    }
  }
  return result;
}

SweepSummary summarize(const SweepSpec& spec, const SweepResult& result) {
  SweepSummary summary;
  // baseline compliance per cell for the ratio aggregate
  std::map<std::tuple<int, int, int>, double> none_compliance;
  for (const auto& r : result.records)
    if (r.filter == "none" && !r.failed)
      none_compliance[{r.load_index, r.vf_index, r.seed_index}] = r.final_compliance;

  for (const auto& arm : spec.filters) {
    FilterSummary fs;
    fs.filter = arm;
    std::vector<double> speedups;
    double compliance_sum = 0.0, ratio_sum = 0.0;
    int ratio_count = 0, improved = 0, ok = 0;
    for (const auto& r : result.records) {
      if (r.filter != arm) continue;
      ++fs.records;
      if (r.failed) {
        ++fs.failures;
        continue;
      }
      ++ok;
      compliance_sum += r.final_compliance;
      auto it = none_compliance.find({r.load_index, r.vf_index, r.seed_index});
      if (it != none_compliance.end() && it->second > 0.0) {
        ratio_sum += r.final_compliance / it->second;
        ++ratio_count;
      }
      if (r.has_speedup) {
        speedups.push_back(r.speedup_pct);
        improved += r.improved ? 1 : 0;
      }
    }
    if (ok > 0) fs.mean_final_compliance = compliance_sum / ok;
    if (ratio_count > 0) fs.mean_compliance_ratio = ratio_sum / ratio_count;
    if (!speedups.empty()) {
      fs.mean_speedup =
          std::accumulate(speedups.begin(), speedups.end(), 0.0) / speedups.size();
      std::sort(speedups.begin(), speedups.end());
      const std::size_t m = speedups.size();
      fs.median_speedup =
          m % 2 == 1 ? speedups[m / 2] : 0.5 * (speedups[m / 2 - 1] + speedups[m / 2]);
      fs.improved_fraction = static_cast<double>(improved) / speedups.size();
    }
    summary.per_filter.push_back(std::move(fs));
  }

  for (const auto& r : result.records) {
    if (!r.failed) continue;
    std::ostringstream msg;
    msg << "load " << r.load_index << " vf " << r.vf_index << " seed " << r.seed_index << " arm "
        << r.filter << ": " << r.error;
    summary.failures.push_back(msg.str());
  }
  return summary;
}

std::string sweep_records_csv(const SweepResult& result, const SweepSpec& spec) {
  std::ostringstream out;
  out << "load_index,load_x,load_y,vf,seed_index,seed,filter,status,epochs_run,"
         "final_compliance,final_vol_frac,speedup_pct,improved\n";
  for (const auto& r : result.records) {
    const LoadPosition& lp = spec.load_positions.at(static_cast<std::size_t>(r.load_index));
    out << r.load_index << ',' << lp.x << ',' << lp.y << ','
        << format_double(spec.volume_fractions.at(static_cast<std::size_t>(r.vf_index))) << ','
        << r.seed_index << ',' << r.seed << ',' << r.filter << ','
        << (r.failed ? "failed" : "ok") << ',' << r.epochs_run << ',';
    if (!r.failed)
      out << format_double(r.final_compliance) << ',' << format_double(r.final_vol_frac);
    else
      out << ',';
    out << ',';
    if (r.has_speedup && !r.failed)
      out << format_double(r.speedup_pct) << ',' << (r.improved ? 1 : 0);
    else
      out << ',';
    out << '\n';
  }
  return out.str();
}

nlohmann::json summary_to_json(const SweepSpec& spec, const SweepResult& result,
                               const SweepSummary& summary) {
  nlohmann::json j;
  j["name"] = spec.name;
  j["cells"] = result.cells;
  j["records"] = result.records.size();
  j["failures"] = result.failures;
  nlohmann::json per_filter = nlohmann::json::array();
  for (const auto& fs : summary.per_filter) {
    per_filter.push_back({{"filter", fs.filter},
                          {"records", fs.records},
                          {"failures", fs.failures},
                          {"mean_final_compliance", fs.mean_final_compliance},
                          {"mean_compliance_ratio_vs_none", fs.mean_compliance_ratio},
                          {"mean_speedup_pct", fs.mean_speedup},
                          {"median_speedup_pct", fs.median_speedup},
                          {"improved_fraction", fs.improved_fraction}});
  }
  j["per_filter"] = per_filter;

  // compliance curves sorted by the none arm, one entry per cell
  std::map<std::tuple<int, int, int>, std::map<std::string, double>> cells;
  for (const auto& r : result.records)
    if (!r.failed) cells[{r.load_index, r.vf_index, r.seed_index}][r.filter] = r.final_compliance;
  std::vector<const std::map<std::string, double>*> ordered;
  for (const auto& [key, arms] : cells)
    if (arms.count("none")) ordered.push_back(&arms);
  std::sort(ordered.begin(), ordered.end(),
            [](auto* a, auto* b) { return a->at("none") < b->at("none"); });
  nlohmann::json curves;
  for (const auto& arm : spec.filters) {
    nlohmann::json series = nlohmann::json::array();
    for (auto* cell : ordered) {
      auto it = cell->find(arm);
      series.push_back(it == cell->end() ? nlohmann::json() : nlohmann::json(it->second));
    }
    curves[arm] = series;
  }
  j["compliance_sorted_by_none"] = curves;
  j["failure_list"] = summary.failures;
  return j;
}

SweepSpec sweep_from_json(const nlohmann::json& j) {
  SweepSpec spec;
  spec.name = j.value("name", "sweep");
  spec.grid.nelx = j.at("grid").at("nelx").get<int>();
  spec.grid.nely = j.at("grid").at("nely").get<int>();
  spec.grid.validate();

  // reuse the problem-schema support/passive parsing via a stub problem
  nlohmann::json stub;
  stub["grid"] = j.at("grid");
  stub["supports"] = j.at("supports");
  if (j.contains("passive")) stub["passive"] = j.at("passive");
  stub["loads"] = nlohmann::json::array(
      {{{"x", j.at("load_positions").at(0).at("x")}, {"y", j.at("load_positions").at(0).at("y")},
        {"dof", "y"}, {"value", -1.0}}});
  if (j.contains("material")) stub["material"] = j.at("material");
  const ProblemSpec stub_problem = problem_from_json(stub);
  spec.supports.fixed_dofs = stub_problem.bc.fixed_dofs;
  spec.passive = stub_problem.passive;
  spec.material = stub_problem.material;

  for (const auto& lp : j.at("load_positions"))
    spec.load_positions.push_back({lp.at("x").get<int>(), lp.at("y").get<int>()});
  if (j.contains("load_dof"))
    spec.load_dof = j.at("load_dof").get<std::string>() == "x" ? 0 : 1;
  spec.load_value = j.value("load_value", -1.0);
  spec.volume_fractions = j.at("volume_fractions").get<std::vector<double>>();
  spec.filters = j.at("filters").get<std::vector<std::string>>();
  spec.seeds_per_cell = j.value("seeds", 3);
  spec.master_seed = j.value("master_seed", 0ull);
  spec.epochs = j.value("epochs", 400);
  spec.kernels = j.value("kernels", 128);
  spec.learning_rate = j.value("learning_rate", 0.002);
  spec.alpha0 = j.value("alpha0", 1.0);
  spec.alpha_max = j.value("alpha_max", 100.0);
  spec.alpha_increment = j.value("alpha_increment", 0.25);
  if (j.contains("simp")) {
    const auto& s = j.at("simp");
    spec.simp.rmin = s.value("rmin", spec.simp.rmin);
    spec.simp.move = s.value("move", spec.simp.move);
    spec.simp.max_iters = s.value("max_iters", spec.simp.max_iters);
    spec.simp.change_tol = s.value("change_tol", spec.simp.change_tol);
  }
  spec.validate();
  return spec;
}

SweepSpec load_sweep(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot open sweep spec: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParameterError("bad JSON in " + path + ": " + e.what());
  }
  try {
    return sweep_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw ParameterError("bad sweep spec " + path + ": " + e.what());
  }
}

}  // namespace topofield
