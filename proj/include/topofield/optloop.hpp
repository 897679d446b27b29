#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "topofield/condfield.hpp"
#include "topofield/grid.hpp"
#include "topofield/neuralfield.hpp"
#include "topofield/problem.hpp"

namespace topofield {

struct OptimizationConfig {
  double v_star = 0.3;
  int epochs = 1000;
  FilterKind filter = FilterKind::none;
  std::uint64_t seed = 0;
  double alpha0 = 1.0;
  double alpha_max = 100.0;
  double alpha_increment = 0.25;
  double learning_rate = 0.002;
  int kernels = 128;

  void validate() const;
};

// Current values of the loss L = c/c0 + alpha (rho_bar/V* - 1)^2.
struct LossTerms {
  double c = 0.0;
  double c0 = 1.0;
  double rho_bar = 0.0;
  double alpha = 0.0;
  double v_star = 0.3;
};

struct HistoryRecord {
  int epoch = 0;
  double compliance = 0.0;
  double vol_frac = 0.0;
  double loss = 0.0;
  double alpha = 0.0;
};

struct ConvergenceHistory {
  std::vector<HistoryRecord> records;
  DensityField final_density;
  double wall_time_seconds = 0.0;
  std::string error;  // non-empty: run aborted, records hold the partial history

  bool ok() const { return error.empty(); }
};

// One FE solve on the uniform rho = V* domain (passive elements at the void
// floor): returns the reference compliance c0 and the raw strain-energy field
// that the conditioning filters consume.
std::pair<double, std::vector<double>> initial_reference(const ProblemSpec& problem);

// alpha = min(alpha_max, alpha0 + increment * epoch).
double alpha_at(int epoch, const OptimizationConfig& config);

double loss_value(const LossTerms& terms);

// dL/drho_e = dc/drho_e / c0 + alpha 2 (rho_bar/V* - 1) / (V* n_active)
// on active elements; zero on passive ones.
std::vector<double> loss_density_gradient(const LossTerms& terms, std::span<const double> dc_drho,
                                          const PassiveMask& passive);

// Network inputs at element centers, element-index order. e column comes from
// the conditioning field (zero when the filter is none).
NetworkInput build_inputs(const GridDomain& grid, const ConditioningField& cond);

struct OptimizationRun {
  ConvergenceHistory history;
  NetworkParams params;
  ConditioningField conditioning;
  double c0 = 0.0;
};

// The online training loop: per epoch, forward at element centers, passive
// override, FE solve, loss of compliance + volume penalty, analytic backprop
// through the density, Adam step. FE/numeric failures abort with the partial
// history preserved in the result.
OptimizationRun run_optimization(const ProblemSpec& problem, const OptimizationConfig& config);

// Densities on a raster, row-major with the top row first (image order).
struct Raster {
  int width = 0;
  int height = 0;
  std::vector<double> values;

  double at(int col, int row) const {
    return values[static_cast<std::size_t>(row) * static_cast<std::size_t>(width) +
                  static_cast<std::size_t>(col)];
  }
};

// Evaluates the network at factor^2 sub-cell centers per element,
// interpolating the conditioning field bilinearly; passive elements render at
// the void floor. factor = 1 reproduces the training-time density field.
Raster render_density(const NetworkParams& params, const ProblemSpec& problem,
                      const ConditioningField& cond, int upsample_factor);

// Convenience overload recomputing the conditioning field from the problem.
Raster render_density(const NetworkParams& params, const ProblemSpec& problem, FilterKind filter,
                      int upsample_factor);

// void floor used for passive overrides and SIMP density clamping
inline constexpr double kRhoMin = 1e-3;

}  // namespace topofield
