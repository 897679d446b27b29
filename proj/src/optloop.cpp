#include "topofield/optloop.hpp"

#include <chrono>
#include <cmath>
#include <iostream>

#include "topofield/errors.hpp"
#include "topofield/fem.hpp"

namespace topofield {

void OptimizationConfig::validate() const {
  if (!(v_star > 0.0 && v_star < 1.0)) throw ParameterError("config: need 0 < v_star < 1");
  if (epochs < 1) throw ParameterError("config: epochs must be >= 1");
  if (kernels < 1) throw ParameterError("config: kernels must be >= 1");
  if (!(learning_rate > 0.0)) throw ParameterError("config: learning rate must be > 0");
  if (!(alpha0 >= 0.0) || !(alpha_max >= alpha0) || !(alpha_increment >= 0.0))
    throw ParameterError("config: bad alpha schedule");
}

std::pair<double, std::vector<double>> initial_reference(const ProblemSpec& problem) {
  const ProblemSpec p = problem.validated();
  DensityField rho = DensityField::uniform(p.grid.num_elements(), p.volume_fraction);
  for (int e = 0; e < rho.size(); ++e)
    if (p.passive.is_passive(e)) rho[e] = kRhoMin;
  FieldSolution sol = assemble_and_solve(p.grid, p.bc, rho, p.material);
  return {sol.compliance, sol.strain_energy};
}

double alpha_at(int epoch, const OptimizationConfig& config) {
  if (epoch < 0) throw ParameterError("alpha_at: epoch must be >= 0");
  return std::min(config.alpha_max, config.alpha0 + config.alpha_increment * epoch);
}

double loss_value(const LossTerms& terms) {
  if (!(terms.c0 > 0.0)) throw ParameterError("loss: c0 must be > 0");
  const double violation = terms.rho_bar / terms.v_star - 1.0;
  return terms.c / terms.c0 + terms.alpha * violation * violation;
}

std::vector<double> loss_density_gradient(const LossTerms& terms, std::span<const double> dc_drho,
                                          const PassiveMask& passive) {
  if (!(terms.c0 > 0.0)) throw ParameterError("loss gradient: c0 must be > 0");
  const int n = static_cast<int>(dc_drho.size());
  const int n_active = passive.active_count(n);
  const double violation = terms.rho_bar / terms.v_star - 1.0;
  const double vol_term = terms.alpha * 2.0 * violation / (terms.v_star * n_active);
  std::vector<double> grad(dc_drho.size(), 0.0);
  for (int e = 0; e < n; ++e) {
    if (passive.is_passive(e)) continue;
    grad[static_cast<std::size_t>(e)] = dc_drho[static_cast<std::size_t>(e)] / terms.c0 + vol_term;
  }
  return grad;
}

NetworkInput build_inputs(const GridDomain& grid, const ConditioningField& cond) {
  if (static_cast<int>(cond.values.size()) != grid.num_elements())
    throw ParameterError("build_inputs: conditioning field length does not match grid");
  NetworkInput input;
  input.rows.resize(grid.num_elements(), 3);
  for (int ex = 0; ex < grid.nelx; ++ex) {
    for (int ey = 0; ey < grid.nely; ++ey) {
      const int e = grid.element_index(ex, ey);
      input.rows(e, 0) = grid.normalized_x(ex + 0.5);
      input.rows(e, 1) = grid.normalized_y(ey + 0.5);
      input.rows(e, 2) = cond.values[static_cast<std::size_t>(e)];
    }
  }
  return input;
}

OptimizationRun run_optimization(const ProblemSpec& problem, const OptimizationConfig& config) {
  config.validate();
  const ProblemSpec p = problem.validated();
  const auto t_start = std::chrono::steady_clock::now();

  OptimizationRun run;
  auto [c0, raw_energy] = initial_reference(p);
  if (!(c0 > 0.0)) throw NumericError("initial compliance is not positive (missing loads?)");
  run.c0 = c0;
  run.conditioning = apply_filter(config.filter, raw_energy, config.v_star, p.grid);

  const NetworkInput input = build_inputs(p.grid, run.conditioning);
  run.params = init_params(config.kernels, config.seed);
  AdamState adam = AdamState::zeros(run.params, AdamConfig{.lr = config.learning_rate});
  FemSolver solver(p.grid, p.bc, p.material);

  const int n = p.grid.num_elements();
  ConvergenceHistory& hist = run.history;
  hist.records.reserve(static_cast<std::size_t>(config.epochs));

  auto clamp_passive = [&](DensityField& rho) {
    for (int e = 0; e < n; ++e)
      if (p.passive.is_passive(e)) rho[e] = kRhoMin;
  };

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    try {
      DensityField rho = forward(run.params, input);
      clamp_passive(rho);
      const FieldSolution sol = solver.solve(rho);

      LossTerms terms;
      terms.c = sol.compliance;
      terms.c0 = c0;
      terms.rho_bar = mean_density(rho, p.passive);
      terms.alpha = alpha_at(epoch, config);
      terms.v_star = config.v_star;
      const double L = loss_value(terms);
      if (!std::isfinite(L)) throw NumericError("loss is not finite");

      const std::vector<double> dc = compliance_sensitivity(sol, rho, p.material);
      const std::vector<double> dL_drho = loss_density_gradient(terms, dc, p.passive);
      const NetworkGradients grads = backward(run.params, input, dL_drho);
      adam_step(run.params, grads, adam);

      hist.records.push_back({epoch, sol.compliance, terms.rho_bar, L, terms.alpha});
      hist.final_density = std::move(rho);
    } catch (const std::exception& e) {
      hist.error = e.what();
      break;
    }
  }

  if (hist.ok()) {
    // The artifact is the network after the last update.
    DensityField rho = forward(run.params, input);
    clamp_passive(rho);
    hist.final_density = std::move(rho);
    const double rho_bar = mean_density(hist.final_density, p.passive);
    const double rel_err = std::abs(rho_bar - config.v_star) / config.v_star;
    if (rel_err > 0.01)
      std::cerr << "warning: final volume fraction " << rho_bar << " misses target "
                << config.v_star << " by " << rel_err * 100 << "%\n";
  }
  hist.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return run;
}

Raster render_density(const NetworkParams& params, const ProblemSpec& problem,
                      const ConditioningField& cond, int upsample_factor) {
  if (upsample_factor < 1) throw ParameterError("render: upsample factor must be >= 1");
  const ProblemSpec p = problem.validated();
  const GridDomain& g = p.grid;
  const int f = upsample_factor;

  Raster raster;
  raster.width = g.nelx * f;
  raster.height = g.nely * f;

  NetworkInput input;
  input.rows.resize(static_cast<Eigen::Index>(raster.width) * raster.height, 3);
  Eigen::Index row_out = 0;
  for (int py = raster.height - 1; py >= 0; --py) {  // top image row first
    for (int px = 0; px < raster.width; ++px, ++row_out) {
      const double gx = (px + 0.5) / f;  // grid units
      const double gy = (py + 0.5) / f;
      input.rows(row_out, 0) = g.normalized_x(gx);
      input.rows(row_out, 1) = g.normalized_y(gy);
      input.rows(row_out, 2) = sample_at_grid(cond, gx - 0.5, gy - 0.5);
    }
  }

  DensityField rho = forward(params, input);
  raster.values = std::move(rho.values);

  if (!p.passive.empty()) {
    std::size_t i = 0;
    for (int py = raster.height - 1; py >= 0; --py)
      for (int px = 0; px < raster.width; ++px, ++i)
        if (p.passive.is_passive(g.element_index(px / f, py / f))) raster.values[i] = kRhoMin;
  }
  return raster;
}

Raster render_density(const NetworkParams& params, const ProblemSpec& problem, FilterKind filter,
                      int upsample_factor) {
  const ProblemSpec p = problem.validated();
  ConditioningField cond;
  if (filter == FilterKind::none) {
    cond = ConditioningField::zeros(p.grid);
  } else {
    auto [c0, raw_energy] = initial_reference(p);
    (void)c0;
    cond = apply_filter(filter, raw_energy, p.volume_fraction, p.grid);
  }
  return render_density(params, p, cond, upsample_factor);
}

}  // namespace topofield
