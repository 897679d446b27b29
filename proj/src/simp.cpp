#include "topofield/simp.hpp"

#include <chrono>
#include <cmath>

#include "topofield/errors.hpp"
#include "topofield/fem.hpp"

namespace topofield {

void SIMPConfig::validate() const {
  if (!(rmin >= 1.0)) throw ParameterError("simp: rmin must be >= 1");
  if (!(move > 0.0 && move <= 1.0)) throw ParameterError("simp: move must be in (0, 1]");
  if (!(eta > 0.0)) throw ParameterError("simp: eta must be > 0");
  if (max_iters < 1) throw ParameterError("simp: max_iters must be >= 1");
}

std::vector<double> sensitivity_filter(std::span<const double> dc, const DensityField& rho,
                                       double rmin, const GridDomain& grid) {
  const int n = grid.num_elements();
  if (static_cast<int>(dc.size()) != n || rho.size() != n)
    throw ParameterError("sensitivity_filter: length mismatch");
  std::vector<double> filtered(dc.size());
  const int reach = static_cast<int>(std::ceil(rmin)) - 1;
  for (int ex = 0; ex < grid.nelx; ++ex) {
    for (int ey = 0; ey < grid.nely; ++ey) {
      const int e = grid.element_index(ex, ey);
      double weight_sum = 0.0, acc = 0.0;
      for (int ix = std::max(0, ex - reach); ix <= std::min(grid.nelx - 1, ex + reach); ++ix) {
        for (int iy = std::max(0, ey - reach); iy <= std::min(grid.nely - 1, ey + reach); ++iy) {
          const double dist = std::sqrt(static_cast<double>((ex - ix) * (ex - ix)) +
                                        static_cast<double>((ey - iy) * (ey - iy)));
          const double w = rmin - dist;
          if (w <= 0.0) continue;
          const int i = grid.element_index(ix, iy);
          weight_sum += w;
          acc += w * rho[i] * dc[static_cast<std::size_t>(i)];
        }
      }
      filtered[static_cast<std::size_t>(e)] = acc / (rho[e] * weight_sum);
    }
  }
  return filtered;
}

DensityField oc_update(const DensityField& rho, std::span<const double> dc_filtered, double v_star,
                       const SIMPConfig& cfg, const PassiveMask& passive) {
  const int n = rho.size();
  if (static_cast<int>(dc_filtered.size()) != n) throw ParameterError("oc_update: length mismatch");
  if (!(v_star > 0.0 && v_star <= 1.0)) throw ParameterError("oc_update: bad volume fraction");
  const int n_active = passive.active_count(n);

  auto updated = [&](double lambda, DensityField& out) {
    double sum = 0.0;
    for (int e = 0; e < n; ++e) {
      if (passive.is_passive(e)) {
        out[e] = kRhoMin;
        continue;
      }
      const double be = -dc_filtered[static_cast<std::size_t>(e)] / lambda;
      const double candidate = rho[e] * std::pow(std::max(be, 0.0), cfg.eta);
      double v = std::min(std::min(1.0, rho[e] + cfg.move), candidate);
      v = std::max(std::max(kRhoMin, rho[e] - cfg.move), v);
      out[e] = v;
      sum += v;
    }
    return sum / n_active;
  };

  DensityField out = rho;
  double lo = 0.0, hi = 1e9;
  for (int it = 0; it < 200; ++it) {
    const double lambda = 0.5 * (lo + hi);
    const double vol = updated(lambda, out);
    if (std::abs(vol - v_star) <= 1e-6) return out;
    if (vol > v_star)
      lo = lambda;
    else
      hi = lambda;
  }
  throw NumericError("oc_update: bisection did not reach the volume target");
}

ConvergenceHistory run_simp(const ProblemSpec& problem, const SIMPConfig& cfg) {
  cfg.validate();
  const ProblemSpec p = problem.validated();
  const auto t_start = std::chrono::steady_clock::now();
  const int n = p.grid.num_elements();

  DensityField rho = DensityField::uniform(n, p.volume_fraction);
  for (int e = 0; e < n; ++e)
    if (p.passive.is_passive(e)) rho[e] = kRhoMin;

  FemSolver solver(p.grid, p.bc, p.material);
  ConvergenceHistory hist;
  double c0 = 0.0;

  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    try {
      const FieldSolution sol = solver.solve(rho);
      if (iter == 0) c0 = sol.compliance;
      const std::vector<double> dc = compliance_sensitivity(sol, rho, p.material);
      const std::vector<double> dc_f = sensitivity_filter(dc, rho, cfg.rmin, p.grid);
      DensityField next = oc_update(rho, dc_f, p.volume_fraction, cfg, p.passive);

      double change = 0.0;
      for (int e = 0; e < n; ++e) change = std::max(change, std::abs(next[e] - rho[e]));

      hist.records.push_back({iter, sol.compliance, mean_density(rho, p.passive),
                              c0 > 0.0 ? sol.compliance / c0 : 0.0, 0.0});
      rho = std::move(next);
      hist.final_density = rho;
      if (change < cfg.change_tol) break;
    } catch (const std::exception& e) {
      hist.error = e.what();
      break;
    }
  }
  hist.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return hist;
}

}  // namespace topofield
