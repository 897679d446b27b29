#pragma once

#include <span>
#include <vector>

#include "topofield/grid.hpp"
#include "topofield/optloop.hpp"
#include "topofield/problem.hpp"

namespace topofield {

// Classic density-based SIMP comparator: optimality criteria with the
// convolution sensitivity filter, as in the published 88-line code.
struct SIMPConfig {
  double rmin = 1.5;       // filter radius in element units
  double move = 0.2;       // OC move limit
  double eta = 0.5;        // OC damping exponent
  int max_iters = 400;
  double change_tol = 0.01;

  void validate() const;
};

// dc_hat_e = sum_i w_ei rho_i dc_i / (rho_e sum_i w_ei), w_ei = max(0, rmin - dist(e, i)).
std::vector<double> sensitivity_filter(std::span<const double> dc, const DensityField& rho,
                                       double rmin, const GridDomain& grid);

// Multiplicative OC update with move limits; bisects the Lagrange multiplier
// until |rho_bar - v_star| <= 1e-6 (over active elements). Densities are
// clipped to [1e-3, 1]; passive elements stay at the void floor.
DensityField oc_update(const DensityField& rho, std::span<const double> dc_filtered, double v_star,
                       const SIMPConfig& cfg, const PassiveMask& passive = {});

// Iterates solve -> sensitivities -> filter -> OC until the max density
// change drops below change_tol or max_iters is reached. History rows are
// column-compatible with the neural loop (loss = c/c0, alpha = 0).
ConvergenceHistory run_simp(const ProblemSpec& problem, const SIMPConfig& cfg);

}  // namespace topofield
