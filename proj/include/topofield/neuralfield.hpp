#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>

#include "topofield/grid.hpp"

namespace topofield {

// Density network T(X) = sigmoid(W sin(K X + 1)).
// K regulates sine frequencies; the constant 1 breaks rotation symmetry.
struct NetworkParams {
  Eigen::MatrixXd K;  // h x 3 frequency kernels
  Eigen::VectorXd W;  // h weights

  int kernel_count() const { return static_cast<int>(W.size()); }
};

// Batch of input rows (x, y, e): normalized coordinates plus conditioning
// value. e is identically zero when conditioning is disabled.
struct NetworkInput {
  Eigen::MatrixXd rows;  // n x 3

  int batch_size() const { return static_cast<int>(rows.rows()); }
  void validate() const;
};

struct NetworkGradients {
  Eigen::MatrixXd dK;
  Eigen::VectorXd dW;
};

struct AdamConfig {
  double lr = 0.002;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-7;
};

struct AdamState {
  Eigen::MatrixXd mK, vK;
  Eigen::VectorXd mW, vW;
  long t = 0;
  AdamConfig cfg;

  static AdamState zeros(const NetworkParams& params, const AdamConfig& cfg);
};

// K ~ uniform [-25, 25] from a seeded deterministic generator, W = 0.
// At init the network therefore outputs exactly 0.5 everywhere.
NetworkParams init_params(int kernel_count, std::uint64_t seed);

DensityField forward(const NetworkParams& params, const NetworkInput& input);

// Analytic gradients, accumulated over the batch in fixed row order:
//   dW_j = sum_i g_i sin(K_j.X_i + 1)
//   dK_j = sum_i g_i W_j cos(K_j.X_i + 1) X_i,   g_i = dL/drho_i rho_i (1 - rho_i)
NetworkGradients backward(const NetworkParams& params, const NetworkInput& input,
                          std::span<const double> dL_drho);

// Standard bias-corrected Adam update over K and W jointly (in place).
void adam_step(NetworkParams& params, const NetworkGradients& grads, AdamState& state);

// Checkpoint blob: first line h, then h rows of K (3 comma-separated values),
// then h lines of W. Full double precision, exact round trip.
void save_checkpoint(std::ostream& out, const NetworkParams& params);
void save_checkpoint(const std::string& path, const NetworkParams& params);
NetworkParams load_checkpoint(std::istream& in);
NetworkParams load_checkpoint(const std::string& path);

}  // namespace topofield
