#include "topofield/neuralfield.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "topofield/errors.hpp"
#include "topofield/rng.hpp"

namespace topofield {

namespace {
constexpr double kKernelInitRange = 25.0;  // K ~ U[-25, 25]

double sigmoid(double s) { return 1.0 / (1.0 + std::exp(-s)); }
}  // namespace

void NetworkInput::validate() const {
  if (rows.cols() != 3) throw ParameterError("network input must have 3 columns (x, y, e)");
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    const double x = rows(i, 0), y = rows(i, 1), e = rows(i, 2);
    if (!(x >= -0.5 && x <= 0.5) || !(y >= -0.5 && y <= 0.5))
      throw ParameterError("network input coordinates outside [-0.5, 0.5]");
    if (!(e >= 0.0 && e <= 0.4))
      throw ParameterError("network input conditioning value outside [0, 0.4]");
  }
}

AdamState AdamState::zeros(const NetworkParams& params, const AdamConfig& cfg) {
  AdamState st;
  st.mK = Eigen::MatrixXd::Zero(params.K.rows(), params.K.cols());
  st.vK = Eigen::MatrixXd::Zero(params.K.rows(), params.K.cols());
  st.mW = Eigen::VectorXd::Zero(params.W.size());
  st.vW = Eigen::VectorXd::Zero(params.W.size());
  st.cfg = cfg;
  return st;
}

NetworkParams init_params(int kernel_count, std::uint64_t seed) {
  if (kernel_count < 1) throw ParameterError("init_params: kernel count must be >= 1");
  NetworkParams params;
  params.K.resize(kernel_count, 3);
  params.W = Eigen::VectorXd::Zero(kernel_count);
  Rng rng(seed);
  for (int j = 0; j < kernel_count; ++j)
    for (int c = 0; c < 3; ++c) params.K(j, c) = rng.uniform(-kKernelInitRange, kKernelInitRange);
  return params;
}

DensityField forward(const NetworkParams& params, const NetworkInput& input) {
  const int n = input.batch_size();
  const int h = params.kernel_count();
  if (input.rows.cols() != 3) throw ParameterError("forward: input must have 3 columns");
  DensityField rho;
  rho.values.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double x = input.rows(i, 0), y = input.rows(i, 1), e = input.rows(i, 2);
    double s = 0.0;
    for (int j = 0; j < h; ++j) {
      const double a = params.K(j, 0) * x + params.K(j, 1) * y + params.K(j, 2) * e + 1.0;
      s += params.W[j] * std::sin(a);
    }
    const double r = sigmoid(s);
    if (!std::isfinite(r)) throw NumericError("forward: non-finite density");
    rho.values[static_cast<std::size_t>(i)] = r;
  }
  return rho;
}

NetworkGradients backward(const NetworkParams& params, const NetworkInput& input,
                          std::span<const double> dL_drho) {
  const int n = input.batch_size();
  const int h = params.kernel_count();
  if (input.rows.cols() != 3) throw ParameterError("backward: input must have 3 columns");
  if (static_cast<int>(dL_drho.size()) != n)
    throw ParameterError("backward: upstream gradient length does not match batch");

  NetworkGradients grads;
  grads.dK = Eigen::MatrixXd::Zero(h, 3);
  grads.dW = Eigen::VectorXd::Zero(h);
  for (int i = 0; i < n; ++i) {
    const double x = input.rows(i, 0), y = input.rows(i, 1), e = input.rows(i, 2);
    double s = 0.0;
    for (int j = 0; j < h; ++j) {
      const double a = params.K(j, 0) * x + params.K(j, 1) * y + params.K(j, 2) * e + 1.0;
      s += params.W[j] * std::sin(a);
    }
    const double rho = sigmoid(s);
    const double g = dL_drho[static_cast<std::size_t>(i)] * rho * (1.0 - rho);
    if (g == 0.0) continue;
    for (int j = 0; j < h; ++j) {
      const double a = params.K(j, 0) * x + params.K(j, 1) * y + params.K(j, 2) * e + 1.0;
      grads.dW[j] += g * std::sin(a);
      const double gc = g * params.W[j] * std::cos(a);
      grads.dK(j, 0) += gc * x;
      grads.dK(j, 1) += gc * y;
      grads.dK(j, 2) += gc * e;
    }
  }
  return grads;
}

void adam_step(NetworkParams& params, const NetworkGradients& grads, AdamState& state) {
  if (grads.dK.rows() != params.K.rows() || grads.dW.size() != params.W.size() ||
      state.mK.rows() != params.K.rows() || state.mW.size() != params.W.size())
    throw ParameterError("adam_step: shape mismatch");
  const AdamConfig& c = state.cfg;
  state.t += 1;
  const double bc1 = 1.0 - std::pow(c.beta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(c.beta2, static_cast<double>(state.t));

  auto update = [&](double& theta, double g, double& m, double& v) {
    m = c.beta1 * m + (1.0 - c.beta1) * g;
    v = c.beta2 * v + (1.0 - c.beta2) * g * g;
    theta -= c.lr * (m / bc1) / (std::sqrt(v / bc2) + c.eps);
  };
  for (Eigen::Index j = 0; j < params.K.rows(); ++j)
    for (Eigen::Index k = 0; k < 3; ++k)
      update(params.K(j, k), grads.dK(j, k), state.mK(j, k), state.vK(j, k));
  for (Eigen::Index j = 0; j < params.W.size(); ++j)
    update(params.W[j], grads.dW[j], state.mW[j], state.vW[j]);
}

void save_checkpoint(std::ostream& out, const NetworkParams& params) {
  const int h = params.kernel_count();
  out << h << "\n";
  out.precision(17);
  for (int j = 0; j < h; ++j)
    out << params.K(j, 0) << "," << params.K(j, 1) << "," << params.K(j, 2) << "\n";
  for (int j = 0; j < h; ++j) out << params.W[j] << "\n";
}

void save_checkpoint(const std::string& path, const NetworkParams& params) {
  std::ofstream out(path);
  if (!out) throw ParameterError("cannot open checkpoint file for writing: " + path);
  save_checkpoint(out, params);
}

NetworkParams load_checkpoint(std::istream& in) {
  int h = 0;
  if (!(in >> h) || h < 1) throw ParameterError("checkpoint: bad kernel count");
  NetworkParams params;
  params.K.resize(h, 3);
  params.W.resize(h);
  std::string line;
  std::getline(in, line);  // rest of the count line
  for (int j = 0; j < h; ++j) {
    if (!std::getline(in, line)) throw ParameterError("checkpoint: truncated K block");
    std::istringstream row(line);
    char comma = 0;
    if (!(row >> params.K(j, 0) >> comma >> params.K(j, 1) >> comma >> params.K(j, 2)))
      throw ParameterError("checkpoint: malformed K row");
  }
  for (int j = 0; j < h; ++j) {
    if (!std::getline(in, line)) throw ParameterError("checkpoint: truncated W block");
    std::istringstream row(line);
    if (!(row >> params.W[j])) throw ParameterError("checkpoint: malformed W row");
  }
  return params;
}

NetworkParams load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot open checkpoint file: " + path);
  return load_checkpoint(in);
}

}  // namespace topofield
