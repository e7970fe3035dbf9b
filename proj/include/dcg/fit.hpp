#pragma once

#include <Eigen/Dense>
#include <functional>

namespace dcg {

// Residual function: params -> vector of residuals (model - data).
using ResidualFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

struct LmOptions {
  int max_iters = 300;
  double lambda0 = 1e-3;
  double ftol = 1e-10;   // relative SSR improvement
  double gtol = 1e-12;   // gradient max-norm
  double fd_step = 1e-6; // relative finite-difference step for the Jacobian
  Eigen::VectorXd lower;  // optional box bounds (empty = unbounded)
  Eigen::VectorXd upper;
};

struct LmResult {
  Eigen::VectorXd params;
  Eigen::MatrixXd covariance;
  double residual_rms = 0.0;
  bool converged = false;
  int iterations = 0;
};

// Damped Gauss-Newton with numerical Jacobians and optional box projection.
LmResult levenberg_marquardt(const ResidualFn& residuals, Eigen::VectorXd initial,
                             const LmOptions& options = {});

}  // namespace dcg
