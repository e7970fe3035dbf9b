#include "dcg/fit.hpp"

#include <cmath>
#include <stdexcept>

namespace dcg {

namespace {

Eigen::VectorXd project(Eigen::VectorXd p, const LmOptions& opt) {
  if (opt.lower.size() == p.size()) p = p.cwiseMax(opt.lower);
  if (opt.upper.size() == p.size()) p = p.cwiseMin(opt.upper);
  return p;
}

Eigen::MatrixXd numerical_jacobian(const ResidualFn& f, const Eigen::VectorXd& p,
                                   const Eigen::VectorXd& r0, double rel_step) {
  Eigen::MatrixXd jac(r0.size(), p.size());
  for (Eigen::Index j = 0; j < p.size(); ++j) {
    const double h = rel_step * std::max(1.0, std::abs(p(j)));
    Eigen::VectorXd pp = p, pm = p;
    pp(j) += h;
    pm(j) -= h;
    jac.col(j) = (f(pp) - f(pm)) / (2.0 * h);
  }
  return jac;
}

}  // namespace

LmResult levenberg_marquardt(const ResidualFn& residuals, Eigen::VectorXd initial,
                             const LmOptions& options) {
  LmResult out;
  Eigen::VectorXd p = project(std::move(initial), options);
  Eigen::VectorXd r = residuals(p);
  double ssr = r.squaredNorm();
  double lambda = options.lambda0;

  const Eigen::Index n = r.size(), k = p.size();
  if (n < k) throw std::invalid_argument("fewer residuals than parameters");

  Eigen::MatrixXd jac;
  for (int iter = 0; iter < options.max_iters; ++iter) {
    out.iterations = iter + 1;
    jac = numerical_jacobian(residuals, p, r, options.fd_step);
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const Eigen::VectorXd g = jac.transpose() * r;
    if (g.cwiseAbs().maxCoeff() < options.gtol) {
      out.converged = true;
      break;
    }
    bool stepped = false;
    for (int tries = 0; tries < 40; ++tries) {
      Eigen::MatrixXd a = jtj;
      a.diagonal() += lambda * jtj.diagonal().cwiseMax(1e-12);
      const Eigen::VectorXd step = a.ldlt().solve(-g);
      const Eigen::VectorXd cand = project(p + step, options);
      const Eigen::VectorXd rc = residuals(cand);
      const double ssr_c = rc.squaredNorm();
      if (std::isfinite(ssr_c) && ssr_c < ssr) {
        const double rel = (ssr - ssr_c) / std::max(ssr, 1e-300);
        p = cand;
        r = rc;
        ssr = ssr_c;
        lambda = std::max(lambda * 0.3, 1e-12);
        stepped = true;
        if (rel < options.ftol) out.converged = true;
        break;
      }
      lambda *= 8.0;
    }
    if (!stepped || out.converged) {
      out.converged = out.converged || stepped;
      if (!stepped && iter > 0) out.converged = true;  // stalled at a minimum
      break;
    }
  }

  out.params = p;
  out.residual_rms = std::sqrt(ssr / static_cast<double>(n));
  // covariance = s^2 (J^T J)^-1 with s^2 = SSR / dof
  jac = numerical_jacobian(residuals, p, r, options.fd_step);
  const double dof = static_cast<double>(n > k ? n - k : 1);
  Eigen::MatrixXd jtj = jac.transpose() * jac;
  out.covariance = jtj.completeOrthogonalDecomposition().pseudoInverse() * (ssr / dof);
  return out;
}

}  // namespace dcg
