#include "dcg/relax.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

#include "dcg/fit.hpp"
#include "dcg/qcore.hpp"

namespace dcg {

namespace {

// sinh(x)/x, accurate through x = 0.
double sinhc(double x) {
  if (std::abs(x) < 1e-4) return 1.0 + x * x / 6.0;
  return std::sinh(x) / x;
}

}  // namespace

Eigen::Matrix3d RateMatrix::matrix() const {
  validate();
  Eigen::Matrix3d g;
  g << -(gamma_p1 + gamma_2), gamma_p1, gamma_2,
       gamma_p1, -(gamma_p1 + gamma_m1), gamma_m1,
       gamma_2, gamma_m1, -(gamma_m1 + gamma_2);
  return g;
}

void RateMatrix::validate() const {
  if (gamma_p1 < 0.0 || gamma_m1 < 0.0 || gamma_2 < 0.0)
    throw std::invalid_argument("RateMatrix: rates must be non-negative");
}

Eigen::Vector3d analytic_populations(const RateMatrix& rates, double t_ms, int initial) {
  if (t_ms < 0.0) throw std::invalid_argument("analytic_populations: t must be >= 0");
  if (initial < 0 || initial > 2) throw std::invalid_argument("analytic_populations: bad state");
  const Eigen::Matrix3d g = rates.matrix();
  const double sum = rates.gamma_p1 + rates.gamma_m1 + rates.gamma_2;
  const double x0 = std::sqrt(std::max(
      0.0, rates.gamma_p1 * rates.gamma_p1 + rates.gamma_m1 * rates.gamma_m1 +
               rates.gamma_2 * rates.gamma_2 - rates.gamma_p1 * rates.gamma_m1 -
               rates.gamma_p1 * rates.gamma_2 - rates.gamma_m1 * rates.gamma_2));
  const double t = t_ms * 1e-3;  // rates are 1/s

  // Spectral form: eigenvalues {0, -sum +- x0}; P1 projects on equilibrium,
  // B = Gamma + sum (I - P1) satisfies B^2 = x0^2 (I - P1), so
  // exp(Gamma t) = P1 + e^{-sum t} [cosh(x0 t)(I - P1) + t sinhc(x0 t) B].
  const Eigen::Matrix3d p1 = Eigen::Matrix3d::Constant(1.0 / 3.0);
  const Eigen::Matrix3d q = Eigen::Matrix3d::Identity() - p1;
  const Eigen::Matrix3d b = g + sum * q;
  Eigen::Vector3d p0 = Eigen::Vector3d::Zero();
  p0[initial] = 1.0;
  return p1 * p0 + std::exp(-sum * t) * (std::cosh(x0 * t) * (q * p0) +
                                         t * sinhc(x0 * t) * (b * p0));
}

RateFitResult fit_rate_matrix(std::span<const PopulationCurve> curves) {
  std::set<std::pair<int, int>> combos;
  std::size_t n_points = 0;
  for (const auto& c : curves) {
    if (c.initial < 0 || c.initial > 2 || c.readout < 0 || c.readout > 2)
      throw std::invalid_argument("fit_rate_matrix: bad state index");
    combos.insert({c.initial, c.readout});
    n_points += c.points.size();
  }
  if (combos.size() != 9)
    throw std::invalid_argument("fit_rate_matrix: need all nine init/readout combinations");

  const auto residuals = [&](const Eigen::VectorXd& q) {
    RateMatrix r{q[0], q[1], q[2]};
    Eigen::VectorXd res(static_cast<Eigen::Index>(n_points));
    Eigen::Index i = 0;
    for (const auto& c : curves)
      for (const auto& [t, y] : c.points)
        res[i++] = analytic_populations(r, t, c.initial)[c.readout] - y;
    return res;
  };
  Eigen::VectorXd q0(3);
  q0 << 100.0, 100.0, 100.0;
  LmOptions opt;
  opt.lower = Eigen::VectorXd::Constant(3, 0.0);
  opt.upper = Eigen::VectorXd::Constant(3, 1e6);
  const LmResult fit = levenberg_marquardt(residuals, q0, opt);

  RateFitResult out;
  out.rates = {fit.params[0], fit.params[1], fit.params[2]};
  out.covariance = fit.covariance;
  out.residual_rms = fit.residual_rms;
  out.converged = fit.converged;
  return out;
}

double t1_gate_error(const RateMatrix& rates, double t_gate_ns) {
  if (t_gate_ns <= 0.0) throw std::invalid_argument("t1_gate_error: t_gate must be positive");
  rates.validate();
  return ((rates.gamma_p1 + rates.gamma_2) / 2.0 + rates.gamma_m1) * t_gate_ns * 1e-9;
}

RabiInstabilityFit fit_rabi_instability(std::span<const std::pair<double, double>> data) {
  if (data.size() < 20) throw std::invalid_argument("fit_rabi_instability: need >= 20 points");
  double ymin = data[0].second, ymax = data[0].second, ysum = 0.0, tmax = 0.0;
  for (const auto& [t, y] : data) {
    ymin = std::min(ymin, y);
    ymax = std::max(ymax, y);
    ysum += y;
    tmax = std::max(tmax, t);
  }
  const double offset0 = ysum / static_cast<double>(data.size());
  int crossings = 0;
  for (std::size_t i = 1; i < data.size(); ++i)
    if ((data[i].second - offset0) * (data[i - 1].second - offset0) < 0.0) ++crossings;
  const double f0 = std::max(0.5 * crossings / std::max(tmax, 1e-9), 1e-3);

  // params: [f MHz, T2' us, a, phi, b]
  const auto residuals = [&](const Eigen::VectorXd& q) {
    Eigen::VectorXd r(static_cast<Eigen::Index>(data.size()));
    Eigen::Index i = 0;
    for (const auto& [t, y] : data) {
      const double env = std::exp(-(t / q[1]) * (t / q[1]));
      r[i++] = q[2] * std::cos(2.0 * kPi * q[0] * t + q[3]) * env + q[4] - y;
    }
    return r;
  };
  Eigen::VectorXd q0(5);
  q0 << f0, tmax, 0.5 * (ymax - ymin), 0.0, offset0;
  LmOptions opt;
  opt.lower = Eigen::VectorXd(5);
  opt.upper = Eigen::VectorXd(5);
  opt.lower << 0.0, 1e-3, -1e3, -kPi, -1e3;
  opt.upper << 1e3, 1e6, 1e3, kPi, 1e3;
  const LmResult fit = levenberg_marquardt(residuals, q0, opt);

  RabiInstabilityFit out;
  out.f_rabi_mhz = fit.params[0];
  out.t2_prime_us = fit.params[1];
  out.amplitude = fit.params[2];
  out.phase_rad = fit.params[3];
  out.offset = fit.params[4];
  out.converged = fit.converged;
  // cos(2 pi f (1+g) t) averaged over g ~ N(0, s^2) decays as
  // e^{-(2 pi f s t)^2 / 2}, so matching e^{-(t/T2')^2} gives
  // s = sqrt(2)/(2 pi f T2') = 1/(sqrt(2) pi f T2').
  out.rel_sigma = 1.0 / (std::sqrt(2.0) * kPi * out.f_rabi_mhz * out.t2_prime_us);
  return out;
}

}  // namespace dcg
