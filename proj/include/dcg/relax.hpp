#pragma once

#include <array>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace dcg {

// Longitudinal rates between the m_S = {+1, 0, -1} levels, 1/s.
struct RateMatrix {
  double gamma_p1 = 0.0;  // +1 <-> 0
  double gamma_m1 = 0.0;  // 0 <-> -1
  double gamma_2 = 0.0;   // +1 <-> -1

  // Symmetric generator with zero column sums, population order (+1, 0, -1).
  Eigen::Matrix3d matrix() const;
  void validate() const;  // rates >= 0
};

// Closed-form exp(Gamma t) p0 via spectral projectors; t in ms, rates in 1/s.
// initial/readout index: 0 -> m_S = +1, 1 -> 0, 2 -> -1.
Eigen::Vector3d analytic_populations(const RateMatrix& rates, double t_ms, int initial);

struct PopulationCurve {
  int initial = 0;
  int readout = 0;
  std::vector<std::pair<double, double>> points;  // (t_ms, population)
};

struct RateFitResult {
  RateMatrix rates;
  Eigen::Matrix3d covariance = Eigen::Matrix3d::Zero();
  double residual_rms = 0.0;
  bool converged = false;
};

// Joint least squares of the three rates over all nine init/readout curves.
RateFitResult fit_rate_matrix(std::span<const PopulationCurve> curves);

// ((gamma_p1 + gamma_2)/2 + gamma_m1) * T_gate.
double t1_gate_error(const RateMatrix& rates, double t_gate_ns);

struct RabiInstabilityFit {
  double rel_sigma = 0.0;   // relative amplitude spread
  double t2_prime_us = 0.0; // Gaussian decay constant
  double f_rabi_mhz = 0.0;
  double amplitude = 0.0;
  double phase_rad = 0.0;
  double offset = 0.0;
  bool converged = false;
};

// a cos(2 pi f t + phi0) exp(-(t/T2')^2) + b over (t_us, signal);
// rel_sigma = 1/(sqrt(2) pi f T2') from the Gaussian-amplitude dephasing law.
RabiInstabilityFit fit_rabi_instability(std::span<const std::pair<double, double>> data);

}  // namespace dcg
