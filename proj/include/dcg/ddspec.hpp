#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "dcg/fit.hpp"
#include "dcg/model.hpp"

namespace dcg {

// CPMG timing tau/2 - pi - tau - ... - pi - tau/2 with ideal instantaneous
// pi pulses about x; n_pulses must be even.
struct DDSequence {
  int n_pulses = 32;
  double tau_us = 0.0;
};

// manifold_sign selects the electron manifold the DD runs on: +1 for {0,+1}
// (spectroscopy default), -1 for {0,-1} (the gate manifold).
struct ConditionalFrequencies {
  double omega0_khz;  // bare Larmor, signed
  double omega1_khz;  // conditioned frequency, >= 0
  double dot;         // n0 . n1
};
ConditionalFrequencies conditional_frequencies(const CarbonSpin& spin, double omega_c_khz,
                                               int manifold_sign = +1);

// Analytic coherence under DD; equals dd_coherence_oracle everywhere.
double dd_coherence_analytic(const CarbonSpin& spin, const DDSequence& seq, double omega_c_khz,
                             int manifold_sign = +1);

// Brute-force conditioned two-level simulation: electron in (|0>+|1>)/sqrt(2),
// nuclear spin maximally mixed; returns the signed in-phase coherence.
double dd_coherence_oracle(const CarbonSpin& spin, const DDSequence& seq, double omega_c_khz,
                           int manifold_sign = +1);

// Joint oracle over several nuclear spins (no carbon-carbon coupling).
double multi_spin_coherence_oracle(std::span<const CarbonSpin> spins, const DDSequence& seq,
                                   double omega_c_khz, int manifold_sign = +1);

// tau_k = (2k-1) pi / ((w0 + w1)/2), in us.
double resonance_interval_us(const CarbonSpin& spin, double omega_c_khz, int k,
                             int manifold_sign = +1);

// Product of single-spin analytic coherences (independent-spin approximation).
double multi_spin_coherence(std::span<const CarbonSpin> spins, const DDSequence& seq,
                            double omega_c_khz, int manifold_sign = +1);

struct CarbonFitResult {
  double a_zz_khz = 0.0;
  double a_perp_khz = 0.0;
  Eigen::Matrix2d covariance = Eigen::Matrix2d::Zero();
  double residual_rms = 0.0;
  bool converged = false;
};

// Nonlinear least squares of the DD coherence over (a_zz, a_perp).
// k_orders seeds the multi-start grid when the initial guess stalls.
CarbonFitResult fit_carbon_dip(std::span<const std::pair<double, double>> tau_coherence_us,
                               int n_pulses, double omega_c_khz,
                               std::pair<double, double> initial_guess_khz,
                               std::span<const int> k_orders = {}, int manifold_sign = +1);

struct RamseyFit {
  double delta_f_mhz = 0.0;
  double t2_star_us = 0.0;
  double p = 2.0;
  double amplitude = 0.0;
  double phase_rad = 0.0;
  double offset = 0.0;
  bool converged = false;
};

// a cos(2 pi (delta f) t + phi0) exp(-(t/T2*)^p) + b over (t_us, signal).
RamseyFit fit_ramsey(std::span<const std::pair<double, double>> data, bool fix_p2 = false);

// One-parameter fit of exp(-(2 pi sigma t)^2 / 2) over (t_us, coherence).
double fit_static_sigma(std::span<const std::pair<double, double>> data);

}  // namespace dcg
