#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dcg/model.hpp"
#include "dcg/noise.hpp"
#include "dcg/qcore.hpp"

namespace dcg {

struct PulsePiece {
  double duration_ns = 0.0;
  double omega_r_khz = 0.0;
  double omega_i_khz = 0.0;
};

struct PulseWaveform {
  std::vector<PulsePiece> pieces;
  std::string label;

  double total_ns() const;
  void validate() const;  // throws on nonpositive durations or empty pulse
};

// Rectangular pi rotation of duration sqrt(3)/(2 A) at |Omega| = 1/(2 t): the
// detuned m_I = +1 block closes exactly one cycle while m_I = 0 flips.  The
// drive sign is fixed to -x so the resonant block lands on -i sigma_x = -sigma_x
// up to the shift phase, which composes with the detuned block's -1 to the CNOT.
PulseWaveform primitive_pulse(double a_par_eff_khz);

// Time-ordered propagator of interaction + control + classical noise over the
// pulse, sub-stepping each piece to <= max_substep_ns with the oscillating
// noise coefficient frozen at each sub-step midpoint.  omega_sh is taken from
// the pulse's own total duration.  noise_omega_khz defaults to the 13C Larmor
// frequency; scans override it.
Matrix pulse_propagator(const PulseWaveform& pulse, const NoiseSample& sample,
                        const SystemConstants& sys, double max_substep_ns = 10.0,
                        std::optional<double> noise_omega_khz = {});

// (1/M) sum_i |Tr(target^dag U_i)/4|^2 over noise samples; target defaults to
// the CNOT when empty.
double evaluate_sampled_fidelity(const PulseWaveform& pulse, std::span<const NoiseSample> samples,
                                 const SystemConstants& sys, const Matrix& target = {});

// Exact gradient of evaluate_sampled_fidelity w.r.t. (omega_r, omega_i) of
// each piece, per kHz; eigenbasis divided-difference derivative of each
// sub-step propagator with forward/backward caching.
std::vector<std::pair<double, double>> fidelity_gradient(const PulseWaveform& pulse,
                                                         std::span<const NoiseSample> samples,
                                                         const SystemConstants& sys,
                                                         const Matrix& target = {});

struct GrapeConfig {
  int pieces = 30;
  double piece_ns = 50.0;
  std::vector<NoiseSample> grid;      // sample set averaged by the objective
  double max_amplitude_khz = 10000.0; // cap on |Omega| per piece
  // Relative drive-amplitude scales averaged by the objective; {1.0} optimizes
  // the nominal pulse only, e.g. {0.975, 1.0, 1.025} adds amplitude robustness.
  std::vector<double> amplitude_scales = {1.0};
  double step_init = 1e4;             // initial ascent step (kHz^2 per unit gradient)
  int max_iters = 2000;
  double target_infidelity = 1e-3;
  unsigned long long seed = 1;
  Matrix target;  // empty -> CNOT
};

struct GrapeResult {
  PulseWaveform pulse;
  std::vector<double> objective_trace;  // monotone non-decreasing
  double final_infidelity = 1.0;
  int iterations = 0;
  bool converged = false;
};

GrapeResult grape_optimize(const GrapeConfig& cfg, const SystemConstants& sys);

// Monte Carlo mean infidelity vs noise frequency; x, y ~ N(0, sigma^2) per
// sample, z = 0, identical draws reused across frequencies for a given seed.
std::vector<std::pair<double, double>> scan_noise_frequency(const PulseWaveform& pulse,
                                                            std::span<const double> omegas_khz,
                                                            double sigma_khz, int n_samples,
                                                            unsigned long long seed,
                                                            const SystemConstants& sys,
                                                            const Matrix& target = {});

// First-order dephasing filter function F1(w) = w^2/d * ||I(w)||_F^2 with
// I(w) = int_0^T e^{iwt} Uc^dag(t) Sz Uc(t) dt (exact per piece).
double filter_function_first_order(const PulseWaveform& pulse, double omega_khz,
                                   const SystemConstants& sys);

// Series estimate sigma^2/d * ||I(w)||_F^2 of the mean infidelity under
// x cos(wt) + y sin(wt) noise with x, y ~ N(0, sigma^2).
double first_order_infidelity(const PulseWaveform& pulse, double omega_khz, double sigma_khz,
                              const SystemConstants& sys);

enum class OpBranch { kNot, kIdentity };

struct QuantumBathReport {
  double fidelity = 0.0;
  std::vector<std::pair<double, double>> purity_trace;  // (t_ns, system purity)
};

// Joint evolution with <= 6 quantum 13C spins: electron (|0>+|1>)/sqrt(2),
// nucleus in the branch subspace, bath maximally mixed.  Fidelity compares the
// final joint unitary, pulled into each spin's Larmor interaction picture,
// against CNOT (x) identity.
QuantumBathReport evaluate_quantum_bath(const PulseWaveform& pulse,
                                        std::span<const CarbonSpin> spins,
                                        const SystemConstants& sys, OpBranch branch);

struct FullModelReport {
  double infidelity = 0.0;   // combined RWA + leakage CNOT error
  double leakage = 0.0;      // mean population left outside the 4-level subspace
};

// Nine-level lab-frame evaluation in the dressed interaction picture with
// exact per-step oscillatory integrals (first-order Magnus); dt_ns controls
// the Magnus step.
FullModelReport evaluate_full_model(const PulseWaveform& pulse, const SystemConstants& sys,
                                    double dt_ns = 0.05);

// Mean infidelity under a common Gaussian amplitude scale (1+g), g ~ N(0, rel_sigma^2).
double amplitude_instability_error(const PulseWaveform& pulse, double rel_sigma, int n_samples,
                                   unsigned long long seed, const SystemConstants& sys,
                                   const Matrix& target = {});

// First-order low-pass response of the waveform, resampled onto sub-pieces of
// at most time_constant/10 ns (value = exact interval average); 0 is identity.
PulseWaveform apply_distortion(const PulseWaveform& pulse, double time_constant_ns);

}  // namespace dcg
