#include "doctest.h"

#include <cmath>
#include <vector>

#include "dcg/grape.hpp"
#include "dcg/noise.hpp"
#include "oracles.hpp"

using namespace dcg;

TEST_CASE("primitive pulse implements the CNOT at zero noise") {
  const SystemConstants sys;
  const PulseWaveform pulse = primitive_pulse(sys.a_par_eff_khz);
  CHECK(std::abs(pulse.total_ns() - 401.0) < 0.1);
  const std::vector<NoiseSample> zero = {{0.0, 0.0, 0.0}};
  const double f = evaluate_sampled_fidelity(pulse, zero, sys);
  CHECK(f >= 0.9999);
  const Matrix u = pulse_propagator(pulse, zero[0], sys);
  CHECK(is_unitary(u));
  CHECK(std::abs(u.determinant() - cd(-1.0, 0.0)) < 1e-9);
}

TEST_CASE("propagator determinant is -1 for any pulse shape") {
  Rng rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    PulseWaveform pulse;
    const int n = 2 + static_cast<int>(rng.uniform() * 8);
    for (int i = 0; i < n; ++i)
      pulse.pieces.push_back({20.0 + rng.uniform() * 300.0, (rng.uniform() - 0.5) * 4000.0,
                              (rng.uniform() - 0.5) * 4000.0});
    NoiseSample s{(rng.uniform() - 0.5) * 100.0, (rng.uniform() - 0.5) * 100.0,
                  (rng.uniform() - 0.5) * 100.0};
    const Matrix u = pulse_propagator(pulse, s, SystemConstants{});
    CHECK(std::abs(u.determinant() - cd(-1.0, 0.0)) < 1e-7);
  }
}

TEST_CASE("exact gradient matches central finite differences") {
  const SystemConstants sys;
  PulseWaveform pulse;
  Rng rng(17);
  for (int i = 0; i < 5; ++i)
    pulse.pieces.push_back(
        {100.0, (rng.uniform() - 0.5) * 2000.0, (rng.uniform() - 0.5) * 2000.0});
  const std::vector<NoiseSample> samples = {{0, 0, 0}, {50, -30, 20}, {-40, 60, -10}};
  const auto grad = fidelity_gradient(pulse, samples, sys);
  REQUIRE(grad.size() == pulse.pieces.size());
  const double h = 0.5;  // kHz
  double max_rel = 0.0;
  for (size_t i = 0; i < pulse.pieces.size(); ++i) {
    for (int q = 0; q < 2; ++q) {
      PulseWaveform up = pulse, dn = pulse;
      double& u_amp = q ? up.pieces[i].omega_i_khz : up.pieces[i].omega_r_khz;
      double& d_amp = q ? dn.pieces[i].omega_i_khz : dn.pieces[i].omega_r_khz;
      u_amp += h;
      d_amp -= h;
      const double fd = (evaluate_sampled_fidelity(up, samples, sys) -
                         evaluate_sampled_fidelity(dn, samples, sys)) /
                        (2 * h);
      const double an = q ? grad[i].second : grad[i].first;
      max_rel = std::max(max_rel, std::abs(an - fd) / std::max(std::abs(fd), 1e-12));
    }
  }
  CHECK(max_rel < 1e-5);
}

TEST_CASE("grape converges on the noiseless CNOT") {
  GrapeConfig cfg;
  cfg.pieces = 6;
  cfg.piece_ns = 250.0;
  cfg.grid = {{0.0, 0.0, 0.0}};
  cfg.max_iters = 400;
  cfg.seed = 3;
  const auto res = grape_optimize(cfg, SystemConstants{});
  REQUIRE(!res.objective_trace.empty());
  for (size_t i = 1; i < res.objective_trace.size(); ++i)
    CHECK(res.objective_trace[i] >= res.objective_trace[i - 1] - 1e-15);
  CHECK(res.converged);
  CHECK(res.final_infidelity <= cfg.target_infidelity);
  for (const auto& p : res.pulse.pieces)
    CHECK(std::hypot(p.omega_r_khz, p.omega_i_khz) <= cfg.max_amplitude_khz + 1e-9);
}

TEST_CASE("filter function of free evolution is the sinc law") {
  const SystemConstants sys;
  PulseWaveform idle;
  idle.pieces = {{1500.0, 0.0, 0.0}};
  for (double w_khz : {37.0, 546.67, 1100.0}) {
    const double w = w_khz * kKhzToRadNs;
    const double t = idle.total_ns();
    const double x = w * t / 2;
    const double expect = w * w / 4.0 * t * t * std::pow(std::sin(x) / x, 2.0);
    CHECK(filter_function_first_order(idle, w_khz, sys) ==
          doctest::Approx(expect).epsilon(1e-9));
  }
  // Infidelity estimate scales as sigma^2.
  const double a = first_order_infidelity(idle, 200.0, 5.0, sys);
  const double b = first_order_infidelity(idle, 200.0, 10.0, sys);
  CHECK(b == doctest::Approx(4.0 * a).epsilon(1e-12));
}

TEST_CASE("filter estimate tracks the Monte Carlo infidelity at small sigma") {
  const SystemConstants sys;
  const PulseWaveform pulse = primitive_pulse(sys.a_par_eff_khz);
  const double sigma = 5.0;
  const std::vector<double> omegas = {std::abs(sys.omega_c_khz)};
  const auto mc = scan_noise_frequency(pulse, omegas, sigma, 4000, 11, sys);
  const double est = first_order_infidelity(pulse, omegas[0], sigma, sys);
  CHECK(std::abs(est - mc[0].second) / mc[0].second < 0.2);
}

TEST_CASE("quantum bath evaluation stays physical") {
  const SystemConstants sys;
  const PulseWaveform pulse = primitive_pulse(sys.a_par_eff_khz);
  const std::vector<CarbonSpin> spins = {{12.0, 9.0, 0.7}};
  const auto rep = evaluate_quantum_bath(pulse, spins, sys, OpBranch::kNot);
  REQUIRE(!rep.purity_trace.empty());
  CHECK(rep.purity_trace.front().first == 0.0);
  for (const auto& [t, p] : rep.purity_trace) {
    CHECK(p <= 1.0 + 1e-12);
    CHECK(p >= 0.25 - 1e-12);
  }
  CHECK(rep.fidelity > 0.99);
  CHECK(rep.fidelity <= 1.0 + 1e-12);
  // Weak coupling: purity barely dips.
  CHECK(rep.purity_trace.back().second > 0.999);
}

TEST_CASE("full model evaluation is step-size converged") {
  const SystemConstants sys;
  const PulseWaveform pulse = primitive_pulse(sys.a_par_eff_khz);
  const auto coarse = evaluate_full_model(pulse, sys, 0.2);
  const auto fine = evaluate_full_model(pulse, sys, 0.1);
  CHECK(std::abs(coarse.infidelity - fine.infidelity) < 1e-4);
  CHECK(fine.leakage >= 0.0);
  CHECK(fine.leakage < 1e-2);
  CHECK(fine.infidelity > 0.0);
  CHECK(fine.infidelity < 0.05);
}

TEST_CASE("amplitude instability error grows quadratically in sigma") {
  const SystemConstants sys;
  const PulseWaveform pulse = primitive_pulse(sys.a_par_eff_khz);
  const double e1 = amplitude_instability_error(pulse, 0.01, 3000, 7, sys);
  const double e2 = amplitude_instability_error(pulse, 0.02, 3000, 7, sys);
  CHECK(e1 > 0.0);
  CHECK(e2 / e1 == doctest::Approx(4.0).epsilon(0.15));
}

TEST_CASE("distortion preserves the total duration and the identity limit") {
  const SystemConstants sys;
  const PulseWaveform pulse = primitive_pulse(sys.a_par_eff_khz);
  const PulseWaveform same = apply_distortion(pulse, 0.0);
  CHECK(same.pieces.size() == pulse.pieces.size());
  CHECK(same.pieces[0].omega_r_khz == pulse.pieces[0].omega_r_khz);
  const PulseWaveform low = apply_distortion(pulse, 10.0);
  CHECK(std::abs(low.total_ns() - pulse.total_ns()) < 1e-9);
  CHECK(low.pieces.size() > pulse.pieces.size());
  const std::vector<NoiseSample> zero = {{0.0, 0.0, 0.0}};
  const double f_low = evaluate_sampled_fidelity(low, zero, sys);
  CHECK(f_low <= 1.0);
  CHECK(f_low > 0.9);  // a 10 ns lag perturbs but does not destroy the gate
}
