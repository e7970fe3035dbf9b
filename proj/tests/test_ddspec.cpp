#include "doctest.h"

#include <cmath>
#include <vector>

#include "dcg/ddspec.hpp"
#include "dcg/noise.hpp"

using namespace dcg;

namespace {
constexpr double kOmegaC = -546.67;
}

TEST_CASE("analytic DD coherence equals the brute-force oracle") {
  Rng rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    CarbonSpin spin;
    spin.a_zz_khz = (rng.uniform() - 0.5) * 160.0;
    spin.a_perp_khz = rng.uniform() * 80.0;
    spin.phi_rad = rng.uniform() * 2 * kPi;
    DDSequence seq;
    seq.n_pulses = 2 * (1 + static_cast<int>(rng.uniform() * 32));
    seq.tau_us = 0.5 + rng.uniform() * 25.0;
    const int sign = trial % 2 ? +1 : -1;
    const double a = dd_coherence_analytic(spin, seq, kOmegaC, sign);
    const double o = dd_coherence_oracle(spin, seq, kOmegaC, sign);
    CHECK(std::abs(a - o) < 1e-9);
    CHECK(a <= 1.0 + 1e-12);
    CHECK(a >= -1.0 - 1e-12);
  }
}

TEST_CASE("coherence is azimuth independent") {
  const DDSequence seq{32, 9.4};
  for (double phi : {0.0, 1.0, 2.5, 4.4}) {
    const CarbonSpin spin{40.0, 30.0, phi};
    CHECK(dd_coherence_analytic(spin, seq, kOmegaC) ==
          doctest::Approx(dd_coherence_analytic({40.0, 30.0, 0.0}, seq, kOmegaC))
              .epsilon(1e-13));
  }
}

TEST_CASE("ninth-order resonance of the bare Larmor precession") {
  const CarbonSpin bare{0.0, 0.0, 0.0};
  const double tau9 = resonance_interval_us(bare, kOmegaC, 9);
  CHECK(std::abs(tau9 - 15.549) < 1e-3);
  // k-th resonances scale as (2k - 1).
  const double tau1 = resonance_interval_us(bare, kOmegaC, 1);
  CHECK(tau9 == doctest::Approx(17.0 * tau1).epsilon(1e-12));
  // A coupled spin dips near its own resonance interval.
  const CarbonSpin spin{55.0, 40.0, 0.0};
  const double tau = resonance_interval_us(spin, kOmegaC, 3);
  const double at_res = dd_coherence_analytic(spin, {32, tau}, kOmegaC);
  const double off_res = dd_coherence_analytic(spin, {32, tau * 1.15}, kOmegaC);
  CHECK(at_res < 0.6);
  CHECK(off_res > at_res);
}

TEST_CASE("independent-spin product equals the joint oracle") {
  const std::vector<CarbonSpin> spins = {{52.0, 38.0, 0.4}, {-31.0, 22.0, 2.2}, {14.0, 47.0, 5.0}};
  for (double tau : {3.3, 8.1, 14.9}) {
    const DDSequence seq{16, tau};
    CHECK(std::abs(multi_spin_coherence(spins, seq, kOmegaC) -
                   multi_spin_coherence_oracle(spins, seq, kOmegaC)) < 1e-12);
  }
}

TEST_CASE("carbon dip fit recovers the couplings") {
  const CarbonSpin truth{43.7, 31.2, 0.0};
  std::vector<std::pair<double, double>> data;
  for (double tau = 2.0; tau <= 18.0; tau += 0.01)
    data.emplace_back(tau, dd_coherence_analytic(truth, {32, tau}, kOmegaC));
  const std::vector<int> ks = {1, 2, 3};
  const auto fit = fit_carbon_dip(data, 32, kOmegaC, {10.0, 20.0}, ks);
  CHECK(fit.converged);
  CHECK(std::abs(fit.a_zz_khz - truth.a_zz_khz) < 0.1);
  CHECK(std::abs(fit.a_perp_khz - truth.a_perp_khz) < 0.1);
  CHECK(fit.residual_rms < 1e-6);
}

TEST_CASE("ramsey fit recovers frequency and envelope") {
  const double f = 2.1603, t2 = 2.6, amp = 0.47, phi = 0.4, off = 0.5;
  std::vector<std::pair<double, double>> data;
  Rng rng(5);
  for (double t = 0.0; t <= 8.0; t += 0.004)
    data.emplace_back(t, amp * std::cos(2 * kPi * f * t + phi) *
                                 std::exp(-std::pow(t / t2, 2.0)) +
                             off + 2e-3 * rng.gaussian());
  const auto fit = fit_ramsey(data, true);
  CHECK(fit.converged);
  CHECK(std::abs(fit.delta_f_mhz - f) < 1e-3);
  CHECK(std::abs(fit.t2_star_us - t2) < 0.05);
  CHECK(std::abs(fit.amplitude - amp) < 0.01);
}

TEST_CASE("static sigma fit round trip") {
  const double sigma = 53.4;  // kHz
  std::vector<std::pair<double, double>> data;
  for (double t = 0.0; t <= 6.0; t += 0.02)
    data.emplace_back(t, std::exp(-0.5 * std::pow(2 * kPi * sigma * 1e-3 * t, 2.0)));
  CHECK(std::abs(fit_static_sigma(data) - sigma) < 0.01);
}
