#include "doctest.h"

#include <cmath>
#include <vector>

#include "dcg/noise.hpp"
#include "dcg/relax.hpp"
#include "oracles.hpp"

using namespace dcg;

namespace {

Eigen::Vector3d expm_populations(const RateMatrix& rates, double t_ms, int initial) {
  // Independent route: Taylor exponential of the real generator.
  dcg::Matrix g = rates.matrix().cast<dcg::cd>() * (t_ms * 1e-3);
  const dcg::Matrix u = oracles::expm_taylor(g);
  Eigen::Vector3d p0 = Eigen::Vector3d::Zero();
  p0(initial) = 1.0;
  Eigen::Vector3d out;
  for (int i = 0; i < 3; ++i) {
    dcg::cd acc = 0.0;
    for (int j = 0; j < 3; ++j) acc += u(i, j) * p0(j);
    out(i) = acc.real();
  }
  return out;
}

}  // namespace

TEST_CASE("rate matrix structure") {
  const RateMatrix rates{98.0, 100.0, 130.0};
  const Eigen::Matrix3d g = rates.matrix();
  for (int j = 0; j < 3; ++j) CHECK(std::abs(g.col(j).sum()) < 1e-12);
  CHECK((g - g.transpose()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(g(0, 1) == doctest::Approx(98.0));
  CHECK(g(1, 2) == doctest::Approx(100.0));
  CHECK(g(0, 2) == doctest::Approx(130.0));
  CHECK_THROWS(RateMatrix{-1.0, 0.0, 0.0}.validate());
}

TEST_CASE("closed-form populations match the matrix exponential") {
  Rng rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const RateMatrix rates{rng.uniform() * 300.0, rng.uniform() * 300.0, rng.uniform() * 300.0};
    const double t = rng.uniform() * 20.0;  // ms
    for (int init = 0; init < 3; ++init) {
      const Eigen::Vector3d a = analytic_populations(rates, t, init);
      const Eigen::Vector3d b = expm_populations(rates, t, init);
      CHECK((a - b).cwiseAbs().maxCoeff() < 1e-10);
      CHECK(std::abs(a.sum() - 1.0) < 1e-10);
    }
  }
  // Degenerate-eigenvalue edge: equal rates.
  const RateMatrix eq{150.0, 150.0, 150.0};
  const Eigen::Vector3d a = analytic_populations(eq, 3.0, 0);
  CHECK((a - expm_populations(eq, 3.0, 0)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("nine-curve round trip recovers the rates") {
  const RateMatrix truth{98.0, 100.0, 130.0};
  std::vector<PopulationCurve> curves;
  Rng rng(12);
  for (int init = 0; init < 3; ++init)
    for (int ro = 0; ro < 3; ++ro) {
      PopulationCurve c;
      c.initial = init;
      c.readout = ro;
      for (int k = 0; k <= 30; ++k) {
        const double t = k * 0.4;  // up to 12 ms
        const double p = analytic_populations(truth, t, init)(ro);
        c.points.emplace_back(t, p + 2e-3 * rng.gaussian());
      }
      curves.push_back(std::move(c));
    }
  const auto fit = fit_rate_matrix(curves);
  CHECK(fit.converged);
  CHECK(std::abs(fit.rates.gamma_p1 - truth.gamma_p1) < 0.1 + 2.0);
  CHECK(std::abs(fit.rates.gamma_m1 - truth.gamma_m1) < 0.1 + 2.0);
  CHECK(std::abs(fit.rates.gamma_2 - truth.gamma_2) < 0.1 + 2.0);

  // Noise-free data pins the rates to the requested 0.1 1/s.
  for (auto& c : curves)
    for (size_t k = 0; k < c.points.size(); ++k)
      c.points[k].second = analytic_populations(truth, c.points[k].first, c.initial)(c.readout);
  const auto clean = fit_rate_matrix(curves);
  CHECK(std::abs(clean.rates.gamma_p1 - truth.gamma_p1) < 0.1);
  CHECK(std::abs(clean.rates.gamma_m1 - truth.gamma_m1) < 0.1);
  CHECK(std::abs(clean.rates.gamma_2 - truth.gamma_2) < 0.1);
}

TEST_CASE("gate relaxation error at the reference rates") {
  const RateMatrix rates{98.0, 100.0, 130.0};
  CHECK(t1_gate_error(rates, 1500.0) == doctest::Approx(3.21e-4).epsilon(1e-12));
}

TEST_CASE("rabi instability fit recovers the relative spread") {
  // Gaussian amplitude scatter g ~ N(0, s^2) dephases a Rabi fringe of
  // frequency f with T2' = 1/(sqrt(2) pi f s).
  const double f = 10.0;  // MHz
  const double s = 0.018;
  const double t2p = 1.0 / (std::sqrt(2.0) * kPi * f * s);
  std::vector<std::pair<double, double>> data;
  for (int k = 0; k < 1200; ++k) {
    const double t = k * 0.004;  // us
    data.emplace_back(t, 0.5 * std::cos(2 * kPi * f * t) *
                                 std::exp(-std::pow(t / t2p, 2.0)) +
                             0.5);
  }
  const auto fit = fit_rabi_instability(data);
  CHECK(fit.converged);
  CHECK(std::abs(fit.f_rabi_mhz - f) < 1e-3);
  CHECK(std::abs(fit.rel_sigma - s) / s < 0.01);
}

TEST_CASE("monte carlo oracle for the instability dephasing law") {
  // Average cos(2 pi f (1+g) t) over g draws and compare the envelope decay
  // against exp(-(t/T2')^2) with T2' = 1/(sqrt(2) pi f s).
  const double f = 10.0, s = 0.018;
  const double t2p = 1.0 / (std::sqrt(2.0) * kPi * f * s);
  Rng rng(3);
  std::vector<double> gs(20000);
  for (auto& g : gs) g = s * rng.gaussian();
  for (double t : {0.1 * t2p, 0.5 * t2p, 1.0 * t2p}) {
    double mc = 0.0;
    for (double g : gs) mc += std::cos(2 * kPi * f * (1 + g) * t) / gs.size();
    const double law = std::cos(2 * kPi * f * t) * std::exp(-std::pow(t / t2p, 2.0));
    CHECK(std::abs(mc - law) < 0.015);  // ~3 standard errors at 2e4 draws
  }
}
