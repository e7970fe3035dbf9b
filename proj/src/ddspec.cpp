#include "dcg/ddspec.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "dcg/qcore.hpp"

namespace dcg {

namespace {

// kHz -> rad/us
constexpr double kAng = 2.0 * kPi * 1e-3;

void check_sequence(const DDSequence& seq) {
  if (seq.n_pulses <= 0 || seq.n_pulses % 2 != 0)
    throw std::invalid_argument("DDSequence: n_pulses must be positive and even");
  if (!(seq.tau_us > 0.0)) throw std::invalid_argument("DDSequence: tau_us must be positive");
}

// exp(-i ang/2 n.sigma) for unit axis n in the xz plane.
Eigen::Matrix2cd su2_rotation(double nx, double nz, double ang) {
  const double c = std::cos(ang / 2.0), s = std::sin(ang / 2.0);
  Eigen::Matrix2cd u;
  u << cd(c, -s * nz), cd(0.0, -s * nx), cd(0.0, -s * nx), cd(c, s * nz);
  return u;
}

Eigen::Matrix2cd matrix_power(Eigen::Matrix2cd base, int n) {
  Eigen::Matrix2cd acc = Eigen::Matrix2cd::Identity();
  while (n > 0) {
    if (n & 1) acc = acc * base;
    base = base * base;
    n >>= 1;
  }
  return acc;
}

}  // namespace

ConditionalFrequencies conditional_frequencies(const CarbonSpin& spin, double omega_c_khz,
                                               int manifold_sign) {
  if (manifold_sign != 1 && manifold_sign != -1)
    throw std::invalid_argument("conditional_frequencies: manifold_sign must be +1 or -1");
  const double zz = omega_c_khz + manifold_sign * spin.a_zz_khz;
  const double w1 = std::hypot(spin.a_perp_khz, zz);
  if (w1 == 0.0) throw std::invalid_argument("conditional_frequencies: degenerate spin");
  return {omega_c_khz, w1, zz / w1};
}

double dd_coherence_analytic(const CarbonSpin& spin, const DDSequence& seq, double omega_c_khz,
                             int manifold_sign) {
  check_sequence(seq);
  const auto f = conditional_frequencies(spin, omega_c_khz, manifold_sign);
  const double w0 = f.omega0_khz * kAng, w1 = f.omega1_khz * kAng, tau = seq.tau_us;
  const double c0 = std::cos(w0 * tau / 2.0), s0 = std::sin(w0 * tau / 2.0);
  const double c1 = std::cos(w1 * tau / 2.0), s1 = std::sin(w1 * tau / 2.0);
  const double cphi = c0 * c1 - f.dot * s0 * s1;
  // sin^2(N phi/2)/cos^2(phi/2) = 2 (1-cos phi) U_{N/2-1}(cos phi)^2 via the
  // Chebyshev recurrence; stays finite where cos(phi/2) -> 0.
  double um1 = 0.0, um = 1.0;
  for (int i = 0; i < seq.n_pulses / 2 - 1; ++i) {
    const double next = 2.0 * cphi * um - um1;
    um1 = um;
    um = next;
  }
  const double s0q = std::sin(w0 * tau / 4.0), s1q = std::sin(w1 * tau / 4.0);
  return 1.0 - 4.0 * (1.0 - f.dot * f.dot) * s0q * s0q * s1q * s1q * (1.0 - cphi) * um * um;
}

double dd_coherence_oracle(const CarbonSpin& spin, const DDSequence& seq, double omega_c_khz,
                           int manifold_sign) {
  check_sequence(seq);
  const auto f = conditional_frequencies(spin, omega_c_khz, manifold_sign);
  const double w0 = f.omega0_khz * kAng, w1 = f.omega1_khz * kAng, tau = seq.tau_us;
  const double nx = std::sqrt(std::max(0.0, 1.0 - f.dot * f.dot));
  const auto u0 = [&](double t) { return su2_rotation(0.0, 1.0, w0 * t); };
  const auto u1 = [&](double t) { return su2_rotation(nx, f.dot, w1 * t); };
  const Eigen::Matrix2cd cell0 = u0(tau / 2.0) * u1(tau) * u0(tau / 2.0);
  const Eigen::Matrix2cd cell1 = u1(tau / 2.0) * u0(tau) * u1(tau / 2.0);
  const Eigen::Matrix2cd v0 = matrix_power(cell0, seq.n_pulses / 2);
  const Eigen::Matrix2cd v1 = matrix_power(cell1, seq.n_pulses / 2);
  return 0.5 * (v0 * v1.adjoint()).trace().real();
}

double multi_spin_coherence_oracle(std::span<const CarbonSpin> spins, const DDSequence& seq,
                                   double omega_c_khz, int manifold_sign) {
  check_sequence(seq);
  double c = 1.0;
  for (const auto& spin : spins) c *= dd_coherence_oracle(spin, seq, omega_c_khz, manifold_sign);
  return c;
}

double resonance_interval_us(const CarbonSpin& spin, double omega_c_khz, int k,
                             int manifold_sign) {
  if (k < 1) throw std::invalid_argument("resonance_interval_us: k must be >= 1");
  const auto f = conditional_frequencies(spin, omega_c_khz, manifold_sign);
  return (2.0 * k - 1.0) * 1e3 / (std::abs(f.omega0_khz) + f.omega1_khz);
}

double multi_spin_coherence(std::span<const CarbonSpin> spins, const DDSequence& seq,
                            double omega_c_khz, int manifold_sign) {
  double c = 1.0;
  for (const auto& spin : spins) c *= dd_coherence_analytic(spin, seq, omega_c_khz, manifold_sign);
  return c;
}

CarbonFitResult fit_carbon_dip(std::span<const std::pair<double, double>> tau_coherence_us,
                               int n_pulses, double omega_c_khz,
                               std::pair<double, double> initial_guess_khz,
                               std::span<const int> k_orders, int manifold_sign) {
  if (tau_coherence_us.size() < 3)
    throw std::invalid_argument("fit_carbon_dip: need at least 3 samples");
  const auto residuals = [&](const Eigen::VectorXd& p) {
    CarbonSpin spin{p[0], std::abs(p[1]), 0.0};
    Eigen::VectorXd r(static_cast<Eigen::Index>(tau_coherence_us.size()));
    Eigen::Index i = 0;
    for (const auto& [tau, c] : tau_coherence_us)
      r[i++] = dd_coherence_analytic(spin, {n_pulses, tau}, omega_c_khz, manifold_sign) - c;
    return r;
  };

  std::vector<Eigen::Vector2d> starts;
  starts.emplace_back(initial_guess_khz.first, initial_guess_khz.second);
  // Extra starts from the resonance condition at the deepest observed dip:
  // (|w0| + w1)/2 * tau_min = (2k-1) pi fixes w1, which bounds a_zz.
  const auto dip = std::min_element(
      tau_coherence_us.begin(), tau_coherence_us.end(),
      [](const auto& a, const auto& b) { return a.second < b.second; });
  for (int k : k_orders) {
    if (k < 1) continue;
    const double w1 = (2.0 * k - 1.0) * 1e3 / dip->first - std::abs(omega_c_khz);
    const double ap = initial_guess_khz.second;
    if (w1 <= std::abs(ap)) continue;
    const double zz = std::sqrt(w1 * w1 - ap * ap);
    for (double sgn : {1.0, -1.0})
      starts.emplace_back((sgn * zz - omega_c_khz) * manifold_sign, ap);
  }

  LmOptions opt;
  CarbonFitResult best;
  double best_rms = std::numeric_limits<double>::infinity();
  for (const auto& s : starts) {
    const LmResult fit = levenberg_marquardt(residuals, s, opt);
    if (fit.residual_rms < best_rms) {
      best_rms = fit.residual_rms;
      best.a_zz_khz = fit.params[0];
      best.a_perp_khz = std::abs(fit.params[1]);
      best.covariance = fit.covariance;
      best.residual_rms = fit.residual_rms;
      best.converged = fit.converged;
    }
  }
  return best;
}

RamseyFit fit_ramsey(std::span<const std::pair<double, double>> data, bool fix_p2) {
  if (data.size() < 6) throw std::invalid_argument("fit_ramsey: need at least 6 samples");
  double ymin = data[0].second, ymax = data[0].second, ysum = 0.0, tmax = 0.0;
  for (const auto& [t, y] : data) {
    ymin = std::min(ymin, y);
    ymax = std::max(ymax, y);
    ysum += y;
    tmax = std::max(tmax, t);
  }
  const double offset0 = ysum / static_cast<double>(data.size());
  // Frequency seed from sign changes of the centered signal.
  int crossings = 0;
  for (std::size_t i = 1; i < data.size(); ++i)
    if ((data[i].second - offset0) * (data[i - 1].second - offset0) < 0.0) ++crossings;
  const double f0 = std::max(0.5 * crossings / std::max(tmax, 1e-9), 1e-3);

  // params: [f MHz, T2* us, p, A, phi, b]
  const auto residuals = [&](const Eigen::VectorXd& p) {
    Eigen::VectorXd r(static_cast<Eigen::Index>(data.size()));
    Eigen::Index i = 0;
    for (const auto& [t, y] : data) {
      const double env = std::exp(-std::pow(t / p[1], p[2]));
      r[i++] = p[3] * std::cos(2.0 * kPi * p[0] * t + p[4]) * env + p[5] - y;
    }
    return r;
  };
  Eigen::VectorXd p0(6);
  p0 << f0, 0.5 * tmax, 2.0, 0.5 * (ymax - ymin), 0.0, offset0;
  LmOptions opt;
  opt.lower = Eigen::VectorXd(6);
  opt.upper = Eigen::VectorXd(6);
  opt.lower << 0.0, 1e-3, fix_p2 ? 2.0 : 0.5, -1e3, -kPi, -1e3;
  opt.upper << 1e3, 1e4, fix_p2 ? 2.0 : 4.0, 1e3, kPi, 1e3;
  const LmResult fit = levenberg_marquardt(residuals, p0, opt);
  return {fit.params[0], fit.params[1], fit.params[2],
          fit.params[3], fit.params[4], fit.params[5], fit.converged};
}

double fit_static_sigma(std::span<const std::pair<double, double>> data) {
  if (data.empty()) throw std::invalid_argument("fit_static_sigma: empty data");
  // C(t) = exp(-(2 pi sigma t)^2 / 2) with sigma in kHz and t in us.
  const auto residuals = [&](const Eigen::VectorXd& p) {
    Eigen::VectorXd r(static_cast<Eigen::Index>(data.size()));
    Eigen::Index i = 0;
    for (const auto& [t, c] : data) {
      const double arg = 2.0 * kPi * p[0] * 1e-3 * t;
      r[i++] = std::exp(-0.5 * arg * arg) - c;
    }
    return r;
  };
  double seed = 20.0;
  for (const auto& [t, c] : data)
    if (c > 1e-6 && c < 0.95 && t > 0.0) {
      seed = std::sqrt(-2.0 * std::log(c)) / (2.0 * kPi * 1e-3 * t);
      break;
    }
  Eigen::VectorXd p0(1);
  p0 << seed;
  LmOptions opt;
  opt.lower = Eigen::VectorXd::Constant(1, 0.0);
  opt.upper = Eigen::VectorXd::Constant(1, 1e6);
  return levenberg_marquardt(residuals, p0, opt).params[0];
}

}  // namespace dcg
