#include "dcg/grape.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

namespace dcg {

namespace {

Matrix kron(const Matrix& a, const Matrix& b) {
  return Eigen::kroneckerProduct(a, b).eval();
}

Matrix resolve_target(const Matrix& target) {
  return target.size() == 0 ? cnot_target() : target;
}

SystemConstants with_pulse_duration(const SystemConstants& sys, const PulseWaveform& pulse) {
  pulse.validate();
  SystemConstants c = sys;
  c.t_gate_ns = pulse.total_ns();
  return c;
}

// sin(x)/x, accurate through x = 0.
double sincs(double x) {
  if (std::abs(x) < 1e-4) return 1.0 - x * x / 6.0;
  return std::sin(x) / x;
}

// int_0^h e^{i a s} ds.
cd phase_integral(double a, double h) {
  const double x = a * h;
  if (std::abs(x) < 1e-6) return cd(h) * std::exp(cd(0.0, x / 2.0)) * sincs(x / 2.0);
  return (std::exp(cd(0.0, x)) - 1.0) / cd(0.0, a);
}

struct SubStep {
  Matrix v;              // eigenvectors of the frozen generator
  Eigen::VectorXd lam;   // eigenvalues, rad/ns
  double dt_ns;
  int piece;
  Matrix u;              // exp(-i H dt)
};

std::vector<SubStep> build_substeps(const PulseWaveform& pulse, const NoiseSample& sample,
                                    const SystemConstants& sys, double max_substep_ns,
                                    std::optional<double> noise_omega_khz) {
  if (max_substep_ns <= 0.0) throw std::invalid_argument("max_substep_ns must be positive");
  const double wn = noise_omega_khz.value_or(sys.omega_c_khz);
  const Matrix h_int = interaction_hamiltonian(sys);
  std::vector<SubStep> steps;
  double t = 0.0;
  for (std::size_t p = 0; p < pulse.pieces.size(); ++p) {
    const PulsePiece& piece = pulse.pieces[p];
    const Matrix h_base = h_int + control_hamiltonian(piece.omega_r_khz, piece.omega_i_khz);
    const int n = std::max(1, static_cast<int>(std::ceil(piece.duration_ns / max_substep_ns)));
    const double dt = piece.duration_ns / n;
    for (int k = 0; k < n; ++k) {
      const double t_mid = t + (k + 0.5) * dt;
      const Matrix h =
          h_base + classical_noise_generator(sample.x_khz, sample.y_khz, sample.z_khz, wn, t_mid);
      Eigen::SelfAdjointEigenSolver<Matrix> es(h);
      SubStep s;
      s.v = es.eigenvectors();
      s.lam = es.eigenvalues();
      s.dt_ns = dt;
      s.piece = static_cast<int>(p);
      Vector ph(s.lam.size());
      for (Eigen::Index i = 0; i < s.lam.size(); ++i)
        ph[i] = std::exp(cd(0.0, -s.lam[i] * dt));
      s.u = s.v * ph.asDiagonal() * s.v.adjoint();
      steps.push_back(std::move(s));
    }
    t += piece.duration_ns;
  }
  return steps;
}

cd trace_overlap(const Matrix& target, const Matrix& u) {
  return (target.adjoint() * u).trace() / static_cast<double>(u.rows());
}

// Divided-difference matrix of f(l) = e^{-i l dt} on the eigenvalue pairs.
Matrix loewner_matrix(const Eigen::VectorXd& lam, double dt) {
  const Eigen::Index d = lam.size();
  Matrix m(d, d);
  for (Eigen::Index a = 0; a < d; ++a)
    for (Eigen::Index b = 0; b < d; ++b) {
      const double mean = 0.5 * (lam[a] + lam[b]), delta = lam[a] - lam[b];
      m(a, b) = cd(0.0, -dt) * std::exp(cd(0.0, -mean * dt)) * sincs(delta * dt / 2.0);
    }
  return m;
}

}  // namespace

double PulseWaveform::total_ns() const {
  double t = 0.0;
  for (const auto& p : pieces) t += p.duration_ns;
  return t;
}

void PulseWaveform::validate() const {
  if (pieces.empty()) throw std::invalid_argument("PulseWaveform: no pieces");
  for (const auto& p : pieces)
    if (!(p.duration_ns > 0.0))
      throw std::invalid_argument("PulseWaveform: durations must be positive");
}

PulseWaveform primitive_pulse(double a_par_eff_khz) {
  if (a_par_eff_khz <= 0.0) throw std::invalid_argument("a_par_eff must be positive");
  const double t_ns = std::sqrt(3.0) / (2.0 * a_par_eff_khz) * 1e6;
  const double omega_khz = 1e6 / (2.0 * t_ns);
  // The pi rotation must be about -x: the resonant block then matches the
  // detuned block's full-cycle phase of -1, composing to the CNOT exactly.
  return {{{t_ns, -omega_khz, 0.0}}, "primitive"};
}

Matrix pulse_propagator(const PulseWaveform& pulse, const NoiseSample& sample,
                        const SystemConstants& sys, double max_substep_ns,
                        std::optional<double> noise_omega_khz) {
  const SystemConstants c = with_pulse_duration(sys, pulse);
  Matrix u = Matrix::Identity(4, 4);
  for (const auto& s : build_substeps(pulse, sample, c, max_substep_ns, noise_omega_khz))
    u = s.u * u;
  return u;
}

double evaluate_sampled_fidelity(const PulseWaveform& pulse, std::span<const NoiseSample> samples,
                                 const SystemConstants& sys, const Matrix& target) {
  if (samples.empty()) throw std::invalid_argument("evaluate_sampled_fidelity: no samples");
  const Matrix g = resolve_target(target);
  double acc = 0.0;
  for (const auto& sample : samples)
    acc += std::norm(trace_overlap(g, pulse_propagator(pulse, sample, sys)));
  return acc / static_cast<double>(samples.size());
}

std::vector<std::pair<double, double>> fidelity_gradient(const PulseWaveform& pulse,
                                                         std::span<const NoiseSample> samples,
                                                         const SystemConstants& sys,
                                                         const Matrix& target) {
  if (samples.empty()) throw std::invalid_argument("fidelity_gradient: no samples");
  const SystemConstants c = with_pulse_duration(sys, pulse);
  const Matrix g = resolve_target(target);
  const Matrix dh_r = control_hamiltonian(1.0, 0.0);  // dH/dOmega_r, rad/ns per kHz
  const Matrix dh_i = control_hamiltonian(0.0, 1.0);
  const double m_count = static_cast<double>(samples.size());

  std::vector<std::pair<double, double>> grad(pulse.pieces.size(), {0.0, 0.0});
  for (const auto& sample : samples) {
    const auto steps = build_substeps(pulse, sample, c, 10.0, {});
    // Prefix products P_s = U_s ... U_1; A_s = U_tot P_s^dag.
    std::vector<Matrix> prefix(steps.size() + 1);
    prefix[0] = Matrix::Identity(4, 4);
    for (std::size_t s = 0; s < steps.size(); ++s) prefix[s + 1] = steps[s].u * prefix[s];
    const Matrix& u_tot = prefix.back();
    const cd z = trace_overlap(g, u_tot);

    for (std::size_t s = 0; s < steps.size(); ++s) {
      const SubStep& st = steps[s];
      const Matrix k = prefix[s] * g.adjoint() * u_tot * prefix[s + 1].adjoint();
      const Matrix x = st.v.adjoint() * k * st.v;
      const Matrix m = loewner_matrix(st.lam, st.dt_ns);
      const Matrix yr = st.v.adjoint() * dh_r * st.v;
      const Matrix yi = st.v.adjoint() * dh_i * st.v;
      const cd dz_r = (x * m.cwiseProduct(yr)).trace() / 4.0;
      const cd dz_i = (x * m.cwiseProduct(yi)).trace() / 4.0;
      grad[st.piece].first += 2.0 * std::real(std::conj(z) * dz_r) / m_count;
      grad[st.piece].second += 2.0 * std::real(std::conj(z) * dz_i) / m_count;
    }
  }
  return grad;
}

GrapeResult grape_optimize(const GrapeConfig& cfg, const SystemConstants& sys) {
  if (cfg.pieces <= 0 || cfg.piece_ns <= 0.0) throw std::invalid_argument("bad pulse shape");
  if (cfg.grid.empty()) throw std::invalid_argument("grape_optimize: empty sample grid");
  if (cfg.max_amplitude_khz <= 0.0) throw std::invalid_argument("max_amplitude must be positive");
  if (cfg.amplitude_scales.empty()) throw std::invalid_argument("amplitude_scales must be nonempty");
  for (double a : cfg.amplitude_scales)
    if (a <= 0.0) throw std::invalid_argument("amplitude_scales must be positive");
  const Matrix target = resolve_target(cfg.target);

  PulseWaveform pulse;
  pulse.label = "grape";
  Rng rng(cfg.seed);
  for (int i = 0; i < cfg.pieces; ++i)
    pulse.pieces.push_back(
        {cfg.piece_ns, (2.0 * rng.uniform() - 1.0) * 1000.0, (2.0 * rng.uniform() - 1.0) * 1000.0});

  const auto project = [&](PulseWaveform& p) {
    for (auto& piece : p.pieces) {
      const double mag = std::hypot(piece.omega_r_khz, piece.omega_i_khz);
      if (mag > cfg.max_amplitude_khz) {
        piece.omega_r_khz *= cfg.max_amplitude_khz / mag;
        piece.omega_i_khz *= cfg.max_amplitude_khz / mag;
      }
    }
  };
  project(pulse);

  const auto scaled = [](const PulseWaveform& p, double a) {
    PulseWaveform q = p;
    for (auto& piece : q.pieces) {
      piece.omega_r_khz *= a;
      piece.omega_i_khz *= a;
    }
    return q;
  };
  const auto& scales = cfg.amplitude_scales;
  const auto objective = [&](const PulseWaveform& p) {
    double f = 0.0;
    for (double a : scales) f += evaluate_sampled_fidelity(scaled(p, a), cfg.grid, sys, target);
    return f / static_cast<double>(scales.size());
  };

  GrapeResult result;
  double obj = objective(pulse);
  result.objective_trace.push_back(obj);
  double step = cfg.step_init;

  // Polak-Ribiere+ conjugate gradient with backtracking line search: plain
  // steepest ascent stalls an order of magnitude short on this objective.
  const int n = cfg.pieces * 2;
  std::vector<double> g_prev(n, 0.0), dir(n, 0.0);
  int iter = 0;
  for (; iter < cfg.max_iters; ++iter) {
    if (1.0 - obj <= cfg.target_infidelity) {
      result.converged = true;
      break;
    }
    std::vector<double> g(n, 0.0);
    for (double a : scales) {
      // Chain rule through the scale: dF(a p)/dp = a * grad F evaluated at a p.
      const auto grad = fidelity_gradient(scaled(pulse, a), cfg.grid, sys, target);
      const double w = a / static_cast<double>(scales.size());
      for (int i = 0; i < cfg.pieces; ++i) {
        g[2 * i] += w * grad[i].first;
        g[2 * i + 1] += w * grad[i].second;
      }
    }
    double gg = 0.0, g_diff = 0.0, gp2 = 0.0;
    for (int i = 0; i < n; ++i) {
      gg += g[i] * g[i];
      g_diff += g[i] * (g[i] - g_prev[i]);
      gp2 += g_prev[i] * g_prev[i];
    }
    if (gg < 1e-24) break;
    const double beta = (iter == 0 || gp2 < 1e-24) ? 0.0 : std::max(0.0, g_diff / gp2);
    double slope = 0.0;
    for (int i = 0; i < n; ++i) {
      dir[i] = g[i] + beta * dir[i];
      slope += dir[i] * g[i];
    }
    if (slope <= 0.0) dir = g;  // restart when the CG direction stops ascending

    bool accepted = false;
    while (step >= 1e-12) {
      PulseWaveform trial = pulse;
      for (int i = 0; i < cfg.pieces; ++i) {
        trial.pieces[i].omega_r_khz += step * dir[2 * i];
        trial.pieces[i].omega_i_khz += step * dir[2 * i + 1];
      }
      project(trial);
      const double trial_obj = objective(trial);
      if (trial_obj > obj) {
        pulse = std::move(trial);
        obj = trial_obj;
        result.objective_trace.push_back(obj);
        step = std::min(step * 1.6, 1e9);
        accepted = true;
        break;
      }
      step *= 0.4;
    }
    g_prev = g;
    if (!accepted) break;  // stalled: no ascent direction at resolvable step
  }

  if (1.0 - obj <= cfg.target_infidelity) result.converged = true;
  result.pulse = std::move(pulse);
  result.final_infidelity = 1.0 - obj;
  result.iterations = iter;
  return result;
}

std::vector<std::pair<double, double>> scan_noise_frequency(const PulseWaveform& pulse,
                                                            std::span<const double> omegas_khz,
                                                            double sigma_khz, int n_samples,
                                                            unsigned long long seed,
                                                            const SystemConstants& sys,
                                                            const Matrix& target) {
  if (n_samples < 1) throw std::invalid_argument("scan_noise_frequency: n_samples must be >= 1");
  if (sigma_khz < 0.0) throw std::invalid_argument("scan_noise_frequency: negative sigma");
  const Matrix g = resolve_target(target);
  std::vector<NoiseSample> samples(static_cast<std::size_t>(n_samples));
  for (int i = 0; i < n_samples; ++i) {
    Rng rng(seed, static_cast<std::uint64_t>(i));
    samples[i] = {sigma_khz * rng.gaussian(), sigma_khz * rng.gaussian(), 0.0};
  }
  std::vector<std::pair<double, double>> out;
  out.reserve(omegas_khz.size());
  for (double w : omegas_khz) {
    double acc = 0.0;
    for (const auto& s : samples)
      acc += 1.0 - std::norm(trace_overlap(g, pulse_propagator(pulse, s, sys, 10.0, w)));
    out.emplace_back(w, acc / n_samples);
  }
  return out;
}

namespace {

// I(w) = int_0^T e^{iwt} Uc^dag(t) Sz Uc(t) dt, exact per piece in the piece
// eigenbasis: G_ab = int_0^dur e^{i(w + la - lb)s} ds.
Matrix dephasing_integral(const PulseWaveform& pulse, double omega_khz,
                          const SystemConstants& sys) {
  const SystemConstants c = with_pulse_duration(sys, pulse);
  const double w = omega_khz * kKhzToRadNs;
  const SpinOperators sh = spin_operators(0.5);
  const Matrix sz = kron(sh.sz, Matrix::Identity(2, 2));
  const Matrix h_int = interaction_hamiltonian(c);

  Matrix integral = Matrix::Zero(4, 4);
  Matrix u_prefix = Matrix::Identity(4, 4);
  double t0 = 0.0;
  for (const auto& piece : pulse.pieces) {
    const Matrix h = h_int + control_hamiltonian(piece.omega_r_khz, piece.omega_i_khz);
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    const Matrix szt = es.eigenvectors().adjoint() * sz * es.eigenvectors();
    Matrix block(4, 4);
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        block(a, b) = szt(a, b) * phase_integral(w + es.eigenvalues()[a] - es.eigenvalues()[b],
                                                 piece.duration_ns);
    const Matrix in_lab = es.eigenvectors() * block * es.eigenvectors().adjoint();
    integral += std::exp(cd(0.0, w * t0)) * (u_prefix.adjoint() * in_lab * u_prefix);
    Vector ph(4);
    for (int i = 0; i < 4; ++i)
      ph[i] = std::exp(cd(0.0, -es.eigenvalues()[i] * piece.duration_ns));
    u_prefix = (es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint()) * u_prefix;
    t0 += piece.duration_ns;
  }
  return integral;
}

}  // namespace

double filter_function_first_order(const PulseWaveform& pulse, double omega_khz,
                                   const SystemConstants& sys) {
  const double w = omega_khz * kKhzToRadNs;
  return w * w / 4.0 * dephasing_integral(pulse, omega_khz, sys).squaredNorm();
}

double first_order_infidelity(const PulseWaveform& pulse, double omega_khz, double sigma_khz,
                              const SystemConstants& sys) {
  const double s = sigma_khz * kKhzToRadNs;
  return s * s / 4.0 * dephasing_integral(pulse, omega_khz, sys).squaredNorm();
}

QuantumBathReport evaluate_quantum_bath(const PulseWaveform& pulse,
                                        std::span<const CarbonSpin> spins,
                                        const SystemConstants& sys, OpBranch branch) {
  const SystemConstants c = with_pulse_duration(sys, pulse);
  const int n = static_cast<int>(spins.size());
  const long d_b = 1L << n;
  const Matrix i_b = Matrix::Identity(d_b, d_b);
  const Matrix h_bath = bath_joint_hamiltonian(c, spins);
  const Matrix h_int = interaction_hamiltonian(c);

  // Electron (|0> + |1>)/sqrt(2); nucleus m_I = 0 on the NOT branch (indices
  // 1, 3), m_I = +1 on the identity branch (indices 0, 2).
  Vector psi = Vector::Zero(4);
  const int off = branch == OpBranch::kNot ? 1 : 0;
  psi[off] = psi[off + 2] = 1.0 / std::sqrt(2.0);
  const Matrix rho0 = kron(Matrix(psi * psi.adjoint()), Matrix(i_b / static_cast<double>(d_b)));

  QuantumBathReport report;
  Matrix u = Matrix::Identity(4 * d_b, 4 * d_b);
  double t = 0.0;
  report.purity_trace.emplace_back(0.0, 1.0);
  for (const auto& piece : pulse.pieces) {
    const Matrix h =
        kron(Matrix(h_int + control_hamiltonian(piece.omega_r_khz, piece.omega_i_khz)), i_b) +
        h_bath;
    u = expm_hermitian(h, piece.duration_ns) * u;
    t += piece.duration_ns;
    const Matrix rho = u * rho0 * u.adjoint();
    const Matrix rho_sys = partial_trace(rho, {4, static_cast<int>(d_b)}, {0});
    report.purity_trace.emplace_back(t, purity(rho_sys));
  }

  // Undo each spin's mean Larmor precession (rate w_C - a_zz/2) before
  // comparing with CNOT (x) identity.
  const SpinOperators sh = spin_operators(0.5);
  Matrix h_larmor = Matrix::Zero(d_b, d_b);
  for (int i = 0; i < n; ++i) {
    const Matrix left = Matrix::Identity(1L << i, 1L << i);
    const Matrix right = Matrix::Identity(1L << (n - 1 - i), 1L << (n - 1 - i));
    h_larmor += (c.omega_c_khz - 0.5 * spins[i].a_zz_khz) * kKhzToRadNs *
                kron(kron(left, sh.sz), right);
  }
  const Matrix u_frame = kron(Matrix::Identity(4, 4), expm_hermitian(h_larmor, -t)) * u;
  report.fidelity = trace_fidelity(kron(cnot_target(), i_b), u_frame);
  return report;
}

FullModelReport evaluate_full_model(const PulseWaveform& pulse, const SystemConstants& sys,
                                    double dt_ns) {
  if (dt_ns <= 0.0) throw std::invalid_argument("evaluate_full_model: dt must be positive");
  const SystemConstants c = with_pulse_duration(sys, pulse);
  const Matrix h9 = full_hamiltonian(c);
  Eigen::SelfAdjointEigenSolver<Matrix> es(h9);

  // Map each product level (m_S, m_I) to its dressed eigenvector by dominant
  // overlap, with the dominant component gauged real positive.
  Matrix v = Matrix::Zero(9, 9);
  Eigen::VectorXd energy(9);
  std::vector<bool> used(9, false);
  for (int j = 0; j < 9; ++j) {
    int imax = 0;
    es.eigenvectors().col(j).cwiseAbs().maxCoeff(&imax);
    if (used[imax]) throw std::runtime_error("full model: ambiguous dressed-state assignment");
    used[imax] = true;
    const cd lead = es.eigenvectors()(imax, j);
    v.col(imax) = es.eigenvectors().col(j) * (std::abs(lead) / lead);
    energy[imax] = es.eigenvalues()[j];
  }

  // Product index 3(1 - m_S) + (1 - m_I); kept levels (0,+1),(0,0),(-1,+1),(-1,0).
  const int kept[4] = {3, 4, 6, 7};
  const double w_mw = energy[7] - energy[4];  // rad/ns
  const double w_n = 0.5 * ((energy[3] + energy[6]) - (energy[4] + energy[7]));
  const double w_sh = c.omega_sh_khz() * kKhzToRadNs;

  const SpinOperators s1 = spin_operators(1.0);
  const Matrix x9 = v.adjoint() * kron(s1.sx, Matrix::Identity(3, 3)) * v;

  Matrix u_i = Matrix::Identity(9, 9);
  double t = 0.0;
  Matrix hbar(9, 9);
  for (const auto& piece : pulse.pieces) {
    // Half of the sqrt(2)-scaled linear drive per rotating component.
    const cd amp_pos = cd(piece.omega_r_khz, -piece.omega_i_khz) * kKhzToRadNs / std::sqrt(2.0);
    const cd amp_neg = cd(piece.omega_r_khz, piece.omega_i_khz) * kKhzToRadNs / std::sqrt(2.0);
    const int n = std::max(1, static_cast<int>(std::ceil(piece.duration_ns / dt_ns)));
    const double h = piece.duration_ns / n;
    for (int k = 0; k < n; ++k) {
      const double t0 = t + k * h;
      for (int a = 0; a < 9; ++a)
        for (int b = 0; b < 9; ++b) {
          const double delta = energy[a] - energy[b];
          const cd ip = std::exp(cd(0.0, (delta + w_mw) * t0)) * phase_integral(delta + w_mw, h);
          const cd im = std::exp(cd(0.0, (delta - w_mw) * t0)) * phase_integral(delta - w_mw, h);
          hbar(a, b) = x9(a, b) * (amp_pos * ip + amp_neg * im) / h;
        }
      u_i = expm_hermitian(hbar, h) * u_i;
    }
    t += piece.duration_ns;
  }

  FullModelReport report;
  Matrix u_cmp(4, 4);
  for (int r = 0; r < 4; ++r) {
    const double s_z = r < 2 ? 0.5 : -0.5;   // m_S = 0 first
    const double i_z = r % 2 == 0 ? 0.5 : -0.5;  // m_I = +1 first
    const double phi = (-w_mw * s_z + (w_n - w_sh) * i_z - energy[kept[r]]) * t;
    for (int col = 0; col < 4; ++col)
      u_cmp(r, col) = std::exp(cd(0.0, phi)) * u_i(kept[r], kept[col]);
  }
  double leak = 0.0;
  for (int col = 0; col < 4; ++col) {
    double inside = 0.0;
    for (int r = 0; r < 4; ++r) inside += std::norm(u_i(kept[r], kept[col]));
    leak += 1.0 - inside;
  }
  report.leakage = leak / 4.0;
  report.infidelity = 1.0 - trace_fidelity(cnot_target(), u_cmp);
  return report;
}

double amplitude_instability_error(const PulseWaveform& pulse, double rel_sigma, int n_samples,
                                   unsigned long long seed, const SystemConstants& sys,
                                   const Matrix& target) {
  if (rel_sigma < 0.0) throw std::invalid_argument("rel_sigma must be >= 0");
  if (n_samples < 1) throw std::invalid_argument("n_samples must be >= 1");
  const Matrix g = resolve_target(target);
  double acc = 0.0;
  for (int i = 0; i < n_samples; ++i) {
    Rng rng(seed, static_cast<std::uint64_t>(i));
    const double scale = 1.0 + rel_sigma * rng.gaussian();
    PulseWaveform scaled = pulse;
    for (auto& piece : scaled.pieces) {
      piece.omega_r_khz *= scale;
      piece.omega_i_khz *= scale;
    }
    acc += 1.0 - std::norm(trace_overlap(g, pulse_propagator(scaled, {}, sys)));
  }
  return acc / n_samples;
}

PulseWaveform apply_distortion(const PulseWaveform& pulse, double time_constant_ns) {
  pulse.validate();
  if (time_constant_ns < 0.0) throw std::invalid_argument("time_constant must be >= 0");
  if (time_constant_ns == 0.0) return pulse;
  const double tau = time_constant_ns;
  PulseWaveform out;
  out.label = pulse.label.empty() ? "lowpass" : pulse.label + "|lowpass";
  double yr = 0.0, yi = 0.0;  // filter state, starts at rest
  for (const auto& piece : pulse.pieces) {
    const int n = std::max(1, static_cast<int>(std::ceil(piece.duration_ns / (tau / 10.0))));
    const double h = piece.duration_ns / n;
    for (int k = 0; k < n; ++k) {
      // Exact interval average of u + (y0 - u) e^{-s/tau} over [a, a+h].
      const double a = k * h;
      const double weight = tau / h * (std::exp(-a / tau) - std::exp(-(a + h) / tau));
      out.pieces.push_back({h, piece.omega_r_khz + (yr - piece.omega_r_khz) * weight,
                            piece.omega_i_khz + (yi - piece.omega_i_khz) * weight});
    }
    const double decay = std::exp(-piece.duration_ns / tau);
    yr = piece.omega_r_khz + (yr - piece.omega_r_khz) * decay;
    yi = piece.omega_i_khz + (yi - piece.omega_i_khz) * decay;
  }
  return out;
}

}  // namespace dcg
