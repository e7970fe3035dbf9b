#include "dcg/bench.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <stdexcept>

#include <unsupported/Eigen/KroneckerProduct>

#include "dcg/fit.hpp"
#include "dcg/noise.hpp"

namespace dcg {

namespace {

bool same_up_to_phase(const Matrix& a, const Matrix& b) {
  return std::abs((a.adjoint() * b).trace()) / 2.0 > 1.0 - 1e-9;
}

const std::vector<std::string>& generator_labels() {
  static const std::vector<std::string> labels = {"X90", "Y90", "X-90", "Y-90"};
  return labels;
}

}  // namespace

Matrix clifford_generator(const std::string& label) {
  const SpinOperators sh = spin_operators(0.5);
  if (label == "X90") return expm_hermitian(sh.sx, kPi / 2.0);
  if (label == "Y90") return expm_hermitian(sh.sy, kPi / 2.0);
  if (label == "X-90") return expm_hermitian(sh.sx, -kPi / 2.0);
  if (label == "Y-90") return expm_hermitian(sh.sy, -kPi / 2.0);
  throw std::invalid_argument("unknown generator label: " + label);
}

const std::vector<CliffordElement>& clifford_table() {
  static const std::vector<CliffordElement> table = [] {
    std::vector<CliffordElement> out;
    out.push_back({0, {}, Matrix::Identity(2, 2)});
    std::deque<int> frontier = {0};
    while (!frontier.empty()) {
      const int cur = frontier.front();
      frontier.pop_front();
      for (const auto& label : generator_labels()) {
        const Matrix u = clifford_generator(label) * out[cur].u;
        const bool known = std::any_of(out.begin(), out.end(),
                                       [&](const auto& e) { return same_up_to_phase(e.u, u); });
        if (known) continue;
        CliffordElement e;
        e.index = static_cast<int>(out.size());
        e.decomposition = out[cur].decomposition;
        e.decomposition.push_back(label);
        e.u = u;
        out.push_back(std::move(e));
        frontier.push_back(out.back().index);
      }
    }
    if (out.size() != 24) throw std::logic_error("Clifford enumeration did not yield 24 elements");
    return out;
  }();
  return table;
}

RbSequence compile_rb_sequence(int m, std::optional<int> interleaved, std::uint64_t seed) {
  if (m < 1) throw std::invalid_argument("compile_rb_sequence: m must be >= 1");
  const auto& table = clifford_table();
  if (interleaved && (*interleaved < 0 || *interleaved >= 24))
    throw std::invalid_argument("compile_rb_sequence: bad interleaved index");

  RbSequence seq;
  seq.m = m;
  Rng rng(seed);
  Matrix composite = Matrix::Identity(2, 2);
  for (int i = 0; i < m; ++i) {
    const int idx = static_cast<int>(rng.next_u64() % 24);
    seq.gates.push_back(idx);
    composite = table[idx].u * composite;
    if (interleaved) {
      seq.gates.push_back(*interleaved);
      composite = table[*interleaved].u * composite;
    }
  }
  const Matrix inverse = composite.adjoint();
  for (const auto& e : table)
    if (same_up_to_phase(e.u, inverse)) {
      seq.gates.push_back(e.index);
      return seq;
    }
  throw std::logic_error("no recovery Clifford found (group not closed?)");
}

void KrausChannel::validate() const {
  if (ops.empty()) throw std::invalid_argument("KrausChannel: no operators");
  Matrix sum = Matrix::Zero(ops[0].rows(), ops[0].cols());
  for (const auto& k : ops) sum += k.adjoint() * k;
  if (max_abs(Matrix(sum - Matrix::Identity(sum.rows(), sum.cols()))) > 1e-10)
    throw std::invalid_argument("KrausChannel: not trace-preserving");
}

Matrix KrausChannel::apply(const Matrix& rho) const {
  Matrix out = Matrix::Zero(rho.rows(), rho.cols());
  for (const auto& k : ops) out += k * rho * k.adjoint();
  return out;
}

KrausChannel depolarizing_channel(double p_depol) {
  if (p_depol < 0.0 || p_depol > 1.0) throw std::invalid_argument("depolarizing: p in [0,1]");
  const SpinOperators sh = spin_operators(0.5);
  KrausChannel ch;
  ch.ops.push_back(std::sqrt(1.0 - 0.75 * p_depol) * Matrix::Identity(2, 2));
  // sqrt(p/4) sigma_k = sqrt(p) s_k since sigma = 2 s.
  for (const Matrix* s : {&sh.sx, &sh.sy, &sh.sz}) ch.ops.push_back(std::sqrt(p_depol) * (*s));
  return ch;
}

std::vector<SurvivalPoint> simulate_sequence_survival(std::span<const RbSequence> seqs,
                                                      const KrausChannel& channel, int shots,
                                                      std::uint64_t seed) {
  channel.validate();
  const auto& table = clifford_table();
  std::map<int, std::vector<double>> by_m;
  std::uint64_t stream = 0;
  for (const auto& seq : seqs) {
    Matrix rho = Matrix::Zero(2, 2);
    rho(0, 0) = 1.0;
    for (int idx : seq.gates) {
      rho = table[idx].u * rho * table[idx].u.adjoint();
      rho = channel.apply(rho);
    }
    double survival = std::clamp(rho(0, 0).real(), 0.0, 1.0);
    if (shots > 0) {
      Rng rng(seed, stream);
      int hits = 0;
      for (int s = 0; s < shots; ++s) hits += rng.uniform() < survival ? 1 : 0;
      survival = static_cast<double>(hits) / shots;
    }
    by_m[seq.m].push_back(survival);
    ++stream;
  }

  std::vector<SurvivalPoint> out;
  for (const auto& [m, vals] : by_m) {
    const double n = static_cast<double>(vals.size());
    double mean = 0.0;
    for (double v : vals) mean += v;
    mean /= n;
    double var = 0.0;
    for (double v : vals) var += (v - mean) * (v - mean);
    const double sem = vals.size() > 1 ? std::sqrt(var / (n - 1.0) / n) : 0.0;
    out.push_back({m, mean, sem});
  }
  return out;
}

RBDecayFit fit_rb_decay(std::span<const std::pair<double, double>> points) {
  std::vector<double> distinct;
  for (const auto& [m, s] : points)
    if (std::find(distinct.begin(), distinct.end(), m) == distinct.end()) distinct.push_back(m);
  if (distinct.size() < 4) throw std::invalid_argument("fit_rb_decay: need >= 4 distinct m");

  const auto residuals = [&](const Eigen::VectorXd& q) {
    Eigen::VectorXd r(static_cast<Eigen::Index>(points.size()));
    Eigen::Index i = 0;
    for (const auto& [m, s] : points) r[i++] = q[0] * std::pow(q[2], m) + q[1] - s;
    return r;
  };
  Eigen::VectorXd q0(3);
  q0 << 0.5, 0.5, 0.99;
  LmOptions opt;
  opt.lower = Eigen::VectorXd(3);
  opt.upper = Eigen::VectorXd(3);
  opt.lower << -2.0, -1.0, 0.0;
  opt.upper << 2.0, 2.0, 1.0;
  const LmResult fit = levenberg_marquardt(residuals, q0, opt);
  RBDecayFit out;
  out.a = fit.params[0];
  out.b = fit.params[1];
  out.p = fit.params[2];
  out.stderr_p = std::sqrt(std::max(0.0, fit.covariance(2, 2)));
  out.converged = fit.converged;
  return out;
}

double irb_gate_fidelity(double p_interleaved, double p_reference) {
  if (p_reference <= 0.0) throw std::invalid_argument("irb: reference decay must be positive");
  const double p_gate = p_interleaved / p_reference;
  return 1.0 - (1.0 - p_gate) / 2.0;
}

double srb_combine(double f_ide, double f_not) {
  if (f_ide < 0.0 || f_ide > 1.0 || f_not < 0.0 || f_not > 1.0)
    throw std::invalid_argument("srb_combine: fidelities must lie in [0,1]");
  const double s = std::sqrt(f_ide) + std::sqrt(f_not);
  return 0.25 * s * s;
}

BathFidelity bath_channel_fidelity(const Matrix& u_exp, const Matrix& u_target) {
  if (u_target.rows() != 4 || u_target.cols() != 4)
    throw std::invalid_argument("bath_channel_fidelity: target must be 4x4");
  const long dim = u_exp.rows();
  if (dim % 4 != 0 || u_exp.cols() != dim)
    throw std::invalid_argument("bath_channel_fidelity: dims inconsistent");
  const long d_b = dim / 4;
  if (d_b > 8) throw std::invalid_argument("bath_channel_fidelity: bath dim capped at 8");

  // Kraus blocks K_ij = <i|U_exp|j> / sqrt(d_b); average fidelity
  // (sum |Tr(U_t^dag K)|^2 + d) / (d^2 + d) with d = 4.
  double s = 0.0;
  for (long i = 0; i < d_b; ++i)
    for (long j = 0; j < d_b; ++j) {
      cd tr = 0.0;
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
          tr += std::conj(u_target(a, b)) * u_exp(a * d_b + i, b * d_b + j);
      s += std::norm(tr);
    }
  BathFidelity out;
  out.exact = (s / d_b + 4.0) / 20.0;
  const Matrix big_target =
      Eigen::kroneckerProduct(u_target, Matrix::Identity(d_b, d_b)).eval();
  out.approx = trace_fidelity(big_target, u_exp);
  return out;
}

BlochVector tomography_readout(const Matrix& rho) {
  validate_density(rho);
  const SpinOperators sh = spin_operators(0.5);
  const auto z_pop = [](const Matrix& r) { return r(0, 0).real() - r(1, 1).real(); };
  const Matrix ry = expm_hermitian(sh.sy, kPi / 2.0);
  const Matrix rx = expm_hermitian(sh.sx, kPi / 2.0);
  BlochVector v;
  v.z = z_pop(rho);
  v.x = -z_pop(Matrix(ry * rho * ry.adjoint()));  // pi_y/2 maps x onto -z
  v.y = z_pop(Matrix(rx * rho * rx.adjoint()));   // pi_x/2 maps y onto +z
  return v;
}

}  // namespace dcg
