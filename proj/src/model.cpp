#include "dcg/model.hpp"

#include <cmath>
#include <stdexcept>

#include <unsupported/Eigen/KroneckerProduct>

namespace dcg {

namespace {

Matrix kron(const Matrix& a, const Matrix& b) {
  return Eigen::kroneckerProduct(a, b).eval();
}

Matrix identity(int d) { return Matrix::Identity(d, d); }

}  // namespace

Matrix full_hamiltonian(const SystemConstants& c) {
  const SpinOperators s1 = spin_operators(1.0);
  const Matrix i3 = identity(3);
  const double d = c.d_khz * kKhzToRadNs;
  const double ge_b0 = c.gamma_e_b0_khz() * kKhzToRadNs;
  const double q = c.q_khz * kKhzToRadNs;
  const double gn_b0 = c.gamma_n_b0_khz() * kKhzToRadNs;
  const double a_par = c.a_par_n_khz * kKhzToRadNs;
  const double a_perp = c.a_perp_n_khz * kKhzToRadNs;

  Matrix h = d * kron(s1.sz * s1.sz, i3) + ge_b0 * kron(s1.sz, i3);
  h += q * kron(i3, s1.sz * s1.sz) + gn_b0 * kron(i3, s1.sz);
  h += a_par * kron(s1.sz, s1.sz);
  h += a_perp * (kron(s1.sx, s1.sx) + kron(s1.sy, s1.sy));
  return h;
}

Matrix interaction_hamiltonian(const SystemConstants& c) {
  if (c.t_gate_ns <= 0.0) throw std::invalid_argument("T_gate must be positive");
  const SpinOperators sh = spin_operators(0.5);
  const Matrix i2 = identity(2);
  const double a = c.a_par_eff_khz * kKhzToRadNs;
  const double w_sh = c.omega_sh_khz() * kKhzToRadNs;
  Matrix h = a * kron(sh.sz, Matrix(sh.sz + 0.5 * i2));
  h += w_sh * kron(i2, Matrix(sh.sz - 0.5 * i2));
  return h;
}

Matrix control_hamiltonian(double omega_r_khz, double omega_i_khz) {
  const SpinOperators sh = spin_operators(0.5);
  const Matrix i2 = identity(2);
  return kron(Matrix(omega_r_khz * kKhzToRadNs * sh.sx + omega_i_khz * kKhzToRadNs * sh.sy), i2);
}

Matrix classical_noise_generator(double x_khz, double y_khz, double z_khz,
                                 double omega_c_khz, double t_ns) {
  const double wc = omega_c_khz * kKhzToRadNs;
  const double coeff =
      (x_khz * std::cos(wc * t_ns) + y_khz * std::sin(wc * t_ns) + z_khz) * kKhzToRadNs;
  const SpinOperators sh = spin_operators(0.5);
  return kron(Matrix(coeff * sh.sz), identity(2));
}

Matrix bath_joint_hamiltonian(const SystemConstants& c, std::span<const CarbonSpin> spins) {
  const int n = static_cast<int>(spins.size());
  if (n > 6) throw std::invalid_argument("too many bath spins (dimension cap)");
  const long dim_bath = 1L << n;
  const long dim = 4 * dim_bath;
  const SpinOperators sh = spin_operators(0.5);
  const Matrix sz_e = kron(sh.sz, identity(2));  // electron Sz on the 4-level system

  // Coupling acts through Sz - I/2 = diag(0, -1) on (m_S = 0, m_S = -1): the
  // m_S = 0 manifold sees pure Larmor precession and the gate manifold sees the
  // full hyperfine vector, so conditioned nuclear blocks have eigenvalues
  // +-omega0/2 and +-omega1/2 exactly.
  const Matrix coupler = Matrix(sz_e - 0.5 * identity(4));
  Matrix h = Matrix::Zero(dim, dim);
  for (int i = 0; i < n; ++i) {
    const CarbonSpin& sp = spins[i];
    const double wc = c.omega_c_khz * kKhzToRadNs;
    const double azx = sp.a_perp_khz * std::cos(sp.phi_rad) * kKhzToRadNs;
    const double azy = sp.a_perp_khz * std::sin(sp.phi_rad) * kKhzToRadNs;
    const double azz = sp.a_zz_khz * kKhzToRadNs;

    const Matrix left = identity(1L << i);
    const Matrix right = identity(1L << (n - 1 - i));
    auto embed = [&](const Matrix& op) { return kron(kron(left, op), right); };

    h += wc * kron(identity(4), embed(sh.sz));
    h += kron(coupler, embed(Matrix(azx * sh.sx + azy * sh.sy + azz * sh.sz)));
  }
  return h;
}

Matrix lab_frame_drive(const SystemConstants& c, double omega_r_khz, double omega_i_khz,
                       double t_ns, double omega_mw_khz) {
  const SpinOperators s1 = spin_operators(1.0);
  const double w_mw = omega_mw_khz * kKhzToRadNs;
  // sqrt(2) linear amplitude: the co-rotating half times the 1/sqrt(2) spin-1
  // Sx element reproduces the four-level control's Omega/2 coupling.
  const double amp = std::sqrt(2.0) *
                     (omega_r_khz * std::cos(w_mw * t_ns) + omega_i_khz * std::sin(w_mw * t_ns)) *
                     kKhzToRadNs;
  return full_hamiltonian(c) + amp * kron(s1.sx, identity(3));
}

Matrix cnot_target() {
  Matrix u = Matrix::Zero(4, 4);
  u(0, 0) = 1.0;  // |0,+1>
  u(2, 2) = 1.0;  // |-1,+1>
  u(1, 3) = 1.0;  // flip electron in m_I = 0
  u(3, 1) = 1.0;
  return u;
}

Matrix x90_target() {
  const SpinOperators sh = spin_operators(0.5);
  return kron(expm_hermitian(sh.sx, kPi / 2.0), identity(2));
}

}  // namespace dcg
