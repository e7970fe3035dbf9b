#include "doctest.h"

#include <Eigen/Eigenvalues>

#include "dcg/ddspec.hpp"
#include "dcg/model.hpp"
#include "oracles.hpp"

using namespace dcg;

namespace {

// Product-basis energies of the nine-level Hamiltonian, assigned by dominant
// eigenvector component; index = 3 (1 - m_S) + (1 - m_I), values in kHz.
std::array<double, 9> product_energies(const Matrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  std::array<double, 9> out{};
  std::array<bool, 9> taken{};
  for (int k = 0; k < 9; ++k) {
    int best = -1;
    double best_w = 0.0;
    for (int i = 0; i < 9; ++i) {
      const double w = std::norm(es.eigenvectors()(i, k));
      if (!taken[i] && w > best_w) {
        best_w = w;
        best = i;
      }
    }
    REQUIRE(best_w > 0.5);
    taken[best] = true;
    out[best] = es.eigenvalues()(k) / kKhzToRadNs;
  }
  return out;
}

}  // namespace

TEST_CASE("full Hamiltonian reproduces the effective four-level coupling") {
  const SystemConstants sys;
  const Matrix h = full_hamiltonian(sys);
  REQUIRE(h.rows() == 9);
  CHECK(is_hermitian(h));
  const auto e = product_energies(h);
  // Double difference across the worked manifolds isolates the conditional
  // nuclear splitting; Zeeman and quadrupole terms cancel.
  const double a_eff = (e[3] - e[4]) - (e[6] - e[7]);
  CHECK(std::abs(std::abs(a_eff) - sys.a_par_eff_khz) < 1.0);
}

TEST_CASE("interaction Hamiltonian is the shifted conditional splitting") {
  const SystemConstants sys;
  const Matrix h = interaction_hamiltonian(sys);
  REQUIRE(h.rows() == 4);
  CHECK(is_hermitian(h));
  CHECK(max_abs(h - Matrix(h.diagonal().asDiagonal())) < 1e-15);
  const double a = sys.a_par_eff_khz * kKhzToRadNs;
  const double sh = sys.omega_sh_khz() * kKhzToRadNs;
  CHECK(std::abs(h(0, 0).real() - a / 2) < 1e-15);
  CHECK(std::abs(h(1, 1).real() + sh) < 1e-15);
  CHECK(std::abs(h(2, 2).real() + a / 2) < 1e-15);
  CHECK(std::abs(h(3, 3).real() + sh) < 1e-15);
  // Shift trace fixes det(U(T_gate)) = -1.
  const cd det = expm_hermitian(h, sys.t_gate_ns).determinant();
  CHECK(std::abs(det - cd(-1.0, 0.0)) < 1e-10);
}

TEST_CASE("control and noise generators act on the electron factor") {
  const Matrix hc = control_hamiltonian(1000.0, -400.0);
  CHECK(is_hermitian(hc));
  // Electron-major basis: control couples (0,2) and (1,3) identically.
  CHECK(std::abs(hc(0, 2) - hc(1, 3)) < 1e-15);
  CHECK(max_abs(Matrix(hc.diagonal().asDiagonal())) < 1e-15);
  CHECK(std::abs(hc(0, 1)) < 1e-15);

  const SystemConstants sys;
  const Matrix hn0 = classical_noise_generator(30.0, 40.0, 20.0, sys.omega_c_khz, 0.0);
  CHECK(is_hermitian(hn0));
  // At t = 0 only x and z contribute: (x + z) Sz.
  CHECK(std::abs(hn0(0, 0).real() - 0.5 * 50.0 * kKhzToRadNs) < 1e-15);
  CHECK(std::abs(hn0(2, 2).real() + 0.5 * 50.0 * kKhzToRadNs) < 1e-15);
}

TEST_CASE("joint bath Hamiltonian conditions the nuclear frequency") {
  const SystemConstants sys;
  const CarbonSpin spin{43.0, 28.0, 1.1};
  const Matrix h = bath_joint_hamiltonian(sys, std::vector<CarbonSpin>{spin});
  REQUIRE(h.rows() == 8);
  CHECK(is_hermitian(h));
  // m_S = 0 rows (electron index 0, 1): bare Larmor +-w_C/2.
  // m_S = -1 rows (electron index 2, 3): conditioned +-w_1/2.
  const auto cf = conditional_frequencies(spin, sys.omega_c_khz, -1);
  for (int e = 0; e < 4; ++e) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(h.block(2 * e, 2 * e, 2, 2));
    const double expect = (e < 2 ? std::abs(sys.omega_c_khz) : cf.omega1_khz) * kKhzToRadNs;
    CHECK(std::abs(es.eigenvalues()(1) - expect / 2) < 1e-10);
    CHECK(std::abs(es.eigenvalues()(0) + expect / 2) < 1e-10);
  }
  // No block off-diagonal coupling between electron states.
  for (int e1 = 0; e1 < 4; ++e1)
    for (int e2 = 0; e2 < 4; ++e2)
      if (e1 != e2) CHECK(max_abs(h.block(2 * e1, 2 * e2, 2, 2)) < 1e-16);
}

TEST_CASE("targets have the pinned matrix elements") {
  const Matrix cnot = cnot_target();
  CHECK(std::abs(cnot(0, 0) - cd(1, 0)) < 1e-15);
  CHECK(std::abs(cnot(2, 2) - cd(1, 0)) < 1e-15);
  CHECK(std::abs(cnot(1, 3) - cd(1, 0)) < 1e-15);
  CHECK(std::abs(cnot(3, 1) - cd(1, 0)) < 1e-15);
  CHECK(std::abs(cnot.determinant() - cd(-1, 0)) < 1e-14);
  CHECK(is_unitary(x90_target()));
}

TEST_CASE("lab frame drive restores the linearly polarized control") {
  const SystemConstants sys;
  const double w_mw = 2865000.0;
  const Matrix h0 = lab_frame_drive(sys, 500.0, 0.0, 0.0, w_mw);
  CHECK(is_hermitian(h0));
  // cos(0) = 1: difference from the bare Hamiltonian is sqrt(2) Omega_r Sx.
  const Matrix diff = h0 - full_hamiltonian(sys);
  const auto e_ops = spin_operators(1.0);
  Matrix sx9 = Matrix::Zero(9, 9);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      sx9.block(3 * i, 3 * j, 3, 3) = e_ops.sx(i, j) * Matrix::Identity(3, 3);
  CHECK(max_abs(diff - std::sqrt(2.0) * 500.0 * kKhzToRadNs * sx9) < 1e-14);
  // Quarter period of the drive: the cosine term vanishes.
  const double t_quarter = 0.25e6 / w_mw;
  CHECK(max_abs(lab_frame_drive(sys, 500.0, 0.0, t_quarter, w_mw) - full_hamiltonian(sys)) <
        1e-9);
}
