#pragma once

#include <span>
#include <vector>

#include "dcg/qcore.hpp"

namespace dcg {

// Free-electron gyromagnetic ratio (g ~= 2.0028) in kHz per gauss.
inline constexpr double kGammaEKhzPerGauss = 2802.495;

struct SystemConstants {
  double d_khz = 2869901.0;          // zero-field splitting
  double q_khz = -4945.8003;         // 14N quadrupole
  double a_par_n_khz = -2164.6714;   // 14N hyperfine, parallel
  double a_perp_n_khz = -2632.8;     // 14N hyperfine, transverse
  double gamma_ratio = -9113.77;     // gamma_e / gamma_N
  double b0_gauss = 510.0;
  double omega_c_khz = -546.67;      // signed 13C Larmor frequency
  double a_par_eff_khz = 2159.876;   // four-level effective coupling
  double t_gate_ns = 1500.0;

  double gamma_e_b0_khz() const { return kGammaEKhzPerGauss * b0_gauss; }
  double gamma_n_b0_khz() const { return gamma_e_b0_khz() / gamma_ratio; }
  // Shift compensating the negative determinant of the CNOT, 1/(4 T_gate).
  double omega_sh_khz() const { return 1e6 / (4.0 * t_gate_ns); }
};

struct CarbonSpin {
  double a_zz_khz = 0.0;
  double a_perp_khz = 0.0;  // sqrt(A_zx^2 + A_zy^2) >= 0
  double phi_rad = 0.0;     // azimuth: A_zx = a_perp cos(phi), A_zy = a_perp sin(phi)
};

// Nine-level lab-frame Hamiltonian on spin-1 (electron) x spin-1 (14N), rad/ns.
Matrix full_hamiltonian(const SystemConstants& c);

// Reduced four-level interaction-frame system Hamiltonian, rad/ns.
// Basis |e,n>: |0,+1>, |0,0>, |-1,+1>, |-1,0> (electron is the slow index);
// Sz = +1/2 <-> m_S = 0, Iz = +1/2 <-> m_I = +1, so m_I = 0 is drive-resonant.
Matrix interaction_hamiltonian(const SystemConstants& c);

// RWA control Omega_r Sx + Omega_i Sy on the electron factor, rad/ns.
Matrix control_hamiltonian(double omega_r_khz, double omega_i_khz);

// (x cos(w_C t) + y sin(w_C t) + z) Sz on the electron factor, rad/ns.
Matrix classical_noise_generator(double x_khz, double y_khz, double z_khz,
                                 double omega_c_khz, double t_ns);

// Joint generator of n <= 6 quantum 13C spins on system (x) bath, rad/ns:
// sum_i omega_C Iz_i + (Sz - I/2)(A_zx Ix + A_zy Iy + A_zz Iz)_i.
// Contains only bath + coupling terms; the caller adds the 4-level system part.
Matrix bath_joint_hamiltonian(const SystemConstants& c, std::span<const CarbonSpin> spins);

// Nine-level generator with the linearly polarized drive restored:
// full_hamiltonian + sqrt(2) (Omega_r cos(w_MW t) + Omega_i sin(w_MW t)) Sx(spin-1),
// scaled so the rotating-wave limit reproduces the four-level control.
Matrix lab_frame_drive(const SystemConstants& c, double omega_r_khz, double omega_i_khz,
                       double t_ns, double omega_mw_khz);

// Ideal CNOT in the four-level basis: flips the electron when m_I = 0.
Matrix cnot_target();

// pi/2 electron rotation about x, identity on the nucleus.
Matrix x90_target();

}  // namespace dcg
