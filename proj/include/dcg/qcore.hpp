#pragma once

#include <Eigen/Dense>
#include <complex>
#include <numbers>
#include <span>
#include <vector>

namespace dcg {

using cd = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr double kPi = std::numbers::pi;

// Configuration and I/O carry plain frequencies in kHz and times in ns;
// generators are angular frequency in rad/ns. All conversions happen here.
inline constexpr double kKhzToRadNs = 2.0 * kPi * 1e-6;
inline constexpr double kUsToNs = 1e3;

struct HamiltonianSegment {
  double duration_ns;
  Matrix generator;  // hermitian, rad/ns
};

double max_abs(const Matrix& m);
bool is_hermitian(const Matrix& m, double tol = 1e-12);
bool is_unitary(const Matrix& m, double tol = 1e-10);
void validate_density(const Matrix& rho);

// exp(-i h t) for hermitian h, via eigendecomposition.
Matrix expm_hermitian(const Matrix& h, double t_ns);

// Spin operators in the Sz eigenbasis ordered (+s, ..., -s); s in {1/2, 1}.
struct SpinOperators {
  Matrix sx, sy, sz;
};
SpinOperators spin_operators(double s);

// U = exp(-i H_n t_n) ... exp(-i H_1 t_1); later segments multiply on the left.
Matrix piecewise_propagator(std::span<const HamiltonianSegment> segments);

Matrix partial_trace(const Matrix& rho, const std::vector<int>& dims,
                     const std::vector<int>& keep);

double purity(const Matrix& rho);

// |Tr(target^dag actual)/d|^2; invariant under global phase of either side.
double trace_fidelity(const Matrix& target, const Matrix& actual);

}  // namespace dcg
