#include "dcg/qcore.hpp"

#include <cmath>
#include <stdexcept>

namespace dcg {

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

bool is_hermitian(const Matrix& m, double tol) {
  const double scale = std::max(1.0, max_abs(m));
  return max_abs(m - m.adjoint()) <= tol * scale;
}

bool is_unitary(const Matrix& m, double tol) {
  const Matrix g = m.adjoint() * m;
  return max_abs(g - Matrix::Identity(m.rows(), m.cols())) <= tol;
}

void validate_density(const Matrix& rho) {
  if (rho.rows() != rho.cols()) throw std::invalid_argument("density matrix must be square");
  if (!is_hermitian(rho)) throw std::invalid_argument("density matrix not hermitian");
  if (std::abs(rho.trace() - cd(1.0)) > 1e-12)
    throw std::invalid_argument("density matrix trace != 1");
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-10)
    throw std::invalid_argument("density matrix not positive semidefinite");
}

Matrix expm_hermitian(const Matrix& h, double t_ns) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  const Eigen::VectorXd& lam = es.eigenvalues();
  Vector phases(lam.size());
  for (Eigen::Index i = 0; i < lam.size(); ++i)
    phases(i) = std::exp(cd(0.0, -lam(i) * t_ns));
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

SpinOperators spin_operators(double s) {
  if (s != 0.5 && s != 1.0) throw std::invalid_argument("unsupported spin quantum number");
  const int dim = static_cast<int>(std::lround(2.0 * s)) + 1;
  Matrix sp = Matrix::Zero(dim, dim);
  Matrix sz = Matrix::Zero(dim, dim);
  for (int i = 0; i < dim; ++i) {
    const double m = s - i;  // +s first
    sz(i, i) = m;
    if (i > 0) sp(i - 1, i) = std::sqrt(s * (s + 1.0) - m * (m + 1.0));
  }
  SpinOperators ops;
  ops.sz = sz;
  ops.sx = 0.5 * (sp + Matrix(sp.adjoint()));
  ops.sy = cd(0.0, -0.5) * (sp - Matrix(sp.adjoint()));
  return ops;
}

Matrix piecewise_propagator(std::span<const HamiltonianSegment> segments) {
  if (segments.empty()) throw std::invalid_argument("empty segment list");
  const Eigen::Index dim = segments[0].generator.rows();
  Matrix u = Matrix::Identity(dim, dim);
  for (const auto& seg : segments) {
    if (seg.duration_ns <= 0.0) throw std::invalid_argument("segment duration must be positive");
    if (seg.generator.rows() != dim || seg.generator.cols() != dim)
      throw std::invalid_argument("segment dimension mismatch");
    if (!is_hermitian(seg.generator)) throw std::invalid_argument("non-hermitian generator");
    u = expm_hermitian(seg.generator, seg.duration_ns) * u;
  }
  return u;
}

Matrix partial_trace(const Matrix& rho, const std::vector<int>& dims,
                     const std::vector<int>& keep) {
  long prod = 1;
  for (int d : dims) prod *= d;
  if (prod != rho.rows() || rho.rows() != rho.cols())
    throw std::invalid_argument("subsystem dims inconsistent with matrix size");

  const int n = static_cast<int>(dims.size());
  std::vector<bool> kept(n, false);
  for (int k : keep) {
    if (k < 0 || k >= n) throw std::invalid_argument("keep index out of range");
    kept[k] = true;
  }
  long dim_keep = 1, dim_tr = 1;
  for (int i = 0; i < n; ++i) (kept[i] ? dim_keep : dim_tr) *= dims[i];

  // strides of each subsystem in the full index (row-major tensor order)
  std::vector<long> stride(n, 1);
  for (int i = n - 2; i >= 0; --i) stride[i] = stride[i + 1] * dims[i + 1];

  // enumerate kept and traced multi-indices as flat offsets
  std::vector<long> keep_offsets(dim_keep, 0), tr_offsets(dim_tr, 0);
  {
    long reps = 1;
    for (int i = 0; i < n; ++i) {
      if (!kept[i]) continue;
      const long block = dim_keep / (reps * dims[i]);
      for (long j = 0; j < dim_keep; ++j) {
        const long idx = (j / block) % dims[i];
        keep_offsets[j] += idx * stride[i];
      }
      reps *= dims[i];
    }
    reps = 1;
    for (int i = 0; i < n; ++i) {
      if (kept[i]) continue;
      const long block = dim_tr / (reps * dims[i]);
      for (long j = 0; j < dim_tr; ++j) {
        const long idx = (j / block) % dims[i];
        tr_offsets[j] += idx * stride[i];
      }
      reps *= dims[i];
    }
  }

  Matrix out = Matrix::Zero(dim_keep, dim_keep);
  for (long a = 0; a < dim_keep; ++a)
    for (long b = 0; b < dim_keep; ++b) {
      cd sum = 0.0;
      for (long t = 0; t < dim_tr; ++t)
        sum += rho(keep_offsets[a] + tr_offsets[t], keep_offsets[b] + tr_offsets[t]);
      out(a, b) = sum;
    }
  return out;
}

double purity(const Matrix& rho) { return (rho * rho).trace().real(); }

double trace_fidelity(const Matrix& target, const Matrix& actual) {
  if (target.rows() != actual.rows() || target.cols() != actual.cols())
    throw std::invalid_argument("dimension mismatch");
  const double d = static_cast<double>(target.rows());
  return std::norm((target.adjoint() * actual).trace() / d);
}

}  // namespace dcg
