#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dcg/qcore.hpp"

namespace dcg {

// Single-qubit Clifford as a minimal product of pi/2 rotations about +-x, +-y.
struct CliffordElement {
  int index = 0;
  std::vector<std::string> decomposition;  // labels from {X90, Y90, X-90, Y-90}
  Matrix u;                                // 2x2 unitary (phase canonical per table)
};

// The 24 elements, BFS-minimal decompositions; mean length is exactly 13/6.
const std::vector<CliffordElement>& clifford_table();

// Generator unitary for a decomposition label.
Matrix clifford_generator(const std::string& label);

struct RbSequence {
  int m = 0;               // number of random Cliffords
  std::vector<int> gates;  // table indices in application order, recovery last
};

// m uniform random Cliffords (each followed by `interleaved` if set) closed by
// the recovery element mapping the ideal composite to identity.
RbSequence compile_rb_sequence(int m, std::optional<int> interleaved, std::uint64_t seed);

// Trace-preserving noise applied after each ideal Clifford.
struct KrausChannel {
  std::vector<Matrix> ops;  // sum K^dag K = I
  void validate() const;
  Matrix apply(const Matrix& rho) const;
};

KrausChannel depolarizing_channel(double p_depol);  // rho -> (1-p) rho + p I/2

struct SurvivalPoint {
  int m = 0;            // number of random Cliffords (recovery excluded)
  double mean = 0.0;    // mean |0> population over sequences
  double sem = 0.0;
};

// Applies ideal Cliffords + channel to |0><0| per sequence; groups by m.
// shots > 0 adds binomial sampling noise, shots = 0 is exact.
std::vector<SurvivalPoint> simulate_sequence_survival(std::span<const RbSequence> seqs,
                                                      const KrausChannel& channel, int shots,
                                                      std::uint64_t seed);

struct RBDecayFit {
  double a = 0.0;
  double b = 0.0;
  double p = 1.0;
  double stderr_p = 0.0;
  bool converged = false;

  // Average gate fidelity per Clifford, 1 - (1-p)/2 for a qubit.
  double fidelity_per_clifford() const { return 1.0 - (1.0 - p) / 2.0; }
};

// Least squares of A p^m + B over (m, survival).
RBDecayFit fit_rb_decay(std::span<const std::pair<double, double>> points);

// IRB: gate fidelity from the interleaved/reference decay ratio.
double irb_gate_fidelity(double p_interleaved, double p_reference);

// F_CNOT = 1/4 (sqrt(F_Ide) + sqrt(F_NOT))^2.
double srb_combine(double f_ide, double f_not);

struct BathFidelity {
  double exact = 0.0;   // state-averaged channel fidelity
  double approx = 0.0;  // |Tr((U_t x I)^dag U_exp)|^2 / (4 d_b)^2
};

// u_exp acts on system (x) bath (bath dim 2^n, n <= 3 for the exact average),
// u_target on the 4-level system alone.
BathFidelity bath_channel_fidelity(const Matrix& u_exp, const Matrix& u_target);

struct BlochVector {
  double x = 0.0, y = 0.0, z = 0.0;
  double purity() const { return 0.5 * (1.0 + x * x + y * y + z * z); }
};

// Bloch components via the three readout settings (identity, pi/2 about y,
// pi/2 about x before a Z-population readout).
BlochVector tomography_readout(const Matrix& rho);

}  // namespace dcg
