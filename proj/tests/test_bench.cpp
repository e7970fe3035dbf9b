#include "doctest.h"

#include <cmath>
#include <set>
#include <vector>

#include "dcg/bench.hpp"
#include "dcg/qcore.hpp"

using namespace dcg;

namespace {

bool phase_equal(const Matrix& a, const Matrix& b) {
  return std::abs(std::abs((a.adjoint() * b).trace()) / a.rows() - 1.0) < 1e-9;
}

}  // namespace

TEST_CASE("clifford table: 24 distinct elements, closed, mean length 13/6") {
  const auto& table = clifford_table();
  REQUIRE(table.size() == 24);
  int total_len = 0;
  for (const auto& c : table) {
    CHECK(is_unitary(c.u));
    total_len += static_cast<int>(c.decomposition.size());
    // Decomposition reproduces the element up to phase.
    Matrix u = Matrix::Identity(2, 2);
    for (const auto& label : c.decomposition) u = clifford_generator(label) * u;
    CHECK(phase_equal(u, c.u));
  }
  CHECK(total_len * 6 == 13 * 24);  // mean 13/6 exactly
  // Pairwise distinct up to phase.
  for (size_t i = 0; i < table.size(); ++i)
    for (size_t j = i + 1; j < table.size(); ++j)
      CHECK(!phase_equal(table[i].u, table[j].u));
  // Closure: every product lands back in the table.
  for (size_t i = 0; i < table.size(); ++i)
    for (size_t j = 0; j < table.size(); ++j) {
      const Matrix prod = table[i].u * table[j].u;
      int hits = 0;
      for (const auto& c : table) hits += phase_equal(prod, c.u);
      CHECK(hits == 1);
    }
}

TEST_CASE("rb sequences close to the identity") {
  for (int m : {1, 4, 11}) {
    const auto seq = compile_rb_sequence(m, std::nullopt, 1234 + m);
    CHECK(seq.m == m);
    REQUIRE(seq.gates.size() == static_cast<size_t>(m + 1));
    Matrix u = Matrix::Identity(2, 2);
    for (int g : seq.gates) u = clifford_table()[g].u * u;
    CHECK(phase_equal(u, Matrix::Identity(2, 2)));
  }
  // Interleaved: the named gate follows each random Clifford.
  const auto seq = compile_rb_sequence(5, 7, 99);
  REQUIRE(seq.gates.size() == 11);
  for (int i = 1; i < 10; i += 2) CHECK(seq.gates[i] == 7);
  Matrix u = Matrix::Identity(2, 2);
  for (int g : seq.gates) u = clifford_table()[g].u * u;
  CHECK(phase_equal(u, Matrix::Identity(2, 2)));
}

TEST_CASE("depolarizing channel is trace preserving and correctly mixing") {
  const auto ch = depolarizing_channel(0.1);
  CHECK_NOTHROW(ch.validate());
  Matrix rho = Matrix::Zero(2, 2);
  rho(0, 0) = 1.0;
  const Matrix out = ch.apply(rho);
  CHECK(std::abs(out.trace().real() - 1.0) < 1e-14);
  CHECK(std::abs(out(0, 0).real() - 0.95) < 1e-14);  // 1 - p/2
  CHECK_THROWS(KrausChannel{{Matrix::Identity(2, 2) * 0.5}}.validate());
}

TEST_CASE("exact survival follows the depolarizing decay law") {
  const double p_depol = 0.02;
  std::vector<RbSequence> seqs;
  for (int m : {1, 3, 6, 10, 17})
    for (int r = 0; r < 8; ++r) seqs.push_back(compile_rb_sequence(m, std::nullopt, 1000 + 31 * m + r));
  const auto points = simulate_sequence_survival(seqs, depolarizing_channel(p_depol), 0, 1);
  REQUIRE(points.size() == 5);
  std::vector<std::pair<double, double>> fit_pts;
  for (const auto& pt : points) {
    // Channel after each of the m + 1 ideal gates: 1/2 + (1-p)^{m+1}/2.
    const double expect = 0.5 + 0.5 * std::pow(1.0 - p_depol, pt.m + 1);
    CHECK(std::abs(pt.mean - expect) < 1e-12);
    CHECK(pt.sem < 1e-12);
    fit_pts.emplace_back(pt.m, pt.mean);
  }
  const auto fit = fit_rb_decay(fit_pts);
  CHECK(fit.converged);
  CHECK(std::abs(fit.p - (1.0 - p_depol)) < 1e-9);
  CHECK(std::abs(fit.fidelity_per_clifford() - (1.0 - p_depol / 2)) < 1e-9);
}

TEST_CASE("shot sampling adds binomial scatter around the exact law") {
  std::vector<RbSequence> seqs;
  for (int r = 0; r < 40; ++r) seqs.push_back(compile_rb_sequence(10, std::nullopt, 7 * r + 3));
  const auto pts = simulate_sequence_survival(seqs, depolarizing_channel(0.02), 500, 4);
  REQUIRE(pts.size() == 1);
  const double expect = 0.5 + 0.5 * std::pow(0.98, 11);
  CHECK(std::abs(pts[0].mean - expect) < 0.02);
  CHECK(pts[0].sem > 0.0);
}

TEST_CASE("irb and srb combination formulas") {
  CHECK(irb_gate_fidelity(0.992, 0.996) ==
        doctest::Approx(1.0 - (1.0 - 0.992 / 0.996) / 2).epsilon(1e-12));
  CHECK(srb_combine(0.99, 0.99) == doctest::Approx(0.99).epsilon(1e-12));
  const double f = srb_combine(0.98, 0.995);
  CHECK(f > 0.98);
  CHECK(f < 0.995);
}

TEST_CASE("bath channel fidelity is exact for factorized evolution") {
  const Matrix u_t = cd(0, 1) * Matrix::Identity(4, 4);  // phase-shifted identity target
  // Bath unitary acting alone leaves the system channel perfect.
  Matrix u_b(2, 2);
  const double th = 0.77;
  u_b << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
  Matrix joint = Matrix::Zero(8, 8);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) joint(a * 2 + i, b * 2 + j) = u_t(a, b) * u_b(i, j);
  const auto bf = bath_channel_fidelity(joint, u_t);
  CHECK(std::abs(bf.exact - 1.0) < 1e-12);
  // The approximate fidelity discards the bath rotation and dips below.
  CHECK(bf.approx <= bf.exact + 1e-12);
  CHECK(std::abs(bf.approx - std::pow(std::abs(2 * std::cos(th)) / 2.0, 2.0)) < 1e-12);
  // Identity bath: both agree at 1.
  Matrix joint_id = Matrix::Zero(8, 8);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int i = 0; i < 2; ++i) joint_id(a * 2 + i, b * 2 + i) = u_t(a, b);
  const auto bf_id = bath_channel_fidelity(joint_id, u_t);
  CHECK(std::abs(bf_id.exact - 1.0) < 1e-12);
  CHECK(std::abs(bf_id.approx - 1.0) < 1e-12);
}

TEST_CASE("tomography readout recovers cardinal states") {
  Vector zero(2), plus(2), plus_i(2);
  zero << 1, 0;
  plus << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
  plus_i << 1 / std::sqrt(2.0), cd(0, 1) / std::sqrt(2.0);
  const auto bz = tomography_readout(zero * zero.adjoint());
  CHECK(std::abs(bz.z - 1.0) < 1e-12);
  CHECK(std::abs(bz.x) < 1e-12);
  CHECK(std::abs(bz.y) < 1e-12);
  const auto bx = tomography_readout(plus * plus.adjoint());
  CHECK(std::abs(bx.x - 1.0) < 1e-12);
  const auto by = tomography_readout(plus_i * plus_i.adjoint());
  CHECK(std::abs(by.y - 1.0) < 1e-12);
  CHECK(std::abs(by.purity() - 1.0) < 1e-12);
}
