#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "nandwalk/discrete_reflections.hpp"
#include "oracles.hpp"

using namespace nandwalk;

namespace {

std::vector<Assignment> all_inputs(int n) {
  std::vector<Assignment> out;
  for (std::uint64_t i = 0; i < (1u << n); ++i) out.push_back(Assignment::from_index(i, n));
  return out;
}

}  // namespace

TEST_CASE("reflections are involutions and U is orthogonal") {
  const NandTree t = full_binary_tree(2);
  for (const auto& x : all_inputs(4)) {
    const ReflectionPair p = build_reflections(t, x, 4);
    const auto n = p.u.rows();
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
    CHECK((p.u_tree * p.u_tree - id).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK((p.u_tree - p.u_tree.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((p.input_matrix() * p.input_matrix() - id).cwiseAbs().maxCoeff() == 0.0);
    CHECK((p.u.transpose() * p.u - id).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK((p.kernel.transpose() * p.kernel - Eigen::MatrixXd::Identity(p.kernel.cols(), p.kernel.cols()))
              .cwiseAbs()
              .maxCoeff() <= 1e-10);
    CHECK((adjacency_matrix(p.graph).real() * p.kernel).cwiseAbs().maxCoeff() <= 1e-9);
  }
}

TEST_CASE("input reflection marks exactly the leaves reading one") {
  const NandTree t = full_binary_tree(2);
  const Assignment x = Assignment::from_string("1100");
  const ReflectionPair p = build_reflections(t, x, 2);
  CHECK_FALSE(p.instance.padded);
  for (int i = 0; i < p.graph.dimension(); ++i) {
    const VertexId& v = p.graph.vertices()[static_cast<std::size_t>(i)];
    double expected = 1.0;
    for (int var = 0; var < 4; ++var)
      if (v == VertexId::tree(t.leaves()[static_cast<std::size_t>(var)]) && x[var]) expected = -1.0;
    CHECK(p.u_input(i) == expected);
  }
  const ReflectionPair zero = build_reflections(t, Assignment::constant(4, false), 2);
  CHECK((zero.u - zero.u_tree).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("parity padding preserves the formula") {
  for (int d : {1, 3}) {
    const NandTree t = full_binary_tree(d);
    for (const auto& x : all_inputs(t.leaf_count())) {
      const PaddedInstance p = pad_parity(t, x);
      CHECK(p.padded);
      CHECK(evaluate(p.tree, p.x) == evaluate(t, x));
      CHECK(p.tree.leaf_count() == t.leaf_count());
      for (int leaf : p.tree.leaves()) CHECK(p.tree.depth_of(leaf) % 2 == 0);
    }
  }
  const PaddedInstance even = pad_parity(full_binary_tree(2), Assignment::from_string("0110"));
  CHECK_FALSE(even.padded);
  CHECK(even.x == Assignment::from_string("0110"));
}

TEST_CASE("reflection walk decides every small instance") {
  for (int d = 1; d <= 2; ++d) {
    const NandTree t = full_binary_tree(d);
    const auto inputs = all_inputs(t.leaf_count());
    const int tail = default_reflection_tail_length(t.leaf_count());
    const PhaseCalibration cal = calibrate_phase_threshold(t, inputs, tail);
    CHECK(cal.threshold == doctest::Approx(cal.min_gap / 2));
    CHECK(cal.instances > 0);
    for (const auto& x : inputs) {
      const ReflectionPair p = build_reflections(t, x, tail);
      QueryLedger ledger;
      const WalkDecision w = decide_reflections(p, reflection_start(p), cal.threshold, {}, &ledger);
      CHECK_MESSAGE(w.decision == evaluate(t, x), x.to_string());
      CHECK(ledger.count() == 64u * 255u);
      if (!evaluate(t, x)) CHECK(w.gap.reference_mass > 0.5);
    }
  }
}

TEST_CASE("x = 1010 has a +1 eigenvector overlapping the start") {
  const NandTree t = full_binary_tree(2);
  const ReflectionPair p = build_reflections(t, Assignment::from_string("1010"), 4);
  const StateVector start = reflection_start(p);
  const SpectralDecomposition d = eig_unitary(p.u.cast<std::complex<double>>());
  double mass = 0;
  const Eigen::VectorXd w = overlap_weights(d, start);
  for (Eigen::Index j = 0; j < w.size(); ++j)
    if (std::abs(d.eigenvalues(j) - 1.0) < 1e-8) mass += w(j);
  CHECK(mass > 0.5);
}

TEST_CASE("spectrum is closed under conjugation") {
  const NandTree t = full_binary_tree(2);
  const ReflectionPair p = build_reflections(t, Assignment::from_string("0111"), 3);
  const Eigen::VectorXd ph = eig_unitary(p.u.cast<std::complex<double>>()).phases();
  std::vector<double> a(ph.data(), ph.data() + ph.size());
  std::vector<double> b;
  for (double x : a) b.push_back(std::abs(x) > std::numbers::pi - 1e-9 ? x : -x);
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(std::abs(a[i]) - std::abs(b[i])) <= 1e-8);
}

TEST_CASE("projection bound") {
  for (int d = 1; d <= 2; ++d) {
    const NandTree t = full_binary_tree(d);
    for (const auto& x : all_inputs(t.leaf_count())) {
      const ReflectionPair p = build_reflections(t, x, default_reflection_tail_length(t.leaf_count()));
      if (!evaluate(t, x)) {
        CHECK_THROWS_AS(projection_bound_check(p, reflection_start(p)), std::invalid_argument);
        continue;
      }
      const ProjectionBoundReport r = projection_bound_check(p, reflection_start(p));
      CHECK_MESSAGE(r.holds, x.to_string());
      REQUIRE(r.epsilon.has_value());
      CHECK(*r.epsilon > 0.0);
      CHECK(r.phase_gap >= *r.epsilon - 1e-6);
      CHECK(r.chord_gap == doctest::Approx(2 * std::sin(r.phase_gap / 2)).epsilon(1e-6));
    }
  }
}

TEST_CASE("ambiguous kernels are refused") {
  CHECK_THROWS_AS(build_reflections(full_binary_tree(2), Assignment::from_string("1010"), 2, 0.5),
                  AmbiguousKernelError);
}
