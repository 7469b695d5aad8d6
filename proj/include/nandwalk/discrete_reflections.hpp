#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "nandwalk/formula.hpp"
#include "nandwalk/graphs.hpp"
#include "nandwalk/spectral.hpp"

namespace nandwalk {

struct PaddedInstance {
  NandTree tree;
  Assignment x;
  bool padded = false;
};

/// Gives every leaf at odd depth a single NAND child reading the negated
/// input. NAND of one input is NOT, so the formula value is unchanged, while
/// every leaf of the result sits at even depth. Without this the root of an
/// odd-depth tree is pinned to zero in every kernel vector of the
/// pendant-free tail graph and the walk cannot tell inputs apart.
PaddedInstance pad_parity(const NandTree& tree, const Assignment& x);

class AmbiguousKernelError : public std::runtime_error {
 public:
  AmbiguousKernelError(double below, double above);
  double below() const { return below_; }
  double above() const { return above_; }

 private:
  double below_;
  double above_;
};

struct ReflectionPair {
  PaddedInstance instance;  // the tree and input the operators are built on
  AugmentedGraph graph;     // pendant-free tail graph: the basis
  Eigen::MatrixXd kernel;   // orthonormal basis of ker(H_tree)
  Eigen::MatrixXd u_tree;   // 2 Pi_0 - I
  Eigen::VectorXd u_input;  // diagonal: -1 on leaves reading 1
  Eigen::MatrixXd u;        // u_input * u_tree

  Eigen::MatrixXd input_matrix() const { return u_input.asDiagonal(); }
};

/// Eigenvalues with |lambda| <= kernel_tol count as kernel. Throws
/// AmbiguousKernelError when eigenvalues sit within two decades of the
/// tolerance on either side. Odd-depth leaves are padded first unless `pad`
/// is false.
ReflectionPair build_reflections(const NandTree& tree, const Assignment& x, int tail_length, double kernel_tol = 1e-10,
                                 bool pad = true);

/// psi_start of the tail construction on the pair's basis.
StateVector reflection_start(const ReflectionPair& pair);

struct QpeSettings {
  int bits = 8;
  std::uint64_t shots = 64;
  std::uint64_t seed = 1;
};

struct WalkDecision {
  bool decision = false;
  GapReport gap;
  PhaseEstimate estimate;  // sampled phase estimation mirroring the decision
};

/// Decides 0 iff the start state's spectral mass with |phase| <= threshold
/// exceeds 1/2. Phase estimation is also sampled and charged to the ledger.
WalkDecision decide_reflections(const ReflectionPair& pair, const StateVector& start, double phase_threshold,
                                const QpeSettings& qpe = {}, QueryLedger* ledger = nullptr);

struct ProjectionEntry {
  double marked_norm = 0.0;  // ||P1 v|| for a unit kernel vector v
  double overlap = 0.0;      // |<v|psi_start>|^2
};

struct ProjectionBoundReport {
  std::vector<ProjectionEntry> entries;  // relevant kernel vectors only
  std::optional<double> epsilon;         // min marked_norm over entries
  double phase_gap = 0.0;                // min |phase| of U over relevant eigenvectors
  double chord_gap = 0.0;                // min |lambda - 1| over the same
  bool holds = true;                     // phase_gap >= epsilon - 1e-6
};

/// Phase-gap bound check for F = 1 inputs. The kernel of H_tree is expressed in the
/// eigenbasis of K^T P1 K (P1 projects onto marked leaves); a basis vector
/// is relevant when its squared overlap with the start state exceeds
/// orth_tol.
ProjectionBoundReport projection_bound_check(const ReflectionPair& pair, const StateVector& start,
                                             double orth_tol = 1e-8);

struct PhaseCalibration {
  double threshold = 0.0;  // half the smallest F=1 phase gap
  double min_gap = 0.0;
  int instances = 0;
};

/// Runs the F = 1 members of `inputs` and sets the phase threshold.
PhaseCalibration calibrate_phase_threshold(const NandTree& tree, const std::vector<Assignment>& inputs,
                                           int tail_length);

/// 2 ceil(sqrt N).
int default_reflection_tail_length(int leaf_count);

}  // namespace nandwalk
