#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "nandwalk/discrete_reflections.hpp"
#include "nandwalk/formula.hpp"
#include "nandwalk/graphs.hpp"
#include "nandwalk/spectral.hpp"

namespace nandwalk {

enum class CoinedVariant { LongTail, ShortTail };
std::string_view to_string(CoinedVariant v);

struct CoinedWalk {
  EdgeStateSpace space;
  Eigen::MatrixXd coin;   // block diagonal over vertices
  Eigen::MatrixXd shift;  // swaps the two states of every edge
  Eigen::MatrixXd walk;   // shift * coin
  CoinedVariant variant = CoinedVariant::LongTail;
  int leaf_count = 0;
};

/// Coin state at tail vertex 1 of the short-tail walk, as (left, right)
/// amplitudes: (sqrt(1 - 1/sqrt N), N^(-1/4)).
struct ShortTailCoin {
  int leaf_count = 0;
  Eigen::Vector2d state;
};
ShortTailCoin short_tail_coin(int leaf_count);

/// Tail of 2L sites. Coins: identity at the end of the tail, (-1)^x at
/// leaves, Grover diffusion about the uniform direction state elsewhere.
CoinedWalk build_coined_walk(const NandTree& tree, const Assignment& x, int tail_length);

/// Two tail sites; vertex 1 reflects about the ShortTailCoin state and
/// vertex 2 keeps the identity coin.
CoinedWalk build_short_tail_walk(const NandTree& tree, const Assignment& x);

/// Long tail: the alternating standing wave over the tail edges, an exact
/// eigenvalue-i state of the tail dynamics. Short tail: the single state at
/// tail vertex 2.
StateVector coined_start(const CoinedWalk& walk);
StateVector psi_start_coined(const CoinedWalk& walk);

/// Decides 0 iff the start state's mass with |Re lambda| <= re_threshold
/// exceeds mass_threshold.
WalkDecision decide_coined(const CoinedWalk& walk, const StateVector& start, double re_threshold,
                           double mass_threshold = 0.5, const QpeSettings& qpe = {}, QueryLedger* ledger = nullptr);

struct ClusterOverlap {
  double mass = 0.0;      // ||Pi psi||^2 for the projector onto the cluster
  double distance = 0.0;  // ||v - psi|| for the best unit eigenvector v in the cluster
  int size = 0;           // eigenvalues in the cluster
};

/// Spectral mass of `start` on the eigenvalues within `radius` of `target`.
ClusterOverlap eigenvalue_cluster_overlap(const CoinedWalk& walk, const StateVector& start,
                                          std::complex<double> target, double radius);

/// Largest distance between the phase-sorted spectra of S C and C S.
double ordering_spectrum_gap(const CoinedWalk& walk);

struct CoinedCalibration {
  double re_threshold = 0.0;    // half the smallest F=1 |Re lambda|
  double mass_threshold = 0.5;  // 1/2, or half the smallest F=0 mass when calibrated
  double min_gap = 0.0;
  double min_zero_mass = 0.0;
  int instances = 0;
};

CoinedCalibration calibrate_coined(CoinedVariant variant, const NandTree& tree, const std::vector<Assignment>& inputs,
                                   int tail_length, bool calibrate_mass);

CoinedWalk build_walk(CoinedVariant variant, const NandTree& tree, const Assignment& x, int tail_length);

/// 2 ceil(sqrt N).
int default_coined_tail_length(int leaf_count);

}  // namespace nandwalk
