#pragma once

#include <optional>
#include <stdexcept>

#include "nandwalk/formula.hpp"
#include "nandwalk/graphs.hpp"
#include "nandwalk/spectral.hpp"

namespace nandwalk {

/// (-1)^k / sqrt(L+1) on tail sites 2k, k = 0..L, where site 0 is the root.
StateVector psi_start_tail(const AugmentedGraph& g);

/// Spectral mass of the tail start state around eigenvalue 0 of the
/// pendant-bearing tail Hamiltonian. reference_mass is the zero-eigenvalue
/// weight; min_relevant_gap the smallest nonzero |lambda| it overlaps.
GapReport gap_report(const NandTree& tree, const Assignment& x, int tail_length, double zero_tol = 1e-10,
                     double orth_tol = 1e-8);

class BandAliasingError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct TailOptions {
  std::optional<double> precision;  // default 1 / (2 sqrt N)
  int bits = 10;
  std::uint64_t shots = 1000;
  std::uint64_t seed = 1;
  std::optional<double> step;  // evolution time per unitary; default pi / (1 + max |lambda|)
};

struct TailDecision {
  bool decision = false;
  PhaseEstimate estimate;
  double step = 0.0;
  double precision = 0.0;
  GapReport gap;
};

/// Phase estimation on exp(-iH step) from the tail start state; decides 0
/// iff the modal phase lies within precision * step of zero.
TailDecision decide_tail(const NandTree& tree, const Assignment& x, int tail_length, const TailOptions& options = {},
                         QueryLedger* ledger = nullptr);

/// Diagnostic only: probability of finding the evolved start state back in
/// the start state after time t.
double tail_survival_probability(const NandTree& tree, const Assignment& x, int tail_length, double t);

/// ceil(sqrt N), the default tail parameter for decisions.
int default_tail_length(int leaf_count);

}  // namespace nandwalk
