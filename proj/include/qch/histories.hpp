#pragma once
//
// Consistent-histories engine. A family is an initial state, one step
// unitary per time interval and one projective decomposition per time
// t1..tn. Each history picks one projector per slot; its chain ket is
//
//     |K> = P_n U_n ... P_2 U_2 P_1 U_1 |initial>
//
// The extended Born rule assigns a history probability |K|^2 once all chain
// kets are mutually orthogonal (the consistency condition).
//
// Decompositions given as a partial list of projectors are completed with
// the complement of their union. Completion projectors are flagged, and the
// consistency verdict is taken over the unflagged histories only: the
// families analysed here are stated modulo branches that are known to be
// irrelevant (wrong initial channel, photon lost to a detector), and those
// omitted branches need not be orthogonal among themselves. The full-family
// maximum is still computed and reported alongside.
//

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qch/statespace.hpp"

namespace qch {

struct Decomposition {
  std::vector<Projector> projectors;
  std::vector<char> flagged;  // parallel to projectors; completion entries

  // Validates pairwise disjointness and appends the flagged complement of
  // the union when the listed projectors do not already sum to identity.
  static Decomposition of(std::vector<Projector> projectors);
  static Decomposition identity(const SpacePtr& space);

  int size() const { return static_cast<int>(projectors.size()); }
  std::vector<std::string> validate() const;  // empty means well-formed
};

struct History {
  std::vector<int> choices;  // one projector index per slot
};

struct HistoryFamily {
  StateVector initial;
  std::vector<UnitaryMap> steps;
  std::vector<Decomposition> slots;  // one per time t1..tn

  int num_slots() const { return static_cast<int>(slots.size()); }
  long num_histories() const;
  History history_at(long flat_index) const;
  long index_of(const History& h) const;
  bool is_flagged(const History& h) const;
  std::string history_label(const History& h) const;
};

StateVector chain_ket(const HistoryFamily& family, const History& h);
// Partial products: state after (P_k U_k) for k = 1..n.
std::vector<StateVector> chain_ket_stages(const HistoryFamily& family, const History& h);

struct ConsistencyReport {
  double tolerance = kAmpTol;
  long num_histories = 0;

  // Indexed by flat history index.
  std::vector<double> norms;
  std::vector<char> flagged;

  // Chain kets with norm above the zero threshold, with their Gram matrix;
  // all other kets vanish and are orthogonal to everything.
  std::vector<long> support;            // flat indices
  std::vector<StateVector> kets;        // parallel to support
  std::vector<Complex> gram;            // row-major over support
  Complex gram_at(int i, int j) const { return gram[static_cast<size_t>(i) * support.size() + j]; }

  double max_offdiag = 0.0;       // over unflagged history pairs
  double max_offdiag_full = 0.0;  // over all history pairs
  bool consistent = false;        // max_offdiag < tolerance

  long unflagged_count = 0;
  long unflagged_nonzero = 0;
};

ConsistencyReport gram_matrix(const HistoryFamily& family, double tolerance = kAmpTol);

// Both throw InconsistentFamilyError when the family fails consistency.
double history_probability(const HistoryFamily& family, const History& h,
                           double tolerance = kAmpTol);
// Probability that the slot's outcome lies in `projector_indices`; with
// `final_condition` set, conditional on that final-slot outcome.
double event_probability(const HistoryFamily& family, int slot,
                         const std::vector<int>& projector_indices,
                         std::optional<int> final_condition = std::nullopt,
                         double tolerance = kAmpTol);

// As above for an arbitrary history predicate; used for unions of events
// across slots. The report must come from the same family.
double event_probability_where(const HistoryFamily& family, const ConsistencyReport& report,
                               const std::function<bool(const History&)>& predicate,
                               std::optional<int> final_condition = std::nullopt);

// Replaces one slot with a finer decomposition. Every new projector must lie
// inside one of the slot's existing projectors (identity slots cover
// everything). Coarse chain kets equal the sum of their refinements.
HistoryFamily refine_slot(const HistoryFamily& family, int slot, Decomposition finer);

// Diagnostic: names non-orthogonal or incomplete slots, non-unitary steps,
// dimension mismatches. Empty list means well-formed.
std::vector<std::string> validate_family(const HistoryFamily& family);

}  // namespace qch
