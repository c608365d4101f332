#include "qch/histories.hpp"

#include <algorithm>
#include <cmath>

namespace qch {

namespace {

// Kets with squared norm below this are treated as exactly zero for Gram
// support purposes; their cross terms are below every tolerance in use.
constexpr double kKetZeroSq = 1e-26;

constexpr long kMaxHistories = 10'000'000;

}  // namespace

Decomposition Decomposition::of(std::vector<Projector> projectors) {
  if (projectors.empty()) throw InvalidArgument("decomposition needs at least one projector");
  const SpacePtr& space = projectors.front().space();
  for (size_t i = 0; i < projectors.size(); ++i) {
    if (!same_space(projectors[i].space(), space))
      throw InvalidArgument("decomposition mixes registries");
    for (size_t j = i + 1; j < projectors.size(); ++j)
      if (!projectors[i].disjoint(projectors[j]))
        throw InvalidArgument("overlapping projectors in decomposition: " +
                              projectors[i].label() + " vs " + projectors[j].label());
  }
  Projector covered = Projector::zero(space);
  for (const auto& p : projectors) covered = covered.sum(p);
  Decomposition d;
  d.flagged.assign(projectors.size(), 0);
  d.projectors = std::move(projectors);
  if (covered.rank() < space->dim()) {
    std::string label = "~(";
    for (size_t i = 0; i < d.projectors.size(); ++i) {
      if (i) label += "+";
      label += d.projectors[i].label();
    }
    label += ")";
    if (d.projectors.size() == 1) label = "~" + d.projectors.front().label();
    d.projectors.push_back(covered.complemented().relabeled(label));
    d.flagged.push_back(1);
  }
  return d;
}

Decomposition Decomposition::identity(const SpacePtr& space) {
  Decomposition d;
  d.projectors.push_back(Projector::identity(space));
  d.flagged.assign(1, 0);
  return d;
}

std::vector<std::string> Decomposition::validate() const {
  std::vector<std::string> issues;
  if (projectors.empty()) {
    issues.push_back("empty decomposition");
    return issues;
  }
  const SpacePtr& space = projectors.front().space();
  int total = 0;
  for (size_t i = 0; i < projectors.size(); ++i) {
    total += projectors[i].rank();
    for (size_t j = i + 1; j < projectors.size(); ++j)
      if (!projectors[i].disjoint(projectors[j]))
        issues.push_back("projectors overlap: " + projectors[i].label() + " vs " +
                         projectors[j].label());
  }
  if (issues.empty() && total < space->dim())
    issues.push_back("decomposition does not sum to identity (rank " +
                     std::to_string(total) + " of " + std::to_string(space->dim()) + ")");
  return issues;
}

long HistoryFamily::num_histories() const {
  long n = 1;
  for (const auto& slot : slots) {
    n *= slot.size();
    if (n > kMaxHistories) throw InvalidArgument("family too large to enumerate");
  }
  return n;
}

History HistoryFamily::history_at(long flat_index) const {
  History h;
  h.choices.assign(slots.size(), 0);
  for (int k = num_slots() - 1; k >= 0; --k) {
    h.choices[k] = static_cast<int>(flat_index % slots[k].size());
    flat_index /= slots[k].size();
  }
  return h;
}

long HistoryFamily::index_of(const History& h) const {
  if (static_cast<int>(h.choices.size()) != num_slots())
    throw InvalidArgument("history length does not match family");
  long idx = 0;
  for (int k = 0; k < num_slots(); ++k) {
    if (h.choices[k] < 0 || h.choices[k] >= slots[k].size())
      throw InvalidArgument("history choice out of range at slot " + std::to_string(k));
    idx = idx * slots[k].size() + h.choices[k];
  }
  return idx;
}

bool HistoryFamily::is_flagged(const History& h) const {
  for (int k = 0; k < num_slots(); ++k)
    if (slots[k].flagged[h.choices[k]]) return true;
  return false;
}

std::string HistoryFamily::history_label(const History& h) const {
  std::string label;
  for (int k = 0; k < num_slots(); ++k) {
    if (k) label += ",";
    label += slots[k].projectors[h.choices[k]].label();
  }
  return label;
}

StateVector chain_ket(const HistoryFamily& family, const History& h) {
  family.index_of(h);  // range checks
  StateVector s = family.initial;
  for (int k = 0; k < family.num_slots(); ++k) {
    s = apply_unitary(family.steps[k], s);
    s = project(family.slots[k].projectors[h.choices[k]], s);
  }
  return s;
}

std::vector<StateVector> chain_ket_stages(const HistoryFamily& family, const History& h) {
  family.index_of(h);
  std::vector<StateVector> stages;
  StateVector s = family.initial;
  for (int k = 0; k < family.num_slots(); ++k) {
    s = apply_unitary(family.steps[k], s);
    s = project(family.slots[k].projectors[h.choices[k]], s);
    stages.push_back(s);
  }
  return stages;
}

namespace {

// Depth-first chain-ket enumeration. A branch whose partial product already
// vanishes is pruned: every history extending it has a zero ket.
void enumerate_kets(const HistoryFamily& family, int slot, long prefix,
                    const StateVector& state, ConsistencyReport& report) {
  const StateVector stepped = apply_unitary(family.steps[slot], state);
  const Decomposition& d = family.slots[slot];
  for (int j = 0; j < d.size(); ++j) {
    StateVector branch = project(d.projectors[j], stepped);
    long idx = prefix * d.size() + j;
    if (norm_sq(branch) < kKetZeroSq) continue;
    if (slot + 1 == family.num_slots()) {
      report.norms[idx] = norm(branch);
      report.support.push_back(idx);
      report.kets.push_back(std::move(branch));
    } else {
      enumerate_kets(family, slot + 1, idx, branch, report);
    }
  }
}

}  // namespace

ConsistencyReport gram_matrix(const HistoryFamily& family, double tolerance) {
  if (family.num_slots() == 0) throw InvalidArgument("family has no slots");
  if (static_cast<int>(family.steps.size()) != family.num_slots())
    throw InvalidArgument("family has " + std::to_string(family.steps.size()) +
                          " steps for " + std::to_string(family.num_slots()) + " slots");
  ConsistencyReport report;
  report.tolerance = tolerance;
  report.num_histories = family.num_histories();
  report.norms.assign(report.num_histories, 0.0);
  report.flagged.assign(report.num_histories, 0);
  for (long i = 0; i < report.num_histories; ++i)
    report.flagged[i] = family.is_flagged(family.history_at(i)) ? 1 : 0;
  for (long i = 0; i < report.num_histories; ++i)
    if (!report.flagged[i]) ++report.unflagged_count;

  enumerate_kets(family, 0, 0, family.initial, report);

  const int n = static_cast<int>(report.support.size());
  report.gram.assign(static_cast<size_t>(n) * n, Complex(0.0, 0.0));
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      Complex g = inner_product(report.kets[i], report.kets[j]);
      report.gram[static_cast<size_t>(i) * n + j] = g;
      report.gram[static_cast<size_t>(j) * n + i] = std::conj(g);
      if (i == j) continue;
      double mag = std::abs(g);
      report.max_offdiag_full = std::max(report.max_offdiag_full, mag);
      if (!report.flagged[report.support[i]] && !report.flagged[report.support[j]])
        report.max_offdiag = std::max(report.max_offdiag, mag);
    }
  }
  for (int i = 0; i < n; ++i)
    if (!report.flagged[report.support[i]]) ++report.unflagged_nonzero;
  report.consistent = report.max_offdiag < tolerance;
  return report;
}

double history_probability(const HistoryFamily& family, const History& h,
                           double tolerance) {
  ConsistencyReport report = gram_matrix(family, tolerance);
  if (!report.consistent) throw InconsistentFamilyError(report.max_offdiag);
  double n = report.norms[family.index_of(h)];
  return n * n;
}

double event_probability(const HistoryFamily& family, int slot,
                         const std::vector<int>& projector_indices,
                         std::optional<int> final_condition, double tolerance) {
  if (slot < 0 || slot >= family.num_slots())
    throw InvalidArgument("event slot out of range");
  for (int j : projector_indices)
    if (j < 0 || j >= family.slots[slot].size())
      throw InvalidArgument("event projector index out of range");
  ConsistencyReport report = gram_matrix(family, tolerance);
  if (!report.consistent) throw InconsistentFamilyError(report.max_offdiag);
  auto predicate = [&](const History& h) {
    for (int j : projector_indices)
      if (h.choices[slot] == j) return true;
    return false;
  };
  return event_probability_where(family, report, predicate, final_condition);
}

double event_probability_where(const HistoryFamily& family, const ConsistencyReport& report,
                               const std::function<bool(const History&)>& predicate,
                               std::optional<int> final_condition) {
  const int last = family.num_slots() - 1;
  if (final_condition && (*final_condition < 0 || *final_condition >= family.slots[last].size()))
    throw InvalidArgument("final condition index out of range");
  double numer = 0.0;
  double denom = 0.0;
  for (size_t i = 0; i < report.support.size(); ++i) {
    long idx = report.support[i];
    History h = family.history_at(idx);
    if (final_condition && h.choices[last] != *final_condition) continue;
    double p = report.norms[idx] * report.norms[idx];
    denom += p;
    if (predicate(h)) numer += p;
  }
  if (!final_condition) return numer;
  if (denom < 1e-30) throw InvalidArgument("zero conditioning mass");
  return numer / denom;
}

HistoryFamily refine_slot(const HistoryFamily& family, int slot, Decomposition finer) {
  if (slot < 0 || slot >= family.num_slots())
    throw InvalidArgument("refine slot out of range");
  auto issues = finer.validate();
  if (!issues.empty()) throw InvalidArgument("invalid decomposition: " + issues.front());
  const Decomposition& coarse = family.slots[slot];
  for (const auto& p : finer.projectors) {
    bool nested = false;
    for (const auto& q : coarse.projectors)
      if (q.covers(p)) {
        nested = true;
        break;
      }
    if (!nested)
      throw InvalidArgument("refinement projector " + p.label() +
                            " does not lie inside a single coarse projector");
  }
  HistoryFamily refined = family;
  refined.slots[slot] = std::move(finer);
  return refined;
}

std::vector<std::string> validate_family(const HistoryFamily& family) {
  std::vector<std::string> issues;
  const SpacePtr& space = family.initial.space();
  if (family.steps.size() != family.slots.size())
    issues.push_back("step count " + std::to_string(family.steps.size()) +
                     " does not match slot count " + std::to_string(family.slots.size()));
  double n = norm(family.initial);
  if (n > 1.0 + kAmpTol)
    issues.push_back("initial state norm " + std::to_string(n) + " exceeds 1");
  for (size_t k = 0; k < family.steps.size(); ++k) {
    if (!same_space(family.steps[k].space(), space))
      issues.push_back("step " + std::to_string(k + 1) + " uses a different registry");
    double err = family.steps[k].unitarity_error();
    if (err > kUnitaryTol)
      issues.push_back("step " + std::to_string(k + 1) + " is not unitary (" +
                       std::to_string(err) + ")");
  }
  for (size_t k = 0; k < family.slots.size(); ++k) {
    for (const auto& p : family.slots[k].projectors)
      if (!same_space(p.space(), space))
        issues.push_back("slot " + std::to_string(k + 1) + " uses a different registry");
    for (const auto& issue : family.slots[k].validate())
      issues.push_back("slot " + std::to_string(k + 1) + ": " + issue);
  }
  return issues;
}

}  // namespace qch
