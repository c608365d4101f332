#include "qch/statespace.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace qch {

InconsistentFamilyError::InconsistentFamilyError(double offdiag)
    : Error("family is inconsistent (max off-diagonal " + std::to_string(offdiag) +
            "); probabilities are not defined"),
      max_offdiag(offdiag) {}

StateSpace::StateSpace(std::vector<std::string> channels, std::vector<std::string> pols)
    : channels_(std::move(channels)), pols_(std::move(pols)) {}

SpacePtr StateSpace::make(std::vector<std::string> channels, bool polarized) {
  if (channels.empty()) throw InvalidArgument("state space needs at least one channel");
  std::set<std::string> seen;
  for (const auto& c : channels) {
    if (c.empty()) throw InvalidArgument("empty channel name");
    if (!seen.insert(c).second) throw InvalidArgument("duplicate channel name: " + c);
  }
  std::vector<std::string> pols =
      polarized ? std::vector<std::string>{"H", "V"} : std::vector<std::string>{"-"};
  return SpacePtr(new StateSpace(std::move(channels), std::move(pols)));
}

int StateSpace::find_channel(std::string_view name) const {
  for (int i = 0; i < num_channels(); ++i)
    if (channels_[i] == name) return i;
  return -1;
}

int StateSpace::channel(std::string_view name) const {
  int i = find_channel(name);
  if (i < 0) throw InvalidArgument("unknown channel: " + std::string(name));
  return i;
}

int StateSpace::pol(std::string_view name) const {
  for (int i = 0; i < num_pols(); ++i)
    if (pols_[i] == name) return i;
  throw InvalidArgument("unknown polarization: " + std::string(name));
}

std::string StateSpace::basis_label(int index) const {
  if (!polarized()) return channels_.at(basis_channel(index));
  return channels_.at(basis_channel(index)) + ":" + pols_.at(basis_pol(index));
}

bool same_space(const SpacePtr& a, const SpacePtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return a->channels() == b->channels() && a->num_pols() == b->num_pols();
}

// ---------------------------------------------------------------------------
// StateVector

StateVector::StateVector(SpacePtr space) : space_(std::move(space)) {
  if (!space_) throw InvalidArgument("null state space");
}

Complex StateVector::amplitude(int basis_index) const {
  auto it = amps_.find(basis_index);
  return it == amps_.end() ? Complex(0.0, 0.0) : it->second;
}

Complex StateVector::amplitude(std::string_view channel, std::string_view pol) const {
  return amplitude(space_->basis_index(space_->channel(channel), space_->pol(pol)));
}

void StateVector::set(int basis_index, Complex a) {
  if (basis_index < 0 || basis_index >= space_->dim())
    throw InvalidArgument("basis index out of range");
  if (a == Complex(0.0, 0.0))
    amps_.erase(basis_index);
  else
    amps_[basis_index] = a;
}

StateVector make_state(const SpacePtr& space,
                       const std::vector<std::pair<BasisVector, Complex>>& assignments) {
  StateVector s(space);
  std::set<int> seen;
  for (const auto& [bv, amp] : assignments) {
    if (bv.channel < 0 || bv.channel >= space->num_channels())
      throw InvalidArgument("channel index out of range");
    if (bv.pol < 0 || bv.pol >= space->num_pols())
      throw InvalidArgument("polarization index out of range");
    int idx = space->basis_index(bv.channel, bv.pol);
    if (!seen.insert(idx).second)
      throw InvalidArgument("duplicate basis vector: " + space->basis_label(idx));
    s.set(idx, amp);
  }
  return s;
}

StateVector make_state(const SpacePtr& space, const std::vector<Assignment>& assignments) {
  std::vector<std::pair<BasisVector, Complex>> resolved;
  resolved.reserve(assignments.size());
  for (const auto& a : assignments)
    resolved.push_back({BasisVector{space->channel(a.channel), space->pol(a.pol)}, a.amp});
  return make_state(space, resolved);
}

StateVector basis_state(const SpacePtr& space, std::string_view channel,
                        std::string_view pol) {
  StateVector s(space);
  s.set(space->basis_index(space->channel(channel), space->pol(pol)), Complex(1.0, 0.0));
  return s;
}

Complex inner_product(const StateVector& a, const StateVector& b) {
  if (!same_space(a.space(), b.space()))
    throw InvalidArgument("inner product across mismatched registries");
  const auto& small = a.amplitudes().size() <= b.amplitudes().size() ? a : b;
  const auto& large = a.amplitudes().size() <= b.amplitudes().size() ? b : a;
  Complex acc(0.0, 0.0);
  for (const auto& [idx, amp] : small.amplitudes()) {
    Complex other = large.amplitude(idx);
    if (&small == &a)
      acc += std::conj(amp) * other;
    else
      acc += std::conj(other) * amp;
  }
  return acc;
}

double norm_sq(const StateVector& s) {
  double acc = 0.0;
  for (const auto& [idx, amp] : s.amplitudes()) acc += std::norm(amp);
  return acc;
}

double norm(const StateVector& s) { return std::sqrt(norm_sq(s)); }

StateVector add(const StateVector& a, const StateVector& b) {
  if (!same_space(a.space(), b.space()))
    throw InvalidArgument("adding states over mismatched registries");
  StateVector r = a;
  for (const auto& [idx, amp] : b.amplitudes()) r.set(idx, r.amplitude(idx) + amp);
  return r;
}

StateVector scale(const StateVector& s, Complex factor) {
  StateVector r(s.space());
  for (const auto& [idx, amp] : s.amplitudes()) r.set(idx, factor * amp);
  return r;
}

bool approx_equal(const StateVector& a, const StateVector& b, double tol) {
  if (!same_space(a.space(), b.space())) return false;
  for (const auto& [idx, amp] : a.amplitudes())
    if (std::abs(amp - b.amplitude(idx)) > tol) return false;
  for (const auto& [idx, amp] : b.amplitudes())
    if (std::abs(amp - a.amplitude(idx)) > tol) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Projector

Projector::Projector(SpacePtr space, std::vector<char> support, std::string label)
    : space_(std::move(space)), support_(std::move(support)), label_(std::move(label)) {}

Projector Projector::zero(SpacePtr space) {
  std::vector<char> sup(space->dim(), 0);
  return Projector(std::move(space), std::move(sup), "0");
}

Projector Projector::identity(SpacePtr space) {
  std::vector<char> sup(space->dim(), 1);
  return Projector(std::move(space), std::move(sup), "I");
}

Projector Projector::on_support(SpacePtr space, const std::vector<int>& indices,
                                std::string label) {
  std::vector<char> sup(space->dim(), 0);
  for (int i : indices) {
    if (i < 0 || i >= space->dim()) throw InvalidArgument("basis index out of range");
    sup[i] = 1;
  }
  return Projector(std::move(space), std::move(sup), std::move(label));
}

Projector Projector::on_channels(SpacePtr space, const std::vector<std::string>& names,
                                 std::string label) {
  std::vector<char> sup(space->dim(), 0);
  std::string auto_label;
  for (const auto& name : names) {
    int c = space->channel(name);
    for (int p = 0; p < space->num_pols(); ++p) sup[space->basis_index(c, p)] = 1;
    if (!auto_label.empty()) auto_label += "+";
    auto_label += name;
  }
  if (label.empty()) label = auto_label;
  return Projector(std::move(space), std::move(sup), std::move(label));
}

Projector Projector::on_channel_pol(SpacePtr space, std::string_view ch,
                                    std::string_view pol, std::string label) {
  int c = space->channel(ch);
  int p = space->pol(pol);
  std::vector<char> sup(space->dim(), 0);
  sup[space->basis_index(c, p)] = 1;
  if (label.empty()) label = std::string(ch) + "x" + std::string(pol);
  return Projector(std::move(space), std::move(sup), std::move(label));
}

Projector Projector::on_pol(SpacePtr space, std::string_view pol, std::string label) {
  int p = space->pol(pol);
  std::vector<char> sup(space->dim(), 0);
  for (int c = 0; c < space->num_channels(); ++c) sup[space->basis_index(c, p)] = 1;
  if (label.empty()) label = "Ix" + std::string(pol);
  return Projector(std::move(space), std::move(sup), std::move(label));
}

int Projector::rank() const {
  int r = 0;
  for (char c : support_) r += (c != 0);
  return r;
}

Projector Projector::relabeled(std::string label) const {
  return Projector(space_, support_, std::move(label));
}

Projector Projector::complemented() const {
  std::vector<char> sup(support_.size());
  for (size_t i = 0; i < support_.size(); ++i) sup[i] = support_[i] ? 0 : 1;
  std::string label = label_.empty() ? std::string("~") : "~" + label_;
  if (label_ == "I") label = "0";
  if (label_ == "0") label = "I";
  return Projector(space_, std::move(sup), std::move(label));
}

bool Projector::disjoint(const Projector& other) const {
  for (size_t i = 0; i < support_.size(); ++i)
    if (support_[i] && other.support_[i]) return false;
  return true;
}

bool Projector::same_support(const Projector& other) const {
  return same_space(space_, other.space_) && support_ == other.support_;
}

bool Projector::covers(const Projector& finer) const {
  for (size_t i = 0; i < support_.size(); ++i)
    if (finer.support_[i] && !support_[i]) return false;
  return true;
}

Projector Projector::sum(const Projector& other) const {
  if (!same_space(space_, other.space_))
    throw InvalidArgument("projector sum across mismatched registries");
  if (!disjoint(other))
    throw InvalidArgument("projector sum requires disjoint supports");
  std::vector<char> sup(support_.size());
  for (size_t i = 0; i < support_.size(); ++i)
    sup[i] = (support_[i] || other.support_[i]) ? 1 : 0;
  return Projector(space_, std::move(sup), label_ + "+" + other.label_);
}

Projector complement(const Projector& p) { return p.complemented(); }

StateVector project(const Projector& p, const StateVector& s) {
  if (!same_space(p.space(), s.space()))
    throw InvalidArgument("projecting across mismatched registries");
  StateVector r(s.space());
  for (const auto& [idx, amp] : s.amplitudes())
    if (p.contains(idx)) r.set(idx, amp);
  return r;
}

// ---------------------------------------------------------------------------
// UnitaryMap

UnitaryMap::UnitaryMap(SpacePtr space, std::vector<Complex> m, std::string label)
    : space_(std::move(space)), dim_(space_->dim()), m_(std::move(m)),
      label_(std::move(label)) {}

UnitaryMap UnitaryMap::identity(SpacePtr space) {
  int d = space->dim();
  std::vector<Complex> m(static_cast<size_t>(d) * d, Complex(0.0, 0.0));
  for (int i = 0; i < d; ++i) m[static_cast<size_t>(i) * d + i] = Complex(1.0, 0.0);
  return UnitaryMap(std::move(space), std::move(m), "I");
}

UnitaryMap UnitaryMap::from_matrix(SpacePtr space, std::vector<Complex> row_major,
                                   std::string label) {
  int d = space->dim();
  if (row_major.size() != static_cast<size_t>(d) * d)
    throw InvalidArgument("matrix dimension mismatch");
  UnitaryMap u(std::move(space), std::move(row_major), std::move(label));
  double err = u.unitarity_error();
  if (err > kUnitaryTol)
    throw ValidationError("map '" + u.label_ + "' is not unitary (max entry of U*U - I = " +
                          std::to_string(err) + ")");
  return u;
}

double UnitaryMap::unitarity_error() const {
  // max entry of U†U - I
  double worst = 0.0;
  for (int i = 0; i < dim_; ++i) {
    for (int j = 0; j < dim_; ++j) {
      Complex acc(0.0, 0.0);
      for (int k = 0; k < dim_; ++k) acc += std::conj(at(k, i)) * at(k, j);
      if (i == j) acc -= Complex(1.0, 0.0);
      worst = std::max(worst, std::abs(acc));
    }
  }
  return worst;
}

UnitaryMap UnitaryMap::then(const UnitaryMap& next, std::string label) const {
  if (!same_space(space_, next.space_))
    throw InvalidArgument("composing unitaries over mismatched registries");
  std::vector<Complex> m(static_cast<size_t>(dim_) * dim_, Complex(0.0, 0.0));
  for (int i = 0; i < dim_; ++i)
    for (int k = 0; k < dim_; ++k) {
      Complex nik = next.at(i, k);
      if (nik == Complex(0.0, 0.0)) continue;
      for (int j = 0; j < dim_; ++j) m[static_cast<size_t>(i) * dim_ + j] += nik * at(k, j);
    }
  if (label.empty()) label = next.label_ + "*" + label_;
  return from_matrix(space_, std::move(m), std::move(label));
}

UnitaryMap UnitaryMap::relabeled(std::string label) const {
  return UnitaryMap(space_, m_, std::move(label));
}

double UnitaryMap::max_entry_diff(const UnitaryMap& other) const {
  if (!same_space(space_, other.space_))
    throw InvalidArgument("comparing unitaries over mismatched registries");
  double worst = 0.0;
  for (size_t i = 0; i < m_.size(); ++i)
    worst = std::max(worst, std::abs(m_[i] - other.m_[i]));
  return worst;
}

StateVector apply_unitary(const UnitaryMap& u, const StateVector& s) {
  if (!same_space(u.space(), s.space()))
    throw InvalidArgument("applying unitary over mismatched registries");
  int d = u.dim();
  std::vector<Complex> dense(d, Complex(0.0, 0.0));
  for (const auto& [j, amp] : s.amplitudes())
    for (int i = 0; i < d; ++i) dense[i] += u.at(i, j) * amp;
  StateVector r(s.space());
  for (int i = 0; i < d; ++i)
    if (dense[i] != Complex(0.0, 0.0)) r.set(i, dense[i]);
  return r;
}

}  // namespace qch
