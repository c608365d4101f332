#pragma once
//
// Labeled finite-dimensional complex state space: a fixed registry of
// channels times a polarization factor ({H,V}, or the single sentinel "-"
// for polarization-free circuits). On top of it: sparse state vectors,
// basis-diagonal projectors and dense unitaries.
//
// All values are immutable after construction and all operations are pure,
// so everything here is safe to share across threads.
//

#include <complex>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qch {

using Complex = std::complex<double>;

// Zero threshold for amplitudes and Gram entries.
inline constexpr double kAmpTol = 1e-10;
// Max-entry threshold for |U†U - I|.
inline constexpr double kUnitaryTol = 1e-12;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Caller-side mistakes: unknown channels, duplicate assignments, parameters
// outside their domain.
struct InvalidArgument : Error {
  using Error::Error;
};

// A constructed object failed its own validity check (non-unitary step,
// broken dark port). Signals a circuit-construction bug, not bad user input.
struct ValidationError : Error {
  using Error::Error;
};

// Probability query against a family whose chain kets are not mutually
// orthogonal; the offending off-diagonal magnitude is carried along.
struct InconsistentFamilyError : Error {
  explicit InconsistentFamilyError(double offdiag);
  double max_offdiag;
};

class StateSpace;
using SpacePtr = std::shared_ptr<const StateSpace>;

class StateSpace {
public:
  // Channel names must be unique. polarized=true gives the {H,V} factor.
  static SpacePtr make(std::vector<std::string> channels, bool polarized);

  int num_channels() const { return static_cast<int>(channels_.size()); }
  int num_pols() const { return static_cast<int>(pols_.size()); }
  int dim() const { return num_channels() * num_pols(); }
  bool polarized() const { return pols_.size() == 2; }

  const std::vector<std::string>& channels() const { return channels_; }
  const std::string& channel_name(int c) const { return channels_.at(c); }
  const std::string& pol_name(int p) const { return pols_.at(p); }

  int channel(std::string_view name) const;       // throws InvalidArgument
  int find_channel(std::string_view name) const;  // -1 when absent
  int pol(std::string_view name) const;

  int basis_index(int channel, int pol) const { return channel * num_pols() + pol; }
  int basis_channel(int index) const { return index / num_pols(); }
  int basis_pol(int index) const { return index % num_pols(); }
  std::string basis_label(int index) const;  // "A:H", or "A" when unpolarized

private:
  StateSpace(std::vector<std::string> channels, std::vector<std::string> pols);
  std::vector<std::string> channels_;
  std::vector<std::string> pols_;
};

// Registries match when they are the same object or carry identical labels.
bool same_space(const SpacePtr& a, const SpacePtr& b);

struct BasisVector {
  int channel = 0;
  int pol = 0;
};

// Sparse amplitudes keyed by basis index; exact zeros are dropped.
class StateVector {
public:
  explicit StateVector(SpacePtr space);

  const SpacePtr& space() const { return space_; }
  const std::map<int, Complex>& amplitudes() const { return amps_; }

  Complex amplitude(int basis_index) const;
  Complex amplitude(std::string_view channel, std::string_view pol = "-") const;
  void set(int basis_index, Complex a);

private:
  SpacePtr space_;
  std::map<int, Complex> amps_;
};

struct Assignment {
  std::string channel;
  std::string pol;  // "-" in polarization-free spaces
  Complex amp;
};

// Exactly the listed amplitudes; no normalization. Duplicate basis vectors
// and unknown channels are rejected.
StateVector make_state(const SpacePtr& space,
                       const std::vector<std::pair<BasisVector, Complex>>& assignments);
StateVector make_state(const SpacePtr& space, const std::vector<Assignment>& assignments);
StateVector basis_state(const SpacePtr& space, std::string_view channel,
                        std::string_view pol = "-");

// Conjugate-linear in the first argument.
Complex inner_product(const StateVector& a, const StateVector& b);
double norm_sq(const StateVector& s);
double norm(const StateVector& s);

StateVector add(const StateVector& a, const StateVector& b);
StateVector scale(const StateVector& s, Complex factor);
bool approx_equal(const StateVector& a, const StateVector& b, double tol = kAmpTol);

// Orthogonal projection onto a subset of the product basis. Restricting to
// basis-diagonal projectors keeps orthogonality and complement checks exact
// set operations; every projector in the two interferometer models is of
// this form.
class Projector {
public:
  static Projector zero(SpacePtr space);
  static Projector identity(SpacePtr space);
  static Projector on_support(SpacePtr space, const std::vector<int>& indices,
                              std::string label = "");
  // All polarizations of the listed channels.
  static Projector on_channels(SpacePtr space, const std::vector<std::string>& names,
                               std::string label = "");
  static Projector on_channel_pol(SpacePtr space, std::string_view ch,
                                  std::string_view pol, std::string label = "");
  static Projector on_pol(SpacePtr space, std::string_view pol, std::string label = "");

  const SpacePtr& space() const { return space_; }
  bool contains(int basis_index) const { return support_[basis_index] != 0; }
  const std::vector<char>& support() const { return support_; }
  int rank() const;
  const std::string& label() const { return label_; }
  Projector relabeled(std::string label) const;

  Projector complemented() const;
  bool disjoint(const Projector& other) const;
  bool same_support(const Projector& other) const;
  bool covers(const Projector& finer) const;  // finer.support ⊆ this->support
  Projector sum(const Projector& other) const;  // requires disjoint supports

private:
  Projector(SpacePtr space, std::vector<char> support, std::string label);
  SpacePtr space_;
  std::vector<char> support_;
  std::string label_;
};

Projector complement(const Projector& p);
StateVector project(const Projector& p, const StateVector& s);

// Dense complex matrix over the full basis, validated unitary on
// construction (max entry of U†U - I below kUnitaryTol).
class UnitaryMap {
public:
  static UnitaryMap identity(SpacePtr space);
  static UnitaryMap from_matrix(SpacePtr space, std::vector<Complex> row_major,
                                std::string label = "");

  const SpacePtr& space() const { return space_; }
  int dim() const { return dim_; }
  Complex at(int row, int col) const { return m_[static_cast<size_t>(row) * dim_ + col]; }
  const std::string& label() const { return label_; }

  // this applied first, then next: result = next * this.
  UnitaryMap then(const UnitaryMap& next, std::string label = "") const;
  UnitaryMap relabeled(std::string label) const;
  double unitarity_error() const;
  double max_entry_diff(const UnitaryMap& other) const;

private:
  UnitaryMap(SpacePtr space, std::vector<Complex> m, std::string label);
  SpacePtr space_;
  int dim_;
  std::vector<Complex> m_;
  std::string label_;
};

StateVector apply_unitary(const UnitaryMap& u, const StateVector& s);

}  // namespace qch
