#include "qch/devices.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <set>

namespace qch {

namespace {

std::vector<Complex> identity_matrix(int d) {
  std::vector<Complex> m(static_cast<size_t>(d) * d, Complex(0.0, 0.0));
  for (int i = 0; i < d; ++i) m[static_cast<size_t>(i) * d + i] = Complex(1.0, 0.0);
  return m;
}

// Completes an injective partial map on basis indices to a permutation by
// closing each open chain source -> ... -> tail with the edge tail -> source.
// Our circuits only ever occupy a chain's deepest slot after its final use,
// so the closing edge never moves amplitude.
std::vector<int> complete_permutation(const std::map<int, int>& partial, int dim) {
  std::set<int> targets;
  for (const auto& [src, tgt] : partial) {
    if (!targets.insert(tgt).second)
      throw InvalidArgument("non-injective routing (two sources share a target)");
  }
  std::vector<int> perm(dim);
  for (int i = 0; i < dim; ++i) perm[i] = i;
  for (const auto& [src, tgt] : partial) perm[src] = tgt;
  // chain heads: sources that are not targets of any hop
  for (const auto& [src, tgt] : partial) {
    (void)tgt;
    if (targets.count(src)) continue;
    int cursor = src;
    while (partial.count(cursor)) cursor = partial.at(cursor);
    if (cursor != src) perm[cursor] = src;
  }
  std::vector<int> seen(dim, 0);
  for (int i = 0; i < dim; ++i) seen[perm[i]] += 1;
  for (int i = 0; i < dim; ++i)
    if (seen[i] != 1) throw InvalidArgument("routing does not close into a permutation");
  return perm;
}

UnitaryMap permutation_unitary(const SpacePtr& space, const std::map<int, int>& partial,
                               std::string label) {
  int d = space->dim();
  std::vector<int> perm = complete_permutation(partial, d);
  std::vector<Complex> m(static_cast<size_t>(d) * d, Complex(0.0, 0.0));
  for (int j = 0; j < d; ++j) m[static_cast<size_t>(perm[j]) * d + j] = Complex(1.0, 0.0);
  return UnitaryMap::from_matrix(space, std::move(m), std::move(label));
}

}  // namespace

UnitaryMap beam_splitter_unitary(const SpacePtr& space, double theta,
                                 std::string_view port_a, std::string_view port_b,
                                 BsConvention convention) {
  if (!(std::abs(theta) <= std::numbers::pi / 2 + 1e-12))
    throw InvalidArgument("beam splitter angle outside [-pi/2, pi/2]");
  if (port_a == port_b) throw InvalidArgument("beam splitter ports must differ");
  int a = space->channel(port_a);
  int b = space->channel(port_b);
  int d = space->dim();
  auto m = identity_matrix(d);
  double c = std::cos(theta);
  double s = std::sin(theta);
  Complex cross = convention == BsConvention::Rotation ? Complex(s, 0.0) : Complex(0.0, s);
  Complex back = convention == BsConvention::Rotation ? Complex(-s, 0.0) : Complex(0.0, s);
  for (int p = 0; p < space->num_pols(); ++p) {
    int ia = space->basis_index(a, p);
    int ib = space->basis_index(b, p);
    m[static_cast<size_t>(ia) * d + ia] = Complex(c, 0.0);
    m[static_cast<size_t>(ib) * d + ia] = cross;  // a -> b
    m[static_cast<size_t>(ia) * d + ib] = back;   // b -> a
    m[static_cast<size_t>(ib) * d + ib] = Complex(c, 0.0);
  }
  return UnitaryMap::from_matrix(space, std::move(m),
                                 "BS(" + std::string(port_a) + "," + std::string(port_b) + ")");
}

UnitaryMap polarization_rotator_unitary(const SpacePtr& space, double theta,
                                        const std::vector<std::string>& channels) {
  if (!space->polarized())
    throw InvalidArgument("polarization rotator in a polarization-free space");
  int d = space->dim();
  auto m = identity_matrix(d);
  double c = std::cos(theta);
  double s = std::sin(theta);
  int h = space->pol("H");
  int v = space->pol("V");
  for (const auto& name : channels) {
    int ch = space->channel(name);
    int ih = space->basis_index(ch, h);
    int iv = space->basis_index(ch, v);
    // H -> cosθ·H + sinθ·V,  V -> -sinθ·H + cosθ·V
    m[static_cast<size_t>(ih) * d + ih] = Complex(c, 0.0);
    m[static_cast<size_t>(iv) * d + ih] = Complex(s, 0.0);
    m[static_cast<size_t>(ih) * d + iv] = Complex(-s, 0.0);
    m[static_cast<size_t>(iv) * d + iv] = Complex(c, 0.0);
  }
  return UnitaryMap::from_matrix(space, std::move(m), "PR");
}

UnitaryMap pbs_unitary(const SpacePtr& space, const std::vector<PbsRoute>& routes) {
  std::map<int, int> partial;
  for (const auto& r : routes) {
    int src = space->basis_index(space->channel(r.channel), space->pol(r.pol));
    int tgt = space->basis_index(space->channel(r.target), space->pol(r.pol));
    if (src == tgt) continue;
    if (partial.count(src))
      throw InvalidArgument("duplicate PBS source (" + r.channel + "," + r.pol + ")");
    partial[src] = tgt;
  }
  return permutation_unitary(space, partial, "PBS");
}

UnitaryMap route_unitary(const SpacePtr& space,
                         const std::vector<std::pair<std::string, std::string>>& hops) {
  std::map<int, int> partial;
  for (const auto& [from, to] : hops) {
    int cf = space->channel(from);
    int ct = space->channel(to);
    if (cf == ct) continue;
    for (int p = 0; p < space->num_pols(); ++p) {
      int src = space->basis_index(cf, p);
      if (partial.count(src)) throw InvalidArgument("duplicate route source " + from);
      partial[src] = space->basis_index(ct, p);
    }
  }
  return permutation_unitary(space, partial, "ROUTE");
}

UnitaryMap mirror_unitary(const SpacePtr& space, const std::vector<std::string>& channels) {
  for (const auto& name : channels) space->channel(name);  // registry check only
  return UnitaryMap::identity(space);
}

UnitaryMap device_unitary(const SpacePtr& space, const DeviceSpec& device) {
  return std::visit(
      [&](const auto& dev) -> UnitaryMap {
        using T = std::decay_t<decltype(dev)>;
        if constexpr (std::is_same_v<T, BeamSplitter>)
          return beam_splitter_unitary(space, dev.theta, dev.port_a, dev.port_b,
                                       dev.convention);
        else if constexpr (std::is_same_v<T, PolarizingBeamSplitter>)
          return pbs_unitary(space, dev.routes);
        else if constexpr (std::is_same_v<T, PolarizationRotator>)
          return polarization_rotator_unitary(space, dev.theta, dev.channels);
        else if constexpr (std::is_same_v<T, Mirror>)
          return mirror_unitary(space, dev.channels);
        else
          return route_unitary(space, dev.hops);
      },
      device);
}

UnitaryMap build_step(const SpacePtr& space, const StepSpec& spec) {
  UnitaryMap u = UnitaryMap::identity(space);
  for (const auto& dev : spec.devices) u = u.then(device_unitary(space, dev));
  double err = u.unitarity_error();
  if (err > kUnitaryTol)
    throw ValidationError("step " + spec.label + " failed unitarity check (" +
                          std::to_string(err) + ")");
  return u.relabeled(spec.label);
}

}  // namespace qch
