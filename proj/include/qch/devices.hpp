#pragma once
//
// Optical elements as validated step unitaries: beam splitters, polarizing
// beam splitters, polarization rotators, mirrors and channel routes.
// Absorbers (detectors, a blocked communication channel) are expressed as
// routes into dedicated loss channels so every step stays unitary.
//

#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "qch/statespace.hpp"

namespace qch {

// Two-port beam splitter amplitude convention.
//   Rotation:  a -> cosθ·a + sinθ·b,  b -> -sinθ·a + cosθ·b
//   Symmetric: a -> cosθ·a + i·sinθ·b, b -> i·sinθ·a + cosθ·b
// Reflectivity is cos²θ either way. The nested-interferometer model uses
// Symmetric; probabilities and coefficient magnitudes agree between the two,
// relative phases between branches do not.
enum class BsConvention { Rotation, Symmetric };

struct BeamSplitter {
  double theta = 0.0;  // in [0, π/2]
  std::string port_a;
  std::string port_b;
  BsConvention convention = BsConvention::Rotation;
};

struct PolarizationRotator {
  double theta = 0.0;
  std::vector<std::string> channels;
};

struct PbsRoute {
  std::string channel;
  std::string pol;
  std::string target;
};

// Routes (channel, pol) -> (target, pol); untouched basis vectors persist.
struct PolarizingBeamSplitter {
  std::vector<PbsRoute> routes;
};

// Mirrors hold a channel in place between steps; identity on the basis.
struct Mirror {
  std::vector<std::string> channels;
};

// Channel permutation, both polarizations alike. Absorbers are routes into
// a fresh loss channel.
struct Route {
  std::vector<std::pair<std::string, std::string>> hops;
};

using DeviceSpec =
    std::variant<BeamSplitter, PolarizingBeamSplitter, PolarizationRotator, Mirror, Route>;

// Ordered devices composing one time-step unitary T_{j+1,j}.
struct StepSpec {
  std::string label;
  std::vector<DeviceSpec> devices;
};

UnitaryMap beam_splitter_unitary(const SpacePtr& space, double theta,
                                 std::string_view port_a, std::string_view port_b,
                                 BsConvention convention = BsConvention::Rotation);
UnitaryMap polarization_rotator_unitary(const SpacePtr& space, double theta,
                                        const std::vector<std::string>& channels);
UnitaryMap pbs_unitary(const SpacePtr& space, const std::vector<PbsRoute>& routes);
UnitaryMap route_unitary(const SpacePtr& space,
                         const std::vector<std::pair<std::string, std::string>>& hops);
UnitaryMap mirror_unitary(const SpacePtr& space, const std::vector<std::string>& channels);

UnitaryMap device_unitary(const SpacePtr& space, const DeviceSpec& device);

// Composition of the step's devices in list order, validated unitary.
UnitaryMap build_step(const SpacePtr& space, const StepSpec& spec);

}  // namespace qch
