#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "qch/devices.hpp"

using namespace qch;

namespace {
constexpr double kPi = std::numbers::pi;
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

SpacePtr mzi_space() { return StateSpace::make({"S", "A", "B", "C", "D"}, false); }
SpacePtr pol_space() { return StateSpace::make({"S", "A", "B", "C", "D"}, true); }
}  // namespace

TEST_CASE("beam splitter") {
  auto space = mzi_space();

  SUBCASE("theta = 0 is the identity") {
    auto u = beam_splitter_unitary(space, 0.0, "A", "B");
    CHECK(u.max_entry_diff(UnitaryMap::identity(space)) < 1e-15);
  }
  SUBCASE("theta = pi/4 splits evenly") {
    for (auto conv : {BsConvention::Rotation, BsConvention::Symmetric}) {
      auto u = beam_splitter_unitary(space, kPi / 4, "A", "B", conv);
      auto out = apply_unitary(u, basis_state(space, "A"));
      CHECK(std::norm(out.amplitude("A", "-")) == doctest::Approx(0.5).epsilon(1e-12));
      CHECK(std::norm(out.amplitude("B", "-")) == doctest::Approx(0.5).epsilon(1e-12));
    }
  }
  SUBCASE("two pi/4 splitters transfer the input fully") {
    auto u = beam_splitter_unitary(space, kPi / 4, "A", "B");
    auto out = apply_unitary(u, apply_unitary(u, basis_state(space, "A")));
    CHECK(std::abs(out.amplitude("B", "-")) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(out.amplitude("A", "-")) < 1e-12);
  }
  SUBCASE("reflectivity is cos^2 theta") {
    double theta = 0.9;
    auto u = beam_splitter_unitary(space, theta, "A", "B", BsConvention::Symmetric);
    auto out = apply_unitary(u, basis_state(space, "A"));
    CHECK(std::norm(out.amplitude("A", "-")) ==
          doctest::Approx(std::cos(theta) * std::cos(theta)).epsilon(1e-12));
  }
  SUBCASE("BS(theta) then BS(-theta) is the identity") {
    for (double theta : {0.1, 0.5, kPi / 4, 1.2}) {
      for (auto conv : {BsConvention::Rotation, BsConvention::Symmetric}) {
        auto fwd = beam_splitter_unitary(space, theta, "A", "B", conv);
        auto back = beam_splitter_unitary(space, -theta, "A", "B", conv);
        CHECK(fwd.then(back).max_entry_diff(UnitaryMap::identity(space)) < 1e-12);
      }
    }
  }
  SUBCASE("bad arguments") {
    CHECK_THROWS_AS(beam_splitter_unitary(space, 0.3, "A", "A"), InvalidArgument);
    CHECK_THROWS_AS(beam_splitter_unitary(space, 0.3, "A", "Z"), InvalidArgument);
    CHECK_THROWS_AS(beam_splitter_unitary(space, 2.0, "A", "B"), InvalidArgument);
  }
}

TEST_CASE("polarization rotator") {
  auto space = pol_space();

  SUBCASE("theta = 0 is the identity") {
    auto u = polarization_rotator_unitary(space, 0.0, {"S"});
    CHECK(u.max_entry_diff(UnitaryMap::identity(space)) < 1e-15);
  }
  SUBCASE("pi/4 on V gives |H| = 1/sqrt2") {
    auto u = polarization_rotator_unitary(space, kPi / 4, {"S"});
    auto out = apply_unitary(u, basis_state(space, "S", "V"));
    CHECK(std::abs(out.amplitude("S", "H")) == doctest::Approx(kInvSqrt2).epsilon(1e-12));
  }
  SUBCASE("N rotations by pi/2N turn V fully into H") {
    for (int n = 2; n <= 6; ++n) {
      auto u = polarization_rotator_unitary(space, kPi / (2.0 * n), {"S"});
      auto s = basis_state(space, "S", "V");
      for (int i = 0; i < n; ++i) s = apply_unitary(u, s);
      CHECK(std::abs(s.amplitude("S", "H")) == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(std::abs(s.amplitude("S", "V")) < 1e-12);
    }
  }
  SUBCASE("only listed channels rotate") {
    auto u = polarization_rotator_unitary(space, kPi / 4, {"S"});
    auto out = apply_unitary(u, basis_state(space, "A", "V"));
    CHECK(std::abs(out.amplitude("A", "V")) == doctest::Approx(1.0));
  }
  SUBCASE("rejected in a polarization-free space") {
    CHECK_THROWS_AS(polarization_rotator_unitary(mzi_space(), 0.2, {"S"}), InvalidArgument);
  }
}

TEST_CASE("polarizing beam splitter") {
  auto space = pol_space();

  SUBCASE("empty routes give the identity") {
    CHECK(pbs_unitary(space, {}).max_entry_diff(UnitaryMap::identity(space)) < 1e-15);
  }
  SUBCASE("routes move (S,V) to (D,V) with amplitude one") {
    auto u = pbs_unitary(space, {{"S", "H", "A"}, {"S", "V", "D"}});
    auto out = apply_unitary(u, basis_state(space, "S", "V"));
    CHECK(out.amplitude("D", "V") == Complex(1.0, 0.0));
  }
  SUBCASE("route map then its inverse is the identity") {
    auto fwd = pbs_unitary(space, {{"S", "H", "A"}, {"S", "V", "D"}});
    auto back = pbs_unitary(space, {{"A", "H", "S"}, {"D", "V", "S"}});
    CHECK(fwd.then(back).max_entry_diff(UnitaryMap::identity(space)) < 1e-15);
  }
  SUBCASE("always a permutation with +1 entries") {
    auto u = pbs_unitary(space, {{"C", "H", "D"}, {"B", "V", "D"}});
    for (int col = 0; col < space->dim(); ++col) {
      int ones = 0;
      for (int row = 0; row < space->dim(); ++row) {
        Complex e = u.at(row, col);
        if (e == Complex(1.0, 0.0))
          ++ones;
        else
          CHECK(e == Complex(0.0, 0.0));
      }
      CHECK(ones == 1);
    }
  }
  SUBCASE("non-injective routing is rejected") {
    CHECK_THROWS_AS(pbs_unitary(space, {{"S", "H", "A"}, {"B", "H", "A"}}), InvalidArgument);
    CHECK_THROWS_AS(pbs_unitary(space, {{"S", "H", "A"}, {"S", "H", "B"}}), InvalidArgument);
  }
}

TEST_CASE("routes close chains into cycles") {
  auto space = mzi_space();
  auto u = route_unitary(space, {{"A", "B"}, {"B", "C"}});
  auto out = apply_unitary(u, basis_state(space, "A"));
  CHECK(out.amplitude("B", "-") == Complex(1.0, 0.0));
  // closing edge C -> A
  auto back = apply_unitary(u, basis_state(space, "C"));
  CHECK(back.amplitude("A", "-") == Complex(1.0, 0.0));
}

TEST_CASE("devices with disjoint supports commute") {
  auto space = pol_space();
  auto bs = beam_splitter_unitary(space, 0.7, "A", "B");
  auto pr = polarization_rotator_unitary(space, 0.4, {"C"});
  CHECK(bs.then(pr).max_entry_diff(pr.then(bs)) < 1e-14);
}

TEST_CASE("build_step") {
  auto space = pol_space();

  SUBCASE("empty device list is the identity") {
    auto u = build_step(space, {"T", {}});
    CHECK(u.max_entry_diff(UnitaryMap::identity(space)) < 1e-15);
  }
  SUBCASE("Michelson opening step splits (S,H) across (A,H) and (D,V)") {
    StepSpec spec{"T_{1,0}",
                  {PolarizationRotator{kPi / 4, {"S"}},
                   PolarizingBeamSplitter{{{"S", "H", "A"}, {"S", "V", "D"}}}}};
    auto u = build_step(space, spec);
    auto out = apply_unitary(u, basis_state(space, "S", "H"));
    CHECK(std::abs(out.amplitude("A", "H")) == doctest::Approx(kInvSqrt2).epsilon(1e-12));
    CHECK(std::abs(out.amplitude("D", "V")) == doctest::Approx(kInvSqrt2).epsilon(1e-12));
  }
  SUBCASE("steps keep their labels") {
    auto u = build_step(space, {"T_{2,1}", {Mirror{{"A"}}}});
    CHECK(u.label() == "T_{2,1}");
  }
}
