#pragma once
//
// The two interferometer models and their history families.
//
// Nested Mach-Zehnder (channel-only space, times t0..t4):
//   BS1 splits S into A (reflectivity cos²θ_outer) and D; BS2/BS3 form the
//   inner interferometer on D with the dark-port condition that a particle
//   entering D leaves entirely through H, never E; BS4 recombines A and E
//   into F and G. Beam splitters use the symmetric i-phase convention.
//
// Michelson outer cycle (channel ⊗ polarization, laid out sequentially in
// time): PR(π/2M) on S then a PBS split S into A (H) and D (V); each of the
// N inner cycles rotates the D arm by π/2N and splits it into C (H) and
// B (V); the final merge returns (A,H) and (D,V) to S and routes (D,H) to a
// loss channel standing in for the detector. With Bob blocking, the C arm is
// routed into a fresh Bob-detector channel at every inner-cycle boundary.
// Loss and Bob channels form shift registers so that successive outer cycles
// are built from identical device lists (their transfer matrices match
// entrywise).
//

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qch/devices.hpp"
#include "qch/histories.hpp"
#include "qch/statespace.hpp"

namespace qch {

struct MziConfig {
  double theta_outer = 0.0;  // BS1 and BS4; reflectivity cos²θ
  double theta_inner = 0.0;  // BS2
  // BS3 defaults to π/2 - theta_inner, which closes the inner dark port for
  // any theta_inner under the symmetric convention. Overriding it is the one
  // way to build a circuit that fails the dark-port check.
  std::optional<double> theta_inner_2;

  // Protocol parameter space: θ_outer = π/2M, θ_inner = π/2N with M, N >= 2.
  static MziConfig protocol(int m, int n);
  // Free-form outer angle for reflectivity sweeps; inner pair stays dark-port
  // valid (defaults to the N = 2 value π/4).
  static MziConfig free_form(double theta_outer, double theta_inner = -1.0);
  static MziConfig from_reflectivities(double outer_r, double inner_r = 0.5);

  double reflectivity_outer() const;
  double reflectivity_inner() const;
  double bs3_theta() const;
};

struct MichelsonConfig {
  int m = 2;                // outer rotator angle π/2M
  int n = 2;                // inner cycles per outer cycle, rotator angle π/2N
  bool bob_blocks = false;
  int outer_cycles = 1;

  void validate() const;
};

struct CircuitModel {
  enum class Kind { GriffithsMzi, MichelsonCycle };

  CircuitModel(Kind kind_, SpacePtr space_, StateVector initial_)
      : kind(kind_), space(std::move(space_)), initial(std::move(initial_)) {}

  Kind kind = Kind::GriffithsMzi;
  SpacePtr space;
  StateVector initial;
  std::vector<UnitaryMap> steps;     // steps[k] maps t_k -> t_{k+1}
  std::vector<std::string> labels;   // "T_{1,0}", ...

  std::string comm_channel;               // communication channel C
  std::vector<std::string> loss_channels; // detector loss register
  std::vector<std::string> bob_channels;  // Bob-detector register
  int steps_per_cycle = 0;                 // Michelson only
  int cycles = 1;

  int num_steps() const { return static_cast<int>(steps.size()); }
};

CircuitModel build_griffiths_mzi(const MziConfig& config);
CircuitModel build_michelson(const MichelsonConfig& config);

inline CircuitModel build_michelson_cycle(const MichelsonConfig& config) {
  return build_michelson(config);
}
inline CircuitModel build_michelson_multi(MichelsonConfig config) {
  if (config.outer_cycles < 2) config.outer_cycles = 2;
  return build_michelson(config);
}

// Brute-force oracle: the full unprojected state at every time t0..tn.
std::vector<StateVector> evolve(const CircuitModel& model);

// Mach-Zehnder families.
//   F'_A:  S0 ⊙ {A1,D1,Q1} ⊙ {A2,B2+C2} ⊙ {A3,E3,H3} ⊙ F4
//   F_C:   S0 ⊙ I1 ⊙ {C2,~C2} ⊙ I3 ⊙ {F4,~F4}, the "was the photon in the
//          communication channel" question; the refined form adds the
//          {A3,E3,H3} events at t3.
HistoryFamily family_FpA(const CircuitModel& model);
HistoryFamily family_FC(const CircuitModel& model, bool refined);

// Michelson families (single outer cycle).
//   coarse:  identity slots, final {S⊗H, S⊗V, ~S⊗I}
//   refined: {A,D}⊗I at t1, {A,B,C}⊗I at the inner times, final {S⊗H}
HistoryFamily family_Y(const CircuitModel& model, bool refined);

// Two-outer-cycle family refined on the inner slots of one chosen cycle,
// with identity elsewhere and final slot {S⊗H at protocol end}.
HistoryFamily family_two_cycle(const CircuitModel& model, int refine_cycle);

struct SweepRow {
  double reflectivity = 0.0;
  double max_offdiag = 0.0;
  bool consistent = false;
};

struct SweepCrossing {
  double reflectivity = 0.0;
  double max_offdiag = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<SweepCrossing> crossings;
};

// Evaluates the consistency functional max_offdiag(R) on a uniform
// reflectivity grid and refines each interior local minimum by bracketed
// golden-section search (the functional is an absolute value, so a zero is
// a V-shaped touch rather than a signed crossing). A refined minimum counts
// as a crossing when it drops below kCrossingTol while the functional is
// above tolerance elsewhere on the grid.
inline constexpr double kCrossingTol = 1e-8;
inline constexpr double kSweepRefineWidth = 1e-9;

SweepResult sweep_consistency(const std::function<HistoryFamily(double)>& family_at,
                              double lo, double hi, int steps, double tolerance = kAmpTol);

// Conditional probability of the photon having visited `channel` at any
// intermediate slot, given the family's first final-slot outcome.
double channel_visit_probability(const CircuitModel& model, const HistoryFamily& family,
                                 const ConsistencyReport& report, const std::string& channel);

}  // namespace qch
