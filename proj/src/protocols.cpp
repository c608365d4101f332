#include "qch/protocols.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace qch {

namespace {

constexpr double kPi = std::numbers::pi;

void require_kind(const CircuitModel& model, CircuitModel::Kind kind, const char* what) {
  if (model.kind != kind)
    throw InvalidArgument(std::string(what) + " requires a " +
                          (kind == CircuitModel::Kind::GriffithsMzi ? "nested Mach-Zehnder"
                                                                    : "Michelson") +
                          " model");
}

}  // namespace

// ---------------------------------------------------------------------------
// Configs

MziConfig MziConfig::protocol(int m, int n) {
  if (m < 2 || n < 2)
    throw InvalidArgument("protocol parameters need M >= 2 and N >= 2");
  MziConfig c;
  c.theta_outer = kPi / (2.0 * m);
  c.theta_inner = kPi / (2.0 * n);
  return c;
}

MziConfig MziConfig::free_form(double theta_outer, double theta_inner) {
  if (theta_inner < 0.0) theta_inner = kPi / 4.0;
  if (!(theta_outer >= 0.0 && theta_outer <= kPi / 2.0))
    throw InvalidArgument("outer angle outside [0, pi/2]");
  if (!(theta_inner >= 0.0 && theta_inner <= kPi / 2.0))
    throw InvalidArgument("inner angle outside [0, pi/2]");
  MziConfig c;
  c.theta_outer = theta_outer;
  c.theta_inner = theta_inner;
  return c;
}

MziConfig MziConfig::from_reflectivities(double outer_r, double inner_r) {
  if (!(outer_r > 0.0 && outer_r < 1.0) || !(inner_r > 0.0 && inner_r < 1.0))
    throw InvalidArgument("reflectivities must lie in (0, 1)");
  return free_form(std::acos(std::sqrt(outer_r)), std::acos(std::sqrt(inner_r)));
}

double MziConfig::reflectivity_outer() const {
  double c = std::cos(theta_outer);
  return c * c;
}

double MziConfig::reflectivity_inner() const {
  double c = std::cos(theta_inner);
  return c * c;
}

double MziConfig::bs3_theta() const {
  return theta_inner_2 ? *theta_inner_2 : kPi / 2.0 - theta_inner;
}

void MichelsonConfig::validate() const {
  if (m < 2 || n < 2) throw InvalidArgument("Michelson model needs M >= 2 and N >= 2");
  if (outer_cycles < 1) throw InvalidArgument("need at least one outer cycle");
  if (n > 12 || outer_cycles > 8) throw InvalidArgument("Michelson model too large");
}

// ---------------------------------------------------------------------------
// Nested Mach-Zehnder (Fig. 1 geometry)

CircuitModel build_griffiths_mzi(const MziConfig& config) {
  if (!(config.theta_outer >= 0.0 && config.theta_outer <= kPi / 2.0))
    throw InvalidArgument("outer angle outside [0, pi/2]");
  SpacePtr space =
      StateSpace::make({"S", "A", "B", "C", "D", "E", "F", "G", "H"}, /*polarized=*/false);

  CircuitModel model{CircuitModel::Kind::GriffithsMzi, space, basis_state(space, "S")};
  model.comm_channel = "C";

  auto bs = [](double theta, std::string a, std::string b) {
    return BeamSplitter{theta, std::move(a), std::move(b), BsConvention::Symmetric};
  };

  std::vector<StepSpec> specs;
  specs.push_back({"T_{1,0}", {bs(config.theta_outer, "S", "D"), Route{{{"S", "A"}}}}});
  specs.push_back({"T_{2,1}", {bs(config.theta_inner, "D", "C"), Route{{{"D", "B"}}}}});
  specs.push_back(
      {"T_{3,2}", {bs(config.bs3_theta(), "B", "C"), Route{{{"B", "E"}, {"C", "H"}}}}});
  specs.push_back(
      {"T_{4,3}", {bs(config.theta_outer, "A", "E"), Route{{{"A", "F"}, {"E", "G"}}}}});

  for (const auto& spec : specs) {
    model.steps.push_back(build_step(space, spec));
    model.labels.push_back(spec.label);
  }

  // Dark-port check: unit amplitude entering D at t1 must reach E at t3 with
  // zero amplitude ("a particle entering through D will exit through H").
  StateVector d1 = basis_state(space, "D");
  StateVector t3 = apply_unitary(model.steps[2], apply_unitary(model.steps[1], d1));
  if (std::abs(t3.amplitude("E")) > kUnitaryTol)
    throw ValidationError("inner interferometer dark port violated (|<E|U|D>| = " +
                          std::to_string(std::abs(t3.amplitude("E"))) + ")");
  return model;
}

// ---------------------------------------------------------------------------
// Michelson outer cycle, sequential layout

CircuitModel build_michelson(const MichelsonConfig& config) {
  config.validate();
  const int cycles = config.outer_cycles;
  const int n_inner = config.n;
  const double theta_m = kPi / (2.0 * config.m);
  const double theta_n = kPi / (2.0 * n_inner);

  std::vector<std::string> channels = {"S", "A", "B", "C", "D"};
  std::vector<std::string> loss_names;
  for (int i = 0; i < cycles; ++i) loss_names.push_back("loss" + std::to_string(i + 1));
  channels.insert(channels.end(), loss_names.begin(), loss_names.end());
  std::vector<std::string> bob_names;
  if (config.bob_blocks) {
    for (int i = 0; i < n_inner * cycles; ++i)
      bob_names.push_back("bob" + std::to_string(i + 1));
    channels.insert(channels.end(), bob_names.begin(), bob_names.end());
  }

  SpacePtr space = StateSpace::make(channels, /*polarized=*/true);

  CircuitModel model{CircuitModel::Kind::MichelsonCycle, space, basis_state(space, "S", "H")};
  model.comm_channel = "C";
  model.loss_channels = loss_names;
  model.bob_channels = bob_names;
  model.steps_per_cycle = n_inner + 2;
  model.cycles = cycles;

  // Register shifts keep every absorption event in its own channel while all
  // outer cycles share one device list. A register sized to the total number
  // of absorptions never cycles amplitude back. Shifts are listed deepest
  // first so one application moves every slot down by one.
  auto shift_register = [](const std::vector<std::string>& reg, const std::string& feed) {
    Route r;
    for (size_t i = reg.size(); i-- > 1;) r.hops.push_back({reg[i - 1], reg[i]});
    r.hops.push_back({feed, reg.front()});
    return r;
  };

  const PolarizingBeamSplitter outer_split{{{"S", "H", "A"}, {"S", "V", "D"}}};
  const PolarizingBeamSplitter inner_split{{{"D", "H", "C"}, {"D", "V", "B"}}};
  const PolarizingBeamSplitter inner_merge{{{"C", "H", "D"}, {"B", "V", "D"}}};
  const PolarizingBeamSplitter outer_merge{
      {{"A", "H", "S"}, {"D", "V", "S"}, {"D", "H", loss_names.front()}}};

  std::vector<StepSpec> cycle_steps;
  {
    StepSpec open{"", {PolarizationRotator{theta_m, {"S"}}, outer_split}};
    cycle_steps.push_back(open);
    for (int j = 1; j <= n_inner; ++j) {
      StepSpec inner{"", {}};
      if (j > 1) inner.devices.push_back(inner_merge);
      inner.devices.push_back(PolarizationRotator{theta_n, {"D"}});
      inner.devices.push_back(inner_split);
      inner.devices.push_back(Mirror{{"A"}});
      if (config.bob_blocks) inner.devices.push_back(shift_register(bob_names, "C"));
      cycle_steps.push_back(inner);
    }
    StepSpec close{"", {inner_merge}};
    if (cycles > 1) {
      Route loss_shift;
      for (size_t i = loss_names.size(); i-- > 1;)
        loss_shift.hops.push_back({loss_names[i - 1], loss_names[i]});
      close.devices.push_back(loss_shift);
    }
    close.devices.push_back(outer_merge);
    cycle_steps.push_back(close);
  }

  for (int c = 0; c < cycles; ++c) {
    for (int k = 0; k < static_cast<int>(cycle_steps.size()); ++k) {
      int t = c * model.steps_per_cycle + k;
      StepSpec spec = cycle_steps[k];
      spec.label = "T_{" + std::to_string(t + 1) + "," + std::to_string(t) + "}";
      model.steps.push_back(build_step(space, spec));
      model.labels.push_back(spec.label);
    }
  }
  return model;
}

std::vector<StateVector> evolve(const CircuitModel& model) {
  std::vector<StateVector> states;
  states.push_back(model.initial);
  for (const auto& step : model.steps) states.push_back(apply_unitary(step, states.back()));
  return states;
}

// ---------------------------------------------------------------------------
// Families

HistoryFamily family_FpA(const CircuitModel& model) {
  require_kind(model, CircuitModel::Kind::GriffithsMzi, "family F'_A");
  const SpacePtr& space = model.space;
  auto ch = [&](std::initializer_list<std::string> names) {
    return Projector::on_channels(space, names);
  };
  Projector a = ch({"A"});
  Projector d = ch({"D"});
  Projector q = a.sum(d).complemented().relabeled("Q");

  HistoryFamily family{model.initial, model.steps, {}};
  family.slots.push_back(Decomposition::of({a, d, q}));
  family.slots.push_back(Decomposition::of({a, ch({"B", "C"})}));
  family.slots.push_back(Decomposition::of({a, ch({"E"}), ch({"H"})}));
  family.slots.push_back(Decomposition::of({ch({"F"})}));
  return family;
}

HistoryFamily family_FC(const CircuitModel& model, bool refined) {
  require_kind(model, CircuitModel::Kind::GriffithsMzi, "family F_C");
  const SpacePtr& space = model.space;
  auto ch = [&](std::initializer_list<std::string> names) {
    return Projector::on_channels(space, names);
  };
  Projector c = ch({"C"});
  Projector f = ch({"F"});

  HistoryFamily family{model.initial, model.steps, {}};
  family.slots.push_back(Decomposition::identity(space));
  family.slots.push_back(Decomposition::of({c, c.complemented()}));
  if (refined)
    family.slots.push_back(Decomposition::of({ch({"A"}), ch({"E"}), ch({"H"})}));
  else
    family.slots.push_back(Decomposition::identity(space));
  family.slots.push_back(Decomposition::of({f, f.complemented()}));
  return family;
}

namespace {

// Channel decompositions for the inner slots of one Michelson outer cycle:
// {A,D}⊗I after the opening split, {A,B,C}⊗I after each inner step.
void push_refined_cycle_slots(HistoryFamily& family, const SpacePtr& space, int n_inner) {
  auto ch = [&](std::initializer_list<std::string> names) {
    return Projector::on_channels(space, names);
  };
  family.slots.push_back(Decomposition::of({ch({"A"}), ch({"D"})}));
  for (int j = 0; j < n_inner; ++j)
    family.slots.push_back(Decomposition::of({ch({"A"}), ch({"B"}), ch({"C"})}));
}

}  // namespace

HistoryFamily family_Y(const CircuitModel& model, bool refined) {
  require_kind(model, CircuitModel::Kind::MichelsonCycle, "family Y");
  if (model.cycles != 1)
    throw InvalidArgument("family Y applies to a single outer cycle");
  const SpacePtr& space = model.space;
  const int n_inner = model.steps_per_cycle - 2;

  HistoryFamily family{model.initial, model.steps, {}};
  Projector s_h = Projector::on_channel_pol(space, "S", "H");
  if (refined) {
    push_refined_cycle_slots(family, space, n_inner);
    family.slots.push_back(Decomposition::of({s_h}));
  } else {
    for (int k = 0; k < n_inner + 1; ++k)
      family.slots.push_back(Decomposition::identity(space));
    Projector s_v = Projector::on_channel_pol(space, "S", "V");
    Projector s_other = Projector::on_channels(space, {"S"}).complemented();
    family.slots.push_back(Decomposition::of({s_h, s_v, s_other}));
  }
  return family;
}

HistoryFamily family_two_cycle(const CircuitModel& model, int refine_cycle) {
  require_kind(model, CircuitModel::Kind::MichelsonCycle, "two-cycle family");
  if (model.cycles != 2)
    throw InvalidArgument("two-cycle family needs a two-outer-cycle model");
  if (refine_cycle != 1 && refine_cycle != 2)
    throw InvalidArgument("refine_cycle must be 1 or 2");
  const SpacePtr& space = model.space;
  const int per_cycle = model.steps_per_cycle;
  const int n_inner = per_cycle - 2;
  const int first = (refine_cycle - 1) * per_cycle;  // slot index of the cycle's t1

  HistoryFamily family{model.initial, model.steps, {}};
  for (int k = 0; k < first; ++k) family.slots.push_back(Decomposition::identity(space));
  push_refined_cycle_slots(family, space, n_inner);
  for (int k = first + n_inner + 1; k < model.num_steps() - 1; ++k)
    family.slots.push_back(Decomposition::identity(space));
  family.slots.push_back(
      Decomposition::of({Projector::on_channel_pol(space, "S", "H")}));
  return family;
}

// ---------------------------------------------------------------------------
// Reflectivity sweep

namespace {

double sigma_at(const std::function<HistoryFamily(double)>& family_at, double r,
                double tolerance) {
  return gram_matrix(family_at(r), tolerance).max_offdiag;
}

// Golden-section minimization on [lo, hi]; the functional is unimodal around
// an isolated zero touch.
std::pair<double, double> refine_minimum(const std::function<HistoryFamily(double)>& family_at,
                                         double lo, double hi, double tolerance) {
  constexpr double inv_phi = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = sigma_at(family_at, x1, tolerance);
  double f2 = sigma_at(family_at, x2, tolerance);
  while (b - a > kSweepRefineWidth) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = sigma_at(family_at, x1, tolerance);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = sigma_at(family_at, x2, tolerance);
    }
  }
  double mid = 0.5 * (a + b);
  return {mid, sigma_at(family_at, mid, tolerance)};
}

}  // namespace

SweepResult sweep_consistency(const std::function<HistoryFamily(double)>& family_at,
                              double lo, double hi, int steps, double tolerance) {
  if (steps < 2) throw InvalidArgument("sweep needs at least 2 grid points");
  if (!(lo > 0.0 && hi < 1.0 && lo < hi))
    throw InvalidArgument("sweep range must satisfy 0 < lo < hi < 1");

  SweepResult result;
  result.rows.reserve(steps);
  double grid_max = 0.0;
  for (int i = 0; i < steps; ++i) {
    double r = lo + (hi - lo) * i / (steps - 1);
    double sigma = sigma_at(family_at, r, tolerance);
    grid_max = std::max(grid_max, sigma);
    result.rows.push_back({r, sigma, sigma < tolerance});
  }
  if (grid_max < tolerance) return result;  // consistent everywhere: nothing to locate

  for (int i = 1; i + 1 < steps; ++i) {
    const auto& prev = result.rows[i - 1];
    const auto& here = result.rows[i];
    const auto& next = result.rows[i + 1];
    if (here.max_offdiag <= prev.max_offdiag && here.max_offdiag <= next.max_offdiag) {
      auto [r, sigma] = refine_minimum(family_at, prev.reflectivity, next.reflectivity,
                                       tolerance);
      if (sigma < kCrossingTol) {
        if (result.crossings.empty() ||
            std::abs(result.crossings.back().reflectivity - r) > 1e-6)
          result.crossings.push_back({r, sigma});
      }
    }
  }
  return result;
}

double channel_visit_probability(const CircuitModel& model, const HistoryFamily& family,
                                 const ConsistencyReport& report,
                                 const std::string& channel) {
  int ch = model.space->channel(channel);
  std::vector<std::vector<char>> hits(family.num_slots());
  for (int k = 0; k + 1 < family.num_slots(); ++k) {
    hits[k].assign(family.slots[k].size(), 0);
    for (int j = 0; j < family.slots[k].size(); ++j) {
      const Projector& p = family.slots[k].projectors[j];
      bool inside = p.rank() > 0;
      for (int pol = 0; pol < model.space->num_pols() && inside; ++pol)
        for (int c = 0; c < model.space->num_channels() && inside; ++c) {
          int idx = model.space->basis_index(c, pol);
          if (p.contains(idx) && c != ch) inside = false;
        }
      hits[k][j] = inside ? 1 : 0;  // projector lies entirely in the channel
    }
  }
  auto predicate = [&](const History& h) {
    for (int k = 0; k + 1 < family.num_slots(); ++k)
      if (hits[k][h.choices[k]]) return true;
    return false;
  };
  return event_probability_where(family, report, predicate, 0);
}

}  // namespace qch
