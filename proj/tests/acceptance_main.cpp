//
// Acceptance suite: one line per criterion, every tolerance pinned in code.
// Runs the full battery at desk scale; exits nonzero when any criterion
// fails. The CLI determinism criterion drives the built binary through the
// path in QCH_BIN.
//

#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "qch/protocols.hpp"
#include "test_support.hpp"

using namespace qch;

namespace {

constexpr double kPi = std::numbers::pi;
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

struct Failure {
  std::string detail;
};

void require(bool ok, const std::string& detail) {
  if (!ok) throw Failure{detail};
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

HistoryFamily fc_family(double reflectivity, bool refined) {
  return family_FC(build_griffiths_mzi(MziConfig::from_reflectivities(reflectivity)),
                   refined);
}

// --------------------------------------------------------------------------

void criterion_1_fpa_certainty() {
  for (int mn : {2, 3}) {
    auto model = build_griffiths_mzi(MziConfig::protocol(mn, mn));
    auto family = family_FpA(model);
    auto report = gram_matrix(family);
    require(report.consistent && report.max_offdiag < 1e-10,
            "F'_A max_offdiag " + fmt(report.max_offdiag) + " at M=N=" + std::to_string(mn));
    long idx = family.index_of(History{{0, 0, 0, 0}});
    double k2 = report.norms[idx] * report.norms[idx];
    double mass = event_probability(family, 3, {0});
    require(std::abs(k2 / mass - 1.0) < 1e-10,
            "P(A path | F4) = " + fmt(k2 / mass) + " at M=N=" + std::to_string(mn));
  }
}

void criterion_2_one_third_crossing() {
  auto result = sweep_consistency([](double r) { return fc_family(r, false); }, 0.05, 0.95,
                                  181);
  require(result.crossings.size() == 1,
          "expected one crossing, found " + std::to_string(result.crossings.size()));
  double r = result.crossings[0].reflectivity;
  require(std::abs(r - 1.0 / 3.0) < 1e-6, "crossing at " + fmt(r) + ", not 1/3");
}

void criterion_3_refined_fc_inconsistent() {
  auto result =
      sweep_consistency([](double r) { return fc_family(r, true); }, 0.05, 0.95, 181);
  double min_offdiag = 1.0;
  for (const auto& row : result.rows) min_offdiag = std::min(min_offdiag, row.max_offdiag);
  require(min_offdiag > 1e-3, "refined F_C min max_offdiag " + fmt(min_offdiag));
}

void criterion_4_dark_port() {
  for (int m = 2; m <= 6; ++m)
    for (int n = 2; n <= 6; ++n) {
      auto model = build_griffiths_mzi(MziConfig::protocol(m, n));
      auto t3 = apply_unitary(model.steps[2],
                              apply_unitary(model.steps[1], basis_state(model.space, "D")));
      double leak = std::abs(t3.amplitude("E", "-"));
      require(leak < 1e-12, "E amplitude " + fmt(leak) + " at M=" + std::to_string(m) +
                                " N=" + std::to_string(n));
    }
}

void criterion_5_worked_chain_ket() {
  auto family = family_Y(build_michelson(MichelsonConfig{}), true);
  auto stages = chain_ket_stages(family, History{{1, 2, 2, 0}});  // D1, C2, C3, S4xH4
  const std::array<double, 3> expected = {kInvSqrt2, 0.5, 0.5 * kInvSqrt2};
  for (int k = 0; k < 3; ++k)
    require(std::abs(norm(stages[k]) - expected[k]) < 1e-12,
            "stage " + std::to_string(k + 1) + " norm " + fmt(norm(stages[k])));
  require(norm(stages[3]) < 1e-12, "final chain ket norm " + fmt(norm(stages[3])));
}

void criterion_6_eighteen_histories() {
  auto family = family_Y(build_michelson(MichelsonConfig{}), true);
  auto report = gram_matrix(family);
  require(report.consistent, "refined Y inconsistent, max_offdiag " +
                                 fmt(report.max_offdiag));
  long stated = 0, zeros = 0;
  long survivor = family.index_of(History{{0, 0, 0, 0}});
  bool survivor_nonzero = false;
  for (long i = 0; i < report.num_histories; ++i) {
    History h = family.history_at(i);
    if (family.is_flagged(h) || h.choices[3] != 0) continue;
    ++stated;
    if (report.norms[i] < 1e-12)
      ++zeros;
    else {
      require(i == survivor, "unexpected surviving history " + family.history_label(h));
      survivor_nonzero = true;
    }
  }
  require(stated == 18, "stated histories " + std::to_string(stated));
  require(zeros == 17, "zero chain kets " + std::to_string(zeros));
  require(survivor_nonzero, "survivor A1,A2,A3 has zero chain ket");
}

void criterion_7_counterfactuality() {
  for (int m = 2; m <= 6; ++m)
    for (int n = 2; n <= 6; ++n) {
      MichelsonConfig config;
      config.m = m;
      config.n = n;
      auto model = build_michelson(config);
      auto family = family_Y(model, true);
      auto report = gram_matrix(family);
      require(report.consistent, "refined Y inconsistent at M=" + std::to_string(m) +
                                     " N=" + std::to_string(n));
      double p = channel_visit_probability(model, family, report, "C");
      require(p < 1e-12, "P(C | SxH) = " + fmt(p) + " at M=" + std::to_string(m) +
                             " N=" + std::to_string(n));
    }
}

void criterion_8_survival() {
  for (int m = 2; m <= 6; ++m)
    for (int n = 2; n <= 6; ++n) {
      MichelsonConfig config;
      config.m = m;
      config.n = n;
      auto final = evolve(build_michelson(config)).back();
      double expected = std::cos(kPi / (2 * m)) * std::cos(kPi / (2 * m));
      double got = std::norm(final.amplitude("S", "H"));
      require(std::abs(got - expected) < 1e-10,
              "survival " + fmt(got) + " vs cos^2(pi/2M) = " + fmt(expected) +
                  " at M=" + std::to_string(m) + " N=" + std::to_string(n));
    }
}

void criterion_9_two_cycle_paradox() {
  MichelsonConfig config;
  config.outer_cycles = 2;
  auto model = build_michelson(config);

  auto second = family_two_cycle(model, 2);
  auto report2 = gram_matrix(second);
  require(report2.consistent, "cycle-2 refinement inconsistent, max_offdiag " +
                                  fmt(report2.max_offdiag));
  double p = channel_visit_probability(model, second, report2, "C");
  require(p < 1e-12, "P(C during cycle 2) = " + fmt(p));

  auto first = family_two_cycle(model, 1);
  auto report1 = gram_matrix(first);
  require(!report1.consistent && report1.max_offdiag > 1e-3,
          "cycle-1 refinement max_offdiag " + fmt(report1.max_offdiag));

  int per = model.steps_per_cycle;
  UnitaryMap u1 = UnitaryMap::identity(model.space);
  UnitaryMap u2 = UnitaryMap::identity(model.space);
  for (int k = 0; k < per; ++k) u1 = u1.then(model.steps[k]);
  for (int k = per; k < 2 * per; ++k) u2 = u2.then(model.steps[k]);
  require(u1.max_entry_diff(u2) < 1e-12,
          "cycle transfer matrices differ by " + fmt(u1.max_entry_diff(u2)));
}

void criterion_10_engine_properties() {
  std::mt19937 rng(987654321);
  for (int trial = 0; trial < 100; ++trial) {
    auto model = qch::testing::random_model(rng);
    auto family = qch::testing::random_family(model, rng);
    auto report = gram_matrix(family);

    double total = 0.0;
    for (double n : report.norms) total += n * n;
    require(std::abs(total - 1.0) < 1e-10,
            "completeness sum " + fmt(total) + " in trial " + std::to_string(trial));

    // Refinement linearity on a random slot split by basis parity.
    int slot = static_cast<int>(rng() % family.num_slots());
    std::vector<Projector> fine;
    for (const auto& p : family.slots[slot].projectors) {
      std::vector<int> odd, even;
      for (int idx = 0; idx < model.space->dim(); ++idx)
        if (p.contains(idx)) (idx % 2 ? odd : even).push_back(idx);
      if (!odd.empty()) fine.push_back(Projector::on_support(model.space, odd, "o"));
      if (!even.empty()) fine.push_back(Projector::on_support(model.space, even, "e"));
    }
    auto refined = refine_slot(family, slot, Decomposition::of(fine));
    History h{std::vector<int>(family.num_slots(), 0)};
    for (int k = 0; k < family.num_slots(); ++k)
      h.choices[k] = static_cast<int>(rng() % family.slots[k].size());
    StateVector coarse_ket = chain_ket(family, h);
    StateVector sum(model.space);
    const Projector& chosen = family.slots[slot].projectors[h.choices[slot]];
    for (int j = 0; j < refined.slots[slot].size(); ++j) {
      if (!chosen.covers(refined.slots[slot].projectors[j])) continue;
      History hj = h;
      hj.choices[slot] = j;
      sum = add(sum, chain_ket(refined, hj));
    }
    require(approx_equal(coarse_ket, sum, 1e-12),
            "refinement linearity failed in trial " + std::to_string(trial));

    // Oracle equivalence on a single-projector family.
    int oracle_slot = static_cast<int>(rng() % model.num_steps());
    auto p = Projector::on_channels(
        model.space,
        {model.space->channel_name(static_cast<int>(rng() % model.space->num_channels()))});
    HistoryFamily single{model.initial, model.steps, {}};
    for (int k = 0; k < model.num_steps(); ++k)
      single.slots.push_back(k == oracle_slot ? Decomposition::of({p})
                                              : Decomposition::identity(model.space));
    StateVector ket = chain_ket(single, History{std::vector<int>(model.num_steps(), 0)});
    StateVector oracle = project(p, evolve(model)[oracle_slot + 1]);
    double projected_norm = norm(oracle);
    for (int k = oracle_slot + 1; k < model.num_steps(); ++k)
      oracle = apply_unitary(model.steps[k], oracle);
    require(std::abs(norm(ket) - projected_norm) < 1e-12 && approx_equal(ket, oracle, 1e-12),
            "oracle equivalence failed in trial " + std::to_string(trial));
  }
}

// --------------------------------------------------------------------------
// CLI determinism and exit codes, via the built binary.

struct ToolRun {
  int code = 0;
  std::string out;
};

ToolRun run_tool(const std::string& bin, const std::string& args, bool quiet_stderr) {
  std::string cmd = bin + " " + args + (quiet_stderr ? " 2>/dev/null" : "");
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) throw Failure{"cannot launch " + cmd};
  std::string out;
  char buf[4096];
  size_t got;
  while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, got);
  int status = pclose(pipe);
  ToolRun r;
  r.out = std::move(out);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

void criterion_11_cli_contract() {
  const char* bin = std::getenv("QCH_BIN");
  require(bin != nullptr, "QCH_BIN is not set (expected the path to the qch binary)");

  const std::vector<std::string> deterministic = {
      "analyze --model michelson-cycle --family Y-refined",
      "analyze --model griffiths-mzi --family FpA --format json",
      "sweep --family FC --range 0.25:0.45:41",
      "evolve --model michelson-two-cycle",
  };
  for (const auto& args : deterministic) {
    auto a = run_tool(bin, args, false);
    auto b = run_tool(bin, args, false);
    require(a.code == 0, "'" + args + "' exited " + std::to_string(a.code));
    require(!a.out.empty() && a.out == b.out, "'" + args + "' output not byte-identical");
  }

  const std::vector<std::pair<std::string, int>> table = {
      {"analyze --model michelson-cycle --family Y", 0},
      {"analyze --model michelson-two-cycle --family two-cycle-1", 0},
      {"evolve --model griffiths-mzi --M 4 --N 3", 0},
      {"sweep --family FpA --range 0.2:0.8:7", 0},
      {"analyze --family Y", 2},
      {"analyze --model michelson-cycle", 2},
      {"analyze --model nowhere --family Y", 2},
      {"analyze --model michelson-cycle --family FpA", 2},
      {"analyze --model michelson-cycle --family Y --M 1", 2},
      {"analyze --model michelson-cycle --family Y --reflectivity-outer 0.4", 2},
      {"sweep --family FC --range 0.9:0.1:10", 2},
      {"sweep --family FC --range 0.1:0.9:1", 2},
      {"sweep --family FC", 2},
      {"evolve", 2},
      {"bogus", 2},
  };
  for (const auto& [args, expected] : table) {
    auto r = run_tool(bin, args, true);
    require(r.code == expected, "'" + args + "' exited " + std::to_string(r.code) +
                                    ", expected " + std::to_string(expected));
  }
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void()>>> criteria = {
      {"1. F'_A consistent with P(path A | F4) = 1 at M=N=2 and M=N=3",
       criterion_1_fpa_certainty},
      {"2. coarse F_C sweep crosses exactly once, at reflectivity 1/3 (1e-6)",
       criterion_2_one_third_crossing},
      {"3. refined F_C stays inconsistent across the grid (min > 1e-3)",
       criterion_3_refined_fc_inconsistent},
      {"4. inner dark port: |<E|U|D>| < 1e-12 for M,N in 2..6", criterion_4_dark_port},
      {"5. worked chain ket partials 1/sqrt2, 1/2, 1/(2 sqrt2), then zero",
       criterion_5_worked_chain_ket},
      {"6. refined Y: 18 histories into S4xH4, 17 zero kets, survivor A1,A2,A3",
       criterion_6_eighteen_histories},
      {"7. counterfactuality: P(C | SxH) = 0 for M,N in 2..6", criterion_7_counterfactuality},
      {"8. survival |<S,H|U|S,H>|^2 = cos^2(pi/2M) for M,N in 2..6", criterion_8_survival},
      {"9. two-cycle paradox: cycle-2 consistent with P(C)=0, cycle-1 inconsistent, "
       "identical cycle transfer matrices",
       criterion_9_two_cycle_paradox},
      {"10. engine properties over 100 random families: completeness, refinement "
       "linearity, oracle equivalence",
       criterion_10_engine_properties},
      {"11. CLI determinism and exit-code contract", criterion_11_cli_contract},
  };

  int failures = 0;
  for (const auto& [name, fn] : criteria) {
    try {
      fn();
      std::cout << "[PASS] " << name << "\n";
    } catch (const Failure& f) {
      ++failures;
      std::cout << "[FAIL] " << name << " -- " << f.detail << "\n";
    } catch (const std::exception& e) {
      ++failures;
      std::cout << "[FAIL] " << name << " -- unexpected error: " << e.what() << "\n";
    }
  }
  if (failures == 0)
    std::cout << "acceptance: all " << criteria.size() << " criteria passed\n";
  else
    std::cout << "acceptance: " << failures << " criteria FAILED\n";
  return failures == 0 ? 0 : 1;
}
