#include "qch/cli.hpp"

#include <fstream>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "qch/report.hpp"

namespace qch {

namespace {

struct Request {
  std::string command;
  std::string model;
  std::string family;
  int m = 2;
  int n = 2;
  bool bob_blocks = false;
  double reflectivity_outer = 0.0;
  bool has_reflectivity_outer = false;
  double reflectivity_inner = 0.0;
  bool has_reflectivity_inner = false;
  std::string range;
  double tolerance = kAmpTol;
  std::string out_path;
  std::string format;
};

struct Range {
  double lo = 0.0;
  double hi = 0.0;
  int steps = 0;
};

Range parse_range(const std::string& text) {
  Range r;
  char colon1 = 0, colon2 = 0, tail = 0;
  std::istringstream is(text);
  if (!(is >> r.lo >> colon1 >> r.hi >> colon2 >> r.steps) || colon1 != ':' ||
      colon2 != ':' || (is >> tail))
    throw InvalidArgument("range must be lo:hi:steps, e.g. 0.05:0.95:181");
  if (r.steps < 2) throw InvalidArgument("range needs at least 2 steps");
  if (!(r.lo > 0.0 && r.hi < 1.0 && r.lo < r.hi))
    throw InvalidArgument("range must satisfy 0 < lo < hi < 1");
  return r;
}

CircuitModel build_model(const Request& req, std::string& params_echo) {
  std::ostringstream echo;
  if (req.model == "griffiths-mzi") {
    MziConfig config;
    if (req.has_reflectivity_outer) {
      double inner = req.has_reflectivity_inner ? req.reflectivity_inner : 0.5;
      config = MziConfig::from_reflectivities(req.reflectivity_outer, inner);
      echo << "R_outer=" << format_real(config.reflectivity_outer())
           << " R_inner=" << format_real(config.reflectivity_inner());
    } else {
      if (req.has_reflectivity_inner)
        throw InvalidArgument("--reflectivity-inner needs --reflectivity-outer");
      config = MziConfig::protocol(req.m, req.n);
      echo << "M=" << req.m << " N=" << req.n
           << " R_outer=" << format_real(config.reflectivity_outer())
           << " R_inner=" << format_real(config.reflectivity_inner());
    }
    params_echo = echo.str();
    return build_griffiths_mzi(config);
  }
  if (req.model == "michelson-cycle" || req.model == "michelson-two-cycle") {
    if (req.has_reflectivity_outer || req.has_reflectivity_inner)
      throw InvalidArgument("reflectivity overrides apply to the griffiths-mzi model only");
    MichelsonConfig config;
    config.m = req.m;
    config.n = req.n;
    config.bob_blocks = req.bob_blocks;
    config.outer_cycles = req.model == "michelson-two-cycle" ? 2 : 1;
    echo << "M=" << req.m << " N=" << req.n << " bob_blocks=" << (req.bob_blocks ? 1 : 0)
         << " cycles=" << config.outer_cycles;
    params_echo = echo.str();
    return build_michelson(config);
  }
  throw InvalidArgument("unknown model: " + req.model +
                        " (expected griffiths-mzi, michelson-cycle or michelson-two-cycle)");
}

HistoryFamily build_family(const CircuitModel& model, const std::string& name) {
  if (name == "FpA") return family_FpA(model);
  if (name == "FC") return family_FC(model, false);
  if (name == "FC-refined") return family_FC(model, true);
  if (name == "Y") return family_Y(model, false);
  if (name == "Y-refined") return family_Y(model, true);
  if (name == "two-cycle-1") return family_two_cycle(model, 1);
  if (name == "two-cycle-2") return family_two_cycle(model, 2);
  throw InvalidArgument("unknown family: " + name +
                        " (expected FpA, FC, FC-refined, Y, Y-refined, two-cycle-1 or "
                        "two-cycle-2)");
}

void add_headlines(ReportDocument& doc, const CircuitModel& model,
                   const HistoryFamily& family, const ConsistencyReport& report,
                   const std::string& family_name) {
  if (!report.consistent) return;
  const int last = family.num_slots() - 1;
  const std::string final0 = family.slots[last].projectors[0].label();
  if (family_name == "FpA") {
    History all_a;
    all_a.choices.assign(family.num_slots(), 0);  // A is first in every slot
    double mass = 0.0;
    for (long idx : report.support) {
      History h = family.history_at(idx);
      if (h.choices[last] == 0) mass += report.norms[idx] * report.norms[idx];
    }
    double k = report.norms[family.index_of(all_a)];
    doc.headline.push_back({"P(A1&A2&A3 | " + final0 + ")", mass > 1e-30 ? k * k / mass : 0.0});
    doc.headline.push_back(
        {"P(D1 | " + final0 + ")", event_probability(family, 0, {1}, 0, report.tolerance)});
  } else if (family_name == "FC") {
    doc.headline.push_back(
        {"P(C2 | " + final0 + ")", event_probability(family, 1, {0}, 0, report.tolerance)});
  } else if (family_name == "Y") {
    for (int j = 0; j < family.slots[last].size(); ++j)
      doc.headline.push_back(
          {"P(" + family.slots[last].projectors[j].label() + ")",
           event_probability(family, last, {j}, std::nullopt, report.tolerance)});
  } else {
    doc.headline.push_back(
        {"P(" + model.comm_channel + " visited | " + final0 + ")",
         channel_visit_probability(model, family, report, model.comm_channel)});
  }
}

void emit(const Request& req, const std::string& payload, std::ostream& out) {
  if (req.out_path.empty()) {
    out << payload;
    return;
  }
  std::ofstream file(req.out_path, std::ios::binary);
  if (!file) throw InvalidArgument("cannot open output file: " + req.out_path);
  file << payload;
}

int run_analyze(const Request& req, std::ostream& out) {
  std::string format = req.format.empty() ? "text" : req.format;
  if (format != "text" && format != "json")
    throw InvalidArgument("analyze supports --format text|json");
  std::string params_echo;
  CircuitModel model = build_model(req, params_echo);
  HistoryFamily family = build_family(model, req.family);
  ConsistencyReport report = gram_matrix(family, req.tolerance);
  ReportDocument doc = make_report(family, report, req.model, req.family, params_echo);
  add_headlines(doc, model, family, report, req.family);
  emit(req, format == "json" ? render_report_json(doc) : render_report_text(doc), out);
  return 0;
}

int run_sweep(const Request& req, std::ostream& out) {
  std::string format = req.format.empty() ? "csv" : req.format;
  if (format != "csv" && format != "json")
    throw InvalidArgument("sweep supports --format csv|json");
  if (!req.model.empty() && req.model != "griffiths-mzi")
    throw InvalidArgument("sweeps run on the griffiths-mzi model");
  if (req.family != "FpA" && req.family != "FC" && req.family != "FC-refined")
    throw InvalidArgument("sweep families: FpA, FC, FC-refined");
  Range range = parse_range(req.range);
  double inner = req.has_reflectivity_inner ? req.reflectivity_inner : 0.5;
  auto family_at = [&](double r) {
    CircuitModel model = build_griffiths_mzi(MziConfig::from_reflectivities(r, inner));
    return build_family(model, req.family);
  };
  SweepResult result = sweep_consistency(family_at, range.lo, range.hi, range.steps,
                                         req.tolerance);
  std::ostringstream echo;
  echo << "range=" << format_real(range.lo) << ":" << format_real(range.hi) << ":"
       << range.steps << " R_inner=" << format_real(inner);
  emit(req,
       format == "json" ? render_sweep_json(result, req.family, echo.str())
                        : render_sweep_csv(result),
       out);
  return 0;
}

int run_evolve(const Request& req, std::ostream& out) {
  std::string format = req.format.empty() ? "json" : req.format;
  if (format != "json" && format != "text")
    throw InvalidArgument("evolve supports --format json|text");
  std::string params_echo;
  CircuitModel model = build_model(req, params_echo);
  emit(req,
       format == "json" ? render_evolve_json(model, req.model, params_echo)
                        : render_evolve_text(model, req.model, params_echo),
       out);
  return 0;
}

void add_common_options(CLI::App* cmd, Request& req, bool with_family, bool with_range) {
  cmd->add_option("--model", req.model,
                  "griffiths-mzi | michelson-cycle | michelson-two-cycle");
  if (with_family)
    cmd->add_option("--family", req.family,
                    "FpA | FC | FC-refined | Y | Y-refined | two-cycle-1 | two-cycle-2");
  cmd->add_option("--M", req.m, "outer parameter M (outer reflectivity cos^2(pi/2M))");
  cmd->add_option("--N", req.n, "inner parameter N (inner reflectivity cos^2(pi/2N))");
  cmd->add_flag("--bob-blocks", req.bob_blocks, "Bob blocks the communication channel");
  cmd->add_option("--reflectivity-outer", req.reflectivity_outer,
                  "free-form outer reflectivity in (0,1), griffiths-mzi only")
      ->each([&req](const std::string&) { req.has_reflectivity_outer = true; });
  cmd->add_option("--reflectivity-inner", req.reflectivity_inner,
                  "free-form inner reflectivity in (0,1), griffiths-mzi only")
      ->each([&req](const std::string&) { req.has_reflectivity_inner = true; });
  if (with_range) cmd->add_option("--range", req.range, "reflectivity grid lo:hi:steps");
  cmd->add_option("--tol", req.tolerance, "consistency tolerance (default 1e-10)");
  cmd->add_option("--out", req.out_path, "write output to a file instead of stdout");
  cmd->add_option("--format", req.format, "text | json | csv (per-command default)");
}

}  // namespace

int exit_code_for_current_exception(std::ostream& err) {
  try {
    throw;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const ValidationError& e) {
    err << "internal validation failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 3;
  }
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{std::string(kToolName) +
               " - consistent-histories analysis of nested-interferometer protocols"};
  app.set_version_flag("--version", std::string(kToolName) + " " + kToolVersion);
  app.require_subcommand(1);

  Request req;
  CLI::App* analyze = app.add_subcommand(
      "analyze", "build a model and history family, check consistency, report probabilities");
  add_common_options(analyze, req, /*with_family=*/true, /*with_range=*/false);
  analyze->callback([&] {
    if (req.model.empty()) throw InvalidArgument("analyze needs --model");
    if (req.family.empty()) throw InvalidArgument("analyze needs --family");
  });

  CLI::App* sweep = app.add_subcommand(
      "sweep", "sweep the outer reflectivity and locate consistency points");
  add_common_options(sweep, req, /*with_family=*/true, /*with_range=*/true);
  sweep->callback([&] {
    if (req.family.empty()) throw InvalidArgument("sweep needs --family");
    if (req.range.empty()) throw InvalidArgument("sweep needs --range lo:hi:steps");
  });

  CLI::App* evolve_cmd =
      app.add_subcommand("evolve", "print the full state at every time step");
  add_common_options(evolve_cmd, req, /*with_family=*/false, /*with_range=*/false);
  evolve_cmd->callback([&] {
    if (req.model.empty()) throw InvalidArgument("evolve needs --model");
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream scratch;
    int code = app.exit(e, out, scratch);
    if (code == 0) return 0;  // --help / --version
    err << "error: " << scratch.str();
    return 2;
  } catch (...) {
    return exit_code_for_current_exception(err);
  }

  try {
    if (analyze->parsed()) return run_analyze(req, out);
    if (sweep->parsed()) return run_sweep(req, out);
    return run_evolve(req, out);
  } catch (...) {
    return exit_code_for_current_exception(err);
  }
}

}  // namespace qch
