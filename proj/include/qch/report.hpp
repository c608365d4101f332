#pragma once
//
// Deterministic report documents and emitters for the command-line front
// end. All numbers go through one formatter (12 significant digits,
// lowercase scientific below 1e-4) so repeated runs are byte-identical.
//

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qch/histories.hpp"
#include "qch/protocols.hpp"

namespace qch {

inline constexpr const char* kToolName = "qch";
inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr const char* kConventionNote =
    "beam splitters: symmetric i-phase convention; polarization rotators: real rotation; "
    "consistency over stated (non-completion) histories";

std::string format_real(double x);
std::string json_escape(const std::string& s);

struct HistoryRow {
  std::string label;
  bool flagged = false;
  double norm = 0.0;
  double prob = 0.0;       // |K|^2
  double cond_prob = 0.0;  // conditional on the history's own final outcome
};

// Off-diagonal Gram entry above tolerance: a witness of inconsistency.
struct GramEntry {
  std::string bra;
  std::string ket;
  Complex value;
  bool completion_pair = false;
};

struct ReportDocument {
  std::string model;
  std::string family;
  std::string params;  // "M=2 N=2 ..." echo
  double tolerance = kAmpTol;
  long num_histories = 0;
  long num_stated = 0;  // unflagged
  std::vector<HistoryRow> rows;
  std::vector<GramEntry> offdiagonals;
  double max_offdiag = 0.0;
  double max_offdiag_full = 0.0;
  bool consistent = false;
  // Named probabilities, only populated for consistent families.
  std::vector<std::pair<std::string, double>> headline;
};

ReportDocument make_report(const HistoryFamily& family, const ConsistencyReport& report,
                           const std::string& model_name, const std::string& family_name,
                           const std::string& params_echo);

std::string render_report_text(const ReportDocument& doc);
std::string render_report_json(const ReportDocument& doc);

std::string render_sweep_csv(const SweepResult& result);
std::string render_sweep_json(const SweepResult& result, const std::string& family_name,
                              const std::string& params_echo);

std::string render_evolve_json(const CircuitModel& model, const std::string& model_name,
                               const std::string& params_echo);
std::string render_evolve_text(const CircuitModel& model, const std::string& model_name,
                               const std::string& params_echo);

}  // namespace qch
