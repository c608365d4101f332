#include "qch/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace qch {

std::string format_real(double x) {
  if (x == 0.0) return "0";
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  if (std::abs(x) < 1e-4)
    std::snprintf(buf, sizeof buf, "%.11e", x);
  else
    std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

ReportDocument make_report(const HistoryFamily& family, const ConsistencyReport& report,
                           const std::string& model_name, const std::string& family_name,
                           const std::string& params_echo) {
  ReportDocument doc;
  doc.model = model_name;
  doc.family = family_name;
  doc.params = params_echo;
  doc.tolerance = report.tolerance;
  doc.num_histories = report.num_histories;
  doc.num_stated = report.unflagged_count;
  doc.max_offdiag = report.max_offdiag;
  doc.max_offdiag_full = report.max_offdiag_full;
  doc.consistent = report.consistent;

  const int last = family.num_slots() - 1;
  // Conditioning mass per final-slot outcome.
  std::vector<double> final_mass(family.slots[last].size(), 0.0);
  for (long idx : report.support) {
    History h = family.history_at(idx);
    final_mass[h.choices[last]] += report.norms[idx] * report.norms[idx];
  }

  // Stated histories always appear; completion histories only when their
  // chain ket survives, mirroring how the families are written down.
  for (long idx = 0; idx < report.num_histories; ++idx) {
    bool flagged = report.flagged[idx] != 0;
    double n = report.norms[idx];
    if (flagged && n <= report.tolerance) continue;
    History h = family.history_at(idx);
    HistoryRow row;
    row.label = family.history_label(h);
    row.flagged = flagged;
    row.norm = n;
    row.prob = n * n;
    double mass = final_mass[h.choices[last]];
    row.cond_prob = mass > 1e-30 ? row.prob / mass : 0.0;
    doc.rows.push_back(std::move(row));
  }

  // Record every Gram entry that witnesses an inconsistency.
  for (size_t i = 0; i < report.support.size(); ++i)
    for (size_t j = i + 1; j < report.support.size(); ++j) {
      Complex g = report.gram_at(static_cast<int>(i), static_cast<int>(j));
      if (std::abs(g) <= report.tolerance) continue;
      GramEntry entry;
      entry.bra = family.history_label(family.history_at(report.support[i]));
      entry.ket = family.history_label(family.history_at(report.support[j]));
      entry.value = g;
      entry.completion_pair = report.flagged[report.support[i]] != 0 ||
                              report.flagged[report.support[j]] != 0;
      doc.offdiagonals.push_back(std::move(entry));
    }
  return doc;
}

std::string render_report_text(const ReportDocument& doc) {
  std::ostringstream os;
  os << kToolName << " " << kToolVersion << "\n";
  os << "model: " << doc.model << " (" << doc.params << ")\n";
  os << "family: " << doc.family << "\n";
  os << "tolerance: " << format_real(doc.tolerance) << "\n";
  os << "convention: " << kConventionNote << "\n";
  os << "histories: " << doc.num_stated << " stated, "
     << (doc.num_histories - doc.num_stated) << " completion\n";
  os << "chain kets (completion branches marked *):\n";
  for (const auto& row : doc.rows) {
    os << "  " << (row.flagged ? "*" : " ") << row.label << "  norm=" << format_real(row.norm);
    if (doc.consistent && !row.flagged)
      os << "  prob=" << format_real(row.prob)
         << "  prob|final=" << format_real(row.cond_prob);
    os << "\n";
  }
  if (!doc.offdiagonals.empty()) {
    os << "non-orthogonal chain-ket pairs:\n";
    for (const auto& e : doc.offdiagonals) {
      os << "  " << (e.completion_pair ? "*" : " ") << "<" << e.bra << " | " << e.ket
         << "> = " << format_real(e.value.real());
      if (e.value.imag() != 0.0)
        os << (e.value.imag() > 0 ? " + " : " - ") << format_real(std::abs(e.value.imag()))
           << "i";
      os << "\n";
    }
  }
  if (doc.consistent) {
    os << "VERDICT: CONSISTENT\n";
    os << "max_offdiag: " << format_real(doc.max_offdiag)
       << " (all branches: " << format_real(doc.max_offdiag_full) << ")\n";
    for (const auto& [name, value] : doc.headline)
      os << name << " = " << format_real(value) << "\n";
  } else {
    os << "VERDICT: INCONSISTENT(max_offdiag=" << format_real(doc.max_offdiag) << ")\n";
    os << "max_offdiag: " << format_real(doc.max_offdiag)
       << " (all branches: " << format_real(doc.max_offdiag_full) << ")\n";
    os << "probabilities: meaningless for an inconsistent family\n";
  }
  return os.str();
}

std::string render_report_json(const ReportDocument& doc) {
  std::ostringstream os;
  os << "{";
  os << "\"tool\":\"" << kToolName << " " << kToolVersion << "\",";
  os << "\"model\":\"" << json_escape(doc.model) << "\",";
  os << "\"family\":\"" << json_escape(doc.family) << "\",";
  os << "\"params\":\"" << json_escape(doc.params) << "\",";
  os << "\"tolerance\":" << format_real(doc.tolerance) << ",";
  os << "\"convention\":\"" << json_escape(kConventionNote) << "\",";
  os << "\"histories\":" << doc.num_histories << ",";
  os << "\"stated_histories\":" << doc.num_stated << ",";
  os << "\"consistent\":" << (doc.consistent ? "true" : "false") << ",";
  os << "\"max_offdiag\":" << format_real(doc.max_offdiag) << ",";
  os << "\"max_offdiag_all_branches\":" << format_real(doc.max_offdiag_full) << ",";
  os << "\"chain_kets\":[";
  for (size_t i = 0; i < doc.rows.size(); ++i) {
    const auto& row = doc.rows[i];
    if (i) os << ",";
    os << "{\"history\":\"" << json_escape(row.label) << "\",";
    os << "\"completion\":" << (row.flagged ? "true" : "false") << ",";
    os << "\"norm\":" << format_real(row.norm);
    if (doc.consistent && !row.flagged)
      os << ",\"prob\":" << format_real(row.prob)
         << ",\"prob_given_final\":" << format_real(row.cond_prob);
    os << "}";
  }
  os << "],";
  os << "\"gram_offdiagonals\":[";
  for (size_t i = 0; i < doc.offdiagonals.size(); ++i) {
    const auto& e = doc.offdiagonals[i];
    if (i) os << ",";
    os << "{\"bra\":\"" << json_escape(e.bra) << "\",\"ket\":\"" << json_escape(e.ket)
       << "\",\"re\":" << format_real(e.value.real())
       << ",\"im\":" << format_real(e.value.imag())
       << ",\"completion_pair\":" << (e.completion_pair ? "true" : "false") << "}";
  }
  os << "],";
  os << "\"probabilities\":";
  if (doc.consistent) {
    os << "[";
    for (size_t i = 0; i < doc.headline.size(); ++i) {
      if (i) os << ",";
      os << "{\"name\":\"" << json_escape(doc.headline[i].first)
         << "\",\"value\":" << format_real(doc.headline[i].second) << "}";
    }
    os << "]";
  } else {
    os << "null";
  }
  os << "}\n";
  return os.str();
}

std::string render_sweep_csv(const SweepResult& result) {
  std::ostringstream os;
  os << "reflectivity,max_offdiag,consistent\n";
  for (const auto& row : result.rows)
    os << format_real(row.reflectivity) << "," << format_real(row.max_offdiag) << ","
       << (row.consistent ? 1 : 0) << "\n";
  for (const auto& crossing : result.crossings)
    os << "crossing," << format_real(crossing.reflectivity) << ","
       << format_real(crossing.max_offdiag) << "\n";
  return os.str();
}

std::string render_sweep_json(const SweepResult& result, const std::string& family_name,
                              const std::string& params_echo) {
  std::ostringstream os;
  os << "{";
  os << "\"tool\":\"" << kToolName << " " << kToolVersion << "\",";
  os << "\"family\":\"" << json_escape(family_name) << "\",";
  os << "\"params\":\"" << json_escape(params_echo) << "\",";
  os << "\"rows\":[";
  for (size_t i = 0; i < result.rows.size(); ++i) {
    if (i) os << ",";
    os << "{\"reflectivity\":" << format_real(result.rows[i].reflectivity)
       << ",\"max_offdiag\":" << format_real(result.rows[i].max_offdiag)
       << ",\"consistent\":" << (result.rows[i].consistent ? "true" : "false") << "}";
  }
  os << "],\"crossings\":[";
  for (size_t i = 0; i < result.crossings.size(); ++i) {
    if (i) os << ",";
    os << "{\"reflectivity\":" << format_real(result.crossings[i].reflectivity)
       << ",\"max_offdiag\":" << format_real(result.crossings[i].max_offdiag) << "}";
  }
  os << "]}\n";
  return os.str();
}

namespace {

// Amplitudes below this are omitted from evolve output.
constexpr double kPrintTol = 1e-12;

}  // namespace

std::string render_evolve_json(const CircuitModel& model, const std::string& model_name,
                               const std::string& params_echo) {
  auto states = evolve(model);
  std::ostringstream os;
  os << "{";
  os << "\"tool\":\"" << kToolName << " " << kToolVersion << "\",";
  os << "\"model\":\"" << json_escape(model_name) << "\",";
  os << "\"params\":\"" << json_escape(params_echo) << "\",";
  os << "\"convention\":\"" << json_escape(kConventionNote) << "\",";
  os << "\"times\":[";
  for (size_t t = 0; t < states.size(); ++t) {
    if (t) os << ",";
    os << "{\"t\":" << t << ",\"norm\":" << format_real(norm(states[t])) << ",\"entries\":[";
    bool first = true;
    for (const auto& [idx, amp] : states[t].amplitudes()) {
      if (std::abs(amp) <= kPrintTol) continue;
      if (!first) os << ",";
      first = false;
      os << "{\"channel\":\"" << json_escape(model.space->channel_name(model.space->basis_channel(idx)))
         << "\",\"pol\":\"" << json_escape(model.space->pol_name(model.space->basis_pol(idx)))
         << "\",\"re\":" << format_real(amp.real()) << ",\"im\":" << format_real(amp.imag())
         << "}";
    }
    os << "]}";
  }
  os << "]}\n";
  return os.str();
}

std::string render_evolve_text(const CircuitModel& model, const std::string& model_name,
                               const std::string& params_echo) {
  auto states = evolve(model);
  std::ostringstream os;
  os << kToolName << " " << kToolVersion << "\n";
  os << "model: " << model_name << " (" << params_echo << ")\n";
  for (size_t t = 0; t < states.size(); ++t) {
    os << "t" << t << "  norm=" << format_real(norm(states[t])) << "\n";
    for (const auto& [idx, amp] : states[t].amplitudes()) {
      if (std::abs(amp) <= kPrintTol) continue;
      os << "  " << model.space->basis_label(idx) << ": " << format_real(amp.real());
      if (amp.imag() != 0.0)
        os << (amp.imag() > 0 ? " + " : " - ") << format_real(std::abs(amp.imag())) << "i";
      os << "  (p=" << format_real(std::norm(amp)) << ")\n";
    }
  }
  return os.str();
}

}  // namespace qch
