#include "polyrc/report.hpp"

#include <algorithm>
#include <sstream>

namespace polyrc {

namespace {

CellStats summarise(const std::vector<double>& values, StdKind kind) {
  const auto s = run_stats(values, kind);
  return {s.mean, s.stddev, values};
}

nlohmann::ordered_json cell_json(const CellStats& c) {
  nlohmann::ordered_json j;
  j["mean"] = c.mean;
  j["std"] = c.stddev;
  j["runs"] = c.runs;
  return j;
}

CellStats cell_from_json(const nlohmann::json& j) {
  return {j.at("mean").get<double>(), j.at("std").get<double>(),
          j.at("runs").get<std::vector<double>>()};
}

LanguageGroup parse_group(const std::string& name) {
  for (auto g : all_groups()) {
    if (to_string(g) == name) return g;
  }
  throw ReportError("unknown language group '" + name + "'");
}

// SMiLER languages in their usual order first, anything else after.
std::vector<std::string> column_order(const EvalReport& report) {
  std::set<std::string> present;
  for (const auto& row : report.rows) {
    for (const auto& [lang, c] : row.languages) present.insert(lang);
  }
  std::vector<std::string> out;
  for (const auto& l : smiler_languages()) {
    if (present.erase(l)) out.push_back(l);
  }
  out.insert(out.end(), present.begin(), present.end());
  return out;
}

std::string cell_text(const CellStats& c) {
  if (c.runs.size() <= 1) return format_fixed(c.mean);
  return format_fixed(c.mean) + "±" + format_fixed(c.stddev);
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ReportError("report schema: " + what);
}

void check_cell(const nlohmann::json& j, const std::string& where) {
  require(j.is_object(), where + " must be an object");
  for (const char* k : {"mean", "std"}) {
    require(j.contains(k) && j[k].is_number(), where + "." + k + " must be a number");
  }
  require(j.contains("runs") && j["runs"].is_array(), where + ".runs must be an array");
  for (const auto& v : j["runs"]) require(v.is_number(), where + ".runs must hold numbers");
  const double m = j["mean"].get<double>();
  require(m >= 0.0 && m <= 100.0, where + ".mean outside [0, 100]");
}

}  // namespace

ReportRow make_row(std::string label, std::string variant, std::string word_order,
                   const std::map<std::string, std::vector<double>>& per_run, StdKind std_kind) {
  if (per_run.empty()) throw ReportError("report row '" + label + "' has no languages");
  const std::size_t runs = per_run.begin()->second.size();
  if (runs == 0) throw ReportError("report row '" + label + "' has no runs");
  ReportRow row{std::move(label), std::move(variant), std::move(word_order), {}, {}, {}};
  std::map<LanguageGroup, std::vector<double>> group_runs;
  std::vector<double> macro_runs;
  for (std::size_t i = 0; i < runs; ++i) {
    std::map<std::string, double> at_run;
    for (const auto& [lang, values] : per_run) {
      if (values.size() != runs) {
        throw ReportError("language '" + lang + "' has " + std::to_string(values.size()) +
                          " runs, expected " + std::to_string(runs));
      }
      at_run[lang] = values[i];
    }
    macro_runs.push_back(macro_average(at_run));
    std::map<std::string, double> groupable;
    for (const auto& [lang, v] : at_run) {
      if (is_smiler_language(lang)) groupable[lang] = v;
    }
    for (const auto& [g, v] : group_average(groupable)) group_runs[g].push_back(v);
  }
  for (const auto& [lang, values] : per_run) row.languages[lang] = summarise(values, std_kind);
  for (const auto& [g, values] : group_runs) row.groups[g] = summarise(values, std_kind);
  row.macro = summarise(macro_runs, std_kind);
  return row;
}

nlohmann::ordered_json to_json(const EvalReport& report) {
  nlohmann::ordered_json j;
  j["schema_version"] = kReportSchemaVersion;
  nlohmann::ordered_json prov;
  const auto& p = report.provenance;
  prov["protocol"] = p.protocol;
  prov["seeds"] = p.seeds;
  prov["train_config"] = p.train_config;
  prov["k"] = p.k ? nlohmann::ordered_json(*p.k) : nlohmann::ordered_json(nullptr);
  prov["backend"] = p.backend;
  prov["f1_convention"] = p.f1_convention;
  prov["std_kind"] = p.std_kind;
  prov["config_hash"] = p.config_hash;
  prov["version"] = p.version;
  prov["run_spec"] = p.run_spec;
  j["provenance"] = prov;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& row : report.rows) {
    nlohmann::ordered_json r;
    r["label"] = row.label;
    r["variant"] = row.variant;
    r["word_order"] = row.word_order;
    r["languages"] = nlohmann::ordered_json::object();
    for (const auto& [lang, c] : row.languages) r["languages"][lang] = cell_json(c);
    r["groups"] = nlohmann::ordered_json::object();
    for (const auto& [g, c] : row.groups) r["groups"][std::string(to_string(g))] = cell_json(c);
    r["macro"] = cell_json(row.macro);
    rows.push_back(std::move(r));
  }
  j["rows"] = rows;
  j["diagnostics"] = report.diagnostics;
  return j;
}

void validate_report_json(const nlohmann::json& j) {
  require(j.is_object(), "top level must be an object");
  require(j.contains("schema_version") && j["schema_version"] == kReportSchemaVersion,
          "schema_version must be " + std::to_string(kReportSchemaVersion));
  for (const char* k : {"provenance", "rows", "diagnostics"}) {
    require(j.contains(k), std::string("missing '") + k + "'");
  }
  const auto& p = j["provenance"];
  require(p.is_object(), "provenance must be an object");
  for (const char* k : {"protocol", "backend", "f1_convention", "std_kind", "config_hash",
                        "version"}) {
    require(p.contains(k) && p[k].is_string(), std::string("provenance.") + k +
                                                   " must be a string");
  }
  require(p.contains("seeds") && p["seeds"].is_array() && !p["seeds"].empty(),
          "provenance.seeds must be a non-empty array");
  for (const auto& s : p["seeds"]) require(s.is_number_unsigned(), "seeds must be unsigned");
  require(p.contains("train_config") && p["train_config"].is_object(),
          "provenance.train_config must be an object");
  require(p.contains("k") && (p["k"].is_null() || p["k"].is_number_unsigned()),
          "provenance.k must be null or unsigned");
  require(p.contains("run_spec"), "provenance.run_spec missing");
  require(j["rows"].is_array(), "rows must be an array");
  for (const auto& r : j["rows"]) {
    for (const char* k : {"label", "variant", "word_order"}) {
      require(r.contains(k) && r[k].is_string(), std::string("row.") + k + " must be a string");
    }
    require(r.contains("languages") && r["languages"].is_object() && !r["languages"].empty(),
            "row.languages must be a non-empty object");
    std::size_t runs = 0;
    for (const auto& [lang, c] : r["languages"].items()) {
      check_cell(c, "languages." + lang);
      if (runs == 0) runs = c["runs"].size();
      require(!c["runs"].empty() && c["runs"].size() == runs,
              "languages." + lang + " must hold as many runs as the rest of its row");
    }
    require(r.contains("groups") && r["groups"].is_object(), "row.groups must be an object");
    for (const auto& [g, c] : r["groups"].items()) {
      parse_group(g);
      check_cell(c, "groups." + g);
    }
    require(r.contains("macro"), "row.macro missing");
    check_cell(r["macro"], "macro");
  }
  require(j["diagnostics"].is_object(), "diagnostics must be an object");
}

EvalReport report_from_json(const nlohmann::json& j) {
  validate_report_json(j);
  EvalReport report;
  const auto& p = j["provenance"];
  auto& out = report.provenance;
  out.protocol = p["protocol"];
  out.seeds = p["seeds"].get<std::vector<std::uint64_t>>();
  out.train_config = p["train_config"];
  if (!p["k"].is_null()) out.k = p["k"].get<std::size_t>();
  out.backend = p["backend"];
  out.f1_convention = p["f1_convention"];
  out.std_kind = p["std_kind"];
  out.config_hash = p["config_hash"];
  out.version = p["version"];
  out.run_spec = p["run_spec"];
  for (const auto& r : j["rows"]) {
    ReportRow row;
    row.label = r["label"];
    row.variant = r["variant"];
    row.word_order = r["word_order"];
    for (const auto& [lang, c] : r["languages"].items()) row.languages[lang] = cell_from_json(c);
    for (const auto& [g, c] : r["groups"].items()) row.groups[parse_group(g)] = cell_from_json(c);
    row.macro = cell_from_json(r["macro"]);
    report.rows.push_back(std::move(row));
  }
  report.diagnostics = j["diagnostics"];
  return report;
}

std::string to_markdown(const EvalReport& report) {
  const auto langs = column_order(report);
  std::vector<LanguageGroup> groups;
  for (auto g : all_groups()) {
    for (const auto& row : report.rows) {
      if (row.groups.count(g)) {
        groups.push_back(g);
        break;
      }
    }
  }
  std::ostringstream out;
  out << "| |";
  for (const auto& l : langs) out << ' ' << l << " |";
  for (auto g : groups) out << ' ' << to_string(g) << " |";
  out << " X̄ |\n|---|";
  for (std::size_t i = 0; i < langs.size() + groups.size() + 1; ++i) out << "---|";
  out << '\n';
  for (const auto& row : report.rows) {
    out << "| " << row.label << " |";
    for (const auto& l : langs) {
      const auto it = row.languages.find(l);
      out << ' ' << (it == row.languages.end() ? "-" : cell_text(it->second)) << " |";
    }
    for (auto g : groups) {
      const auto it = row.groups.find(g);
      out << ' ' << (it == row.groups.end() ? "-" : cell_text(it->second)) << " |";
    }
    out << ' ' << cell_text(row.macro) << " |\n";
  }
  return out.str();
}

}  // namespace polyrc
