#ifndef POLYRC_REPORT_HPP_
#define POLYRC_REPORT_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "polyrc/corpus.hpp"
#include "polyrc/metrics.hpp"

namespace polyrc {

class ReportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kReportSchemaVersion = 1;

struct CellStats {
  double mean = 0.0;
  double stddev = 0.0;
  std::vector<double> runs;  // one value per seed
};

// One line of a results table, e.g. the IL variant in SVO order.
struct ReportRow {
  std::string label;
  std::string variant;     // null | cs | sp | il
  std::string word_order;  // svo | sov
  std::map<std::string, CellStats> languages;
  std::map<LanguageGroup, CellStats> groups;
  CellStats macro;
};

// per_run[lang][i] is the score of run i. Group and macro cells are
// aggregated within each run first, then summarised across runs.
ReportRow make_row(std::string label, std::string variant, std::string word_order,
                   const std::map<std::string, std::vector<double>>& per_run, StdKind std_kind);

struct Provenance {
  std::string protocol;
  std::vector<std::uint64_t> seeds;
  nlohmann::ordered_json train_config;
  std::optional<std::size_t> k;
  std::string backend;
  std::string f1_convention = "all-classes";
  std::string std_kind = "population";
  std::string config_hash;
  std::string version = POLYRC_VERSION;
  nlohmann::ordered_json run_spec;  // full resolved spec
};

struct EvalReport {
  std::vector<ReportRow> rows;
  Provenance provenance;
  // Episode flags, truncation and tie counts, etc.
  nlohmann::ordered_json diagnostics = nlohmann::ordered_json::object();
};

nlohmann::ordered_json to_json(const EvalReport& report);
EvalReport report_from_json(const nlohmann::json& j);

// Throws ReportError describing the first schema violation.
void validate_report_json(const nlohmann::json& j);

// Columns: languages | EN H M L | X̄. Cells show "mean" for single runs and
// "mean±std" otherwise, one decimal.
std::string to_markdown(const EvalReport& report);

}  // namespace polyrc

#endif  // POLYRC_REPORT_HPP_
