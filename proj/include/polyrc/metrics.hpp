#ifndef POLYRC_METRICS_HPP_
#define POLYRC_METRICS_HPP_

#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "polyrc/corpus.hpp"

namespace polyrc {

class MetricsError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr std::string_view kNoRelation = "no_relation";

enum class F1Convention { AllClasses, ExcludeNoRelation };

std::string_view to_string(F1Convention convention);
F1Convention parse_f1_convention(std::string_view name);  // all-classes | exclude-no-relation

struct MicroCounts {
  std::size_t true_positive = 0;
  std::size_t predicted = 0;  // predictions counted under the convention
  std::size_t gold = 0;       // gold labels counted under the convention
};

MicroCounts micro_counts(const std::vector<std::string>& predictions,
                         const std::vector<std::string>& gold, F1Convention convention);

// Micro-F1 in percent. Under AllClasses with one prediction per example it
// equals accuracy. Zero when there is nothing to count.
double micro_f1(const std::vector<std::string>& predictions,
                const std::vector<std::string>& gold,
                F1Convention convention = F1Convention::AllClasses);

// Unweighted mean; throws on an empty map.
double macro_average(const std::map<std::string, double>& per_language);

// Unweighted mean per resource group over the languages present.
std::map<LanguageGroup, double> group_average(const std::map<std::string, double>& per_language);

enum class StdKind { Population, Sample };

std::string_view to_string(StdKind kind);
StdKind parse_std_kind(std::string_view name);

struct RunStats {
  double mean = 0.0;
  double stddev = 0.0;
  std::size_t runs = 0;
};

// Sample std of a single value is reported as 0.
RunStats run_stats(const std::vector<double>& values, StdKind kind = StdKind::Population);

// Rounds half away from zero at `decimals` places, treating the value as the
// shortest decimal that round-trips (so 3.65 gives 3.7).
double round_display(double value, int decimals = 1);
std::string format_fixed(double value, int decimals = 1);

}  // namespace polyrc

#endif  // POLYRC_METRICS_HPP_
