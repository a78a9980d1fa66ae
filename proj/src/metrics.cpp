#include "polyrc/metrics.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

namespace polyrc {

std::string_view to_string(F1Convention convention) {
  return convention == F1Convention::AllClasses ? "all-classes" : "exclude-no-relation";
}

F1Convention parse_f1_convention(std::string_view name) {
  if (name == "all-classes") return F1Convention::AllClasses;
  if (name == "exclude-no-relation") return F1Convention::ExcludeNoRelation;
  throw MetricsError("unknown F1 convention '" + std::string(name) + "'");
}

MicroCounts micro_counts(const std::vector<std::string>& predictions,
                         const std::vector<std::string>& gold, F1Convention convention) {
  if (predictions.size() != gold.size()) {
    throw MetricsError("micro_f1: " + std::to_string(predictions.size()) +
                       " predictions for " + std::to_string(gold.size()) + " gold labels");
  }
  const bool skip_nr = convention == F1Convention::ExcludeNoRelation;
  MicroCounts c;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const bool pred_counted = !(skip_nr && predictions[i] == kNoRelation);
    const bool gold_counted = !(skip_nr && gold[i] == kNoRelation);
    if (pred_counted) ++c.predicted;
    if (gold_counted) ++c.gold;
    if (pred_counted && gold_counted && predictions[i] == gold[i]) ++c.true_positive;
  }
  return c;
}

double micro_f1(const std::vector<std::string>& predictions,
                const std::vector<std::string>& gold, F1Convention convention) {
  const auto c = micro_counts(predictions, gold, convention);
  if (c.true_positive == 0) return 0.0;
  const double p = static_cast<double>(c.true_positive) / static_cast<double>(c.predicted);
  const double r = static_cast<double>(c.true_positive) / static_cast<double>(c.gold);
  return 100.0 * 2.0 * p * r / (p + r);
}

double macro_average(const std::map<std::string, double>& per_language) {
  if (per_language.empty()) throw MetricsError("macro_average of no languages");
  double sum = 0.0;
  for (const auto& [lang, v] : per_language) sum += v;
  return sum / static_cast<double>(per_language.size());
}

std::map<LanguageGroup, double> group_average(const std::map<std::string, double>& per_language) {
  std::map<LanguageGroup, std::pair<double, std::size_t>> acc;
  for (const auto& [lang, v] : per_language) {
    LanguageGroup g;
    try {
      g = group_of(lang);
    } catch (const std::invalid_argument&) {
      throw MetricsError("language '" + lang + "' belongs to no resource group");
    }
    acc[g].first += v;
    acc[g].second += 1;
  }
  std::map<LanguageGroup, double> out;
  for (const auto& [g, s] : acc) out[g] = s.first / static_cast<double>(s.second);
  return out;
}

std::string_view to_string(StdKind kind) {
  return kind == StdKind::Population ? "population" : "sample";
}

StdKind parse_std_kind(std::string_view name) {
  if (name == "population") return StdKind::Population;
  if (name == "sample") return StdKind::Sample;
  throw MetricsError("unknown std kind '" + std::string(name) + "'");
}

RunStats run_stats(const std::vector<double>& values, StdKind kind) {
  if (values.empty()) throw MetricsError("run_stats of no values");
  RunStats s;
  s.runs = values.size();
  for (double v : values) s.mean += v;
  s.mean /= static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  const std::size_t denom = kind == StdKind::Population ? values.size() : values.size() - 1;
  s.stddev = denom == 0 ? 0.0 : std::sqrt(ss / static_cast<double>(denom));
  return s;
}

double round_display(double value, int decimals) {
  if (!std::isfinite(value)) return value;
  // shortest round-trip decimal, then round that string
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::fixed);
  std::string digits(buf, res.ptr);
  const bool negative = !digits.empty() && digits[0] == '-';
  if (negative) digits.erase(0, 1);
  const auto dot = digits.find('.');
  std::string int_part = dot == std::string::npos ? digits : digits.substr(0, dot);
  std::string frac = dot == std::string::npos ? "" : digits.substr(dot + 1);
  const auto keep = static_cast<std::size_t>(std::max(decimals, 0));
  bool round_up = frac.size() > keep && frac[keep] >= '5';
  frac.resize(keep, '0');
  std::string all = int_part + frac;
  if (round_up) {
    int i = static_cast<int>(all.size()) - 1;
    while (i >= 0) {
      if (all[static_cast<std::size_t>(i)] == '9') {
        all[static_cast<std::size_t>(i)] = '0';
        --i;
      } else {
        ++all[static_cast<std::size_t>(i)];
        break;
      }
    }
    if (i < 0) all.insert(all.begin(), '1');
  }
  const std::string text =
      all.substr(0, all.size() - keep) + (keep ? "." + all.substr(all.size() - keep) : "");
  const double out = std::stod(text);
  return negative ? -out : out;
}

std::string format_fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, round_display(value, decimals));
  return buf;
}

}  // namespace polyrc
