#include <gtest/gtest.h>

#include <cmath>

#include "polyrc/metrics.hpp"

using namespace polyrc;

namespace {

const std::vector<std::string> kLangs{"ar", "de", "en", "es", "fa", "fr", "it",
                                      "ko", "nl", "pl", "pt", "ru", "sv", "uk"};

std::map<std::string, double> row(const std::vector<double>& v) {
  std::map<std::string, double> out;
  for (std::size_t i = 0; i < kLangs.size(); ++i) out[kLangs[i]] = v[i];
  return out;
}

}  // namespace

TEST(Metrics, PerfectScore) {
  const std::vector<std::string> g{"a", "b", "c"};
  EXPECT_DOUBLE_EQ(micro_f1(g, g), 100.0);
}

TEST(Metrics, ThreeClassConfusion) {
  const std::vector<std::string> gold{"a", "a", "b", "b", "c", "c"};
  const std::vector<std::string> pred{"a", "b", "b", "c", "c", "a"};
  EXPECT_DOUBLE_EQ(micro_f1(pred, gold), 50.0);
  const auto c = micro_counts(pred, gold, F1Convention::AllClasses);
  EXPECT_EQ(c.true_positive, 3u);
  EXPECT_EQ(c.predicted, 6u);
  EXPECT_EQ(c.gold, 6u);
}

TEST(Metrics, AllClassesEqualsAccuracy) {
  const std::vector<std::string> gold{"x", "y", "y", "z", "x", "x", "z"};
  const std::vector<std::string> pred{"x", "x", "y", "z", "z", "x", "y"};
  std::size_t hits = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) hits += gold[i] == pred[i];
  EXPECT_NEAR(micro_f1(pred, gold), 100.0 * hits / gold.size(), 1e-12);
}

TEST(Metrics, ExcludeNoRelation) {
  const std::vector<std::string> gold{"no_relation", "r", "r", "no_relation"};
  const std::vector<std::string> pred{"r", "r", "no_relation", "no_relation"};
  const auto c = micro_counts(pred, gold, F1Convention::ExcludeNoRelation);
  EXPECT_EQ(c.true_positive, 1u);
  EXPECT_EQ(c.predicted, 2u);
  EXPECT_EQ(c.gold, 2u);
  EXPECT_DOUBLE_EQ(micro_f1(pred, gold, F1Convention::ExcludeNoRelation), 50.0);
  EXPECT_DOUBLE_EQ(micro_f1(pred, gold), 50.0);
  const std::vector<std::string> none{"no_relation"};
  EXPECT_DOUBLE_EQ(micro_f1(none, none, F1Convention::ExcludeNoRelation), 0.0);
}

TEST(Metrics, Errors) {
  EXPECT_THROW(micro_f1({"a"}, {"a", "b"}), MetricsError);
  EXPECT_THROW(macro_average({}), MetricsError);
  EXPECT_THROW(group_average({{"zz", 1.0}}), std::invalid_argument);
  EXPECT_THROW(run_stats({}), MetricsError);
  EXPECT_EQ(parse_f1_convention("exclude-no-relation"), F1Convention::ExcludeNoRelation);
  EXPECT_THROW(parse_f1_convention("macro"), std::invalid_argument);
}

TEST(Metrics, InLanguageRowMacro) {
  const auto il = row({94.1, 94.0, 96.0, 70.5, 73.1, 97.2, 97.0, 83.2, 93.5, 93.0, 85.2, 83.3,
                       58.7, 71.8});
  EXPECT_DOUBLE_EQ(round_display(macro_average(il)), 85.0);
}

TEST(Metrics, EntityMarkerRowGroups) {
  const auto em = row({98.4, 95.7, 95.9, 27.9, 0.0, 82.6, 98.9, 64.6, 92.2, 97.4, 97.4, 96.9,
                       2.2, 5.1});
  const auto g = group_average(em);
  EXPECT_DOUBLE_EQ(round_display(g.at(LanguageGroup::H)), 86.1);
  EXPECT_DOUBLE_EQ(round_display(g.at(LanguageGroup::M)), 54.3);
  EXPECT_DOUBLE_EQ(round_display(g.at(LanguageGroup::L)), 3.7);
  EXPECT_DOUBLE_EQ(g.at(LanguageGroup::EN), 95.9);
}

TEST(Metrics, RunStats) {
  const auto s = run_stats({10.0, 20.0});
  EXPECT_DOUBLE_EQ(s.mean, 15.0);
  EXPECT_DOUBLE_EQ(s.stddev, 5.0);
  EXPECT_EQ(s.runs, 2u);
  EXPECT_NEAR(run_stats({10.0, 20.0}, StdKind::Sample).stddev, std::sqrt(50.0), 1e-12);
  EXPECT_DOUBLE_EQ(run_stats({42.0}, StdKind::Sample).stddev, 0.0);

  const std::vector<double> v{61.2, 58.9, 64.0, 60.3, 59.7};
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= v.size();
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  const auto r = run_stats(v);
  EXPECT_NEAR(r.mean, mean, 1e-12);
  EXPECT_NEAR(r.stddev, std::sqrt(ss / v.size()), 1e-12);
}

TEST(Metrics, DisplayRounding) {
  EXPECT_DOUBLE_EQ(round_display(3.65), 3.7);
  EXPECT_DOUBLE_EQ(round_display(85.04285714), 85.0);
  EXPECT_DOUBLE_EQ(round_display(-0.25), -0.3);
  EXPECT_EQ(format_fixed(3.65), "3.7");
  EXPECT_EQ(format_fixed(2.0, 2), "2.00");
}
