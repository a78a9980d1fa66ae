#include <gtest/gtest.h>

#include "polyrc/report.hpp"

using namespace polyrc;

namespace {

EvalReport sample_report() {
  EvalReport r;
  r.rows.push_back(make_row("IL", "il", "svo", {{"en", {10.0, 20.0}}, {"de", {30.0, 50.0}}},
                            StdKind::Population));
  r.provenance.protocol = "fewshot";
  r.provenance.seeds = {13, 36};
  r.provenance.train_config = {{"learning_rate", 3e-4}};
  r.provenance.k = 8;
  r.provenance.backend = "toy";
  r.provenance.config_hash = "00ff";
  r.provenance.run_spec = {{"k", 8}};
  r.diagnostics["note"] = "x";
  return r;
}

}  // namespace

TEST(Report, RowAggregatesPerRunFirst) {
  const auto row = sample_report().rows[0];
  EXPECT_DOUBLE_EQ(row.languages.at("en").mean, 15.0);
  EXPECT_DOUBLE_EQ(row.languages.at("en").stddev, 5.0);
  EXPECT_DOUBLE_EQ(row.groups.at(LanguageGroup::H).mean, 40.0);
  EXPECT_DOUBLE_EQ(row.groups.at(LanguageGroup::EN).mean, 15.0);
  EXPECT_FALSE(row.groups.count(LanguageGroup::M));
  // runs: (10+30)/2, (20+50)/2
  EXPECT_EQ(row.macro.runs, (std::vector<double>{20.0, 35.0}));
  EXPECT_DOUBLE_EQ(row.macro.mean, 27.5);
  EXPECT_DOUBLE_EQ(row.macro.stddev, 7.5);
}

TEST(Report, RaggedRunsRejected) {
  EXPECT_THROW(make_row("x", "il", "svo", {{"en", {1.0}}, {"de", {1.0, 2.0}}},
                        StdKind::Population),
               ReportError);
}

TEST(Report, JsonRoundTripAndValidation) {
  const auto r = sample_report();
  const auto j = to_json(r);
  EXPECT_NO_THROW(validate_report_json(j));
  const auto back = report_from_json(j);
  EXPECT_EQ(to_json(back), j);
  EXPECT_EQ(j["provenance"]["seeds"], (nlohmann::json{13, 36}));

  auto bad = nlohmann::json(j);
  bad["rows"][0]["languages"]["en"]["mean"] = 120.0;
  EXPECT_THROW(validate_report_json(bad), ReportError);
  bad = j;
  bad["rows"][0]["languages"]["en"].erase("runs");
  EXPECT_THROW(validate_report_json(bad), ReportError);
  bad = j;
  bad["schema_version"] = 99;
  EXPECT_THROW(validate_report_json(bad), ReportError);
  bad = j;
  bad["rows"][0]["groups"]["XL"] = j["rows"][0]["macro"];
  EXPECT_THROW(validate_report_json(bad), ReportError);
}

TEST(Report, Markdown) {
  const auto md = to_markdown(sample_report());
  EXPECT_NE(md.find("| | de | en |"), std::string::npos) << md;
  EXPECT_NE(md.find("15.0±5.0"), std::string::npos);
  EXPECT_NE(md.find("27.5±7.5"), std::string::npos);
  EXPECT_NE(md.find("X̄"), std::string::npos);

  EvalReport single;
  single.rows.push_back(make_row("CS", "cs", "svo", {{"en", {64.25}}}, StdKind::Population));
  const auto md1 = to_markdown(single);
  EXPECT_NE(md1.find("| CS | 64.3 |"), std::string::npos) << md1;
}
