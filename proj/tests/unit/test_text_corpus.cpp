#include <gtest/gtest.h>

#include <sstream>

#include "oracle.hpp"
#include "polyrc/corpus.hpp"
#include "polyrc/text.hpp"

using namespace polyrc;

TEST(Text, CodepointHelpers) {
  const std::string s = "Čapek psal Válku.";
  EXPECT_EQ(codepoint_length(s), 17u);
  EXPECT_EQ(codepoint_substr(s, 11, 16), "Válku");
  EXPECT_EQ(last_codepoint("ok。"), "。");
  EXPECT_THROW(codepoint_length(std::string("\xff")), Utf8Error);
}

TEST(Text, SplitAndTrim) {
  EXPECT_EQ(trim("  a b \t"), "a b");
  EXPECT_EQ(split_whitespace(" a  b\tc "), (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_EQ(split("a,,b", ','), (std::vector<std::string>{"a", "", "b"}));
  EXPECT_EQ(join({"x", "y"}, "-"), "x-y");
}

TEST(Corpus, LoadsGoetheRow) {
  std::istringstream in(
      R"({"text":"Goethe schrieb Faust.","head":[15,20],"tail":[0,6],"relation":"has-author","lang":"de"})"
      "\n");
  const auto d = parse_canonical_jsonl(in);
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d.examples()[0].head_text(), "Faust");
  EXPECT_EQ(d.examples()[0].tail_text(), "Goethe");
  EXPECT_EQ(d.examples()[0].language, "de");
}

TEST(Corpus, EmptyInputGivesEmptyDataset) {
  std::istringstream in("");
  EXPECT_TRUE(parse_canonical_jsonl(in).empty());
}

TEST(Corpus, OverlappingSpansRejectedWithRowId) {
  std::istringstream in(
      R"({"id":"r7","text":"Goethe schrieb Faust.","head":[0,6],"tail":[3,9],"relation":"x","lang":"de"})"
      "\n");
  try {
    parse_canonical_jsonl(in);
    FAIL() << "expected CorpusError";
  } catch (const CorpusError& e) {
    ASSERT_EQ(e.rows().size(), 1u);
    EXPECT_EQ(e.rows()[0].row_id, "r7");
  }
}

TEST(Corpus, UnknownLanguageAndUnknownKeyRejected) {
  std::istringstream a(R"({"text":"a b","head":[0,1],"tail":[2,3],"relation":"x","lang":"zz"})");
  EXPECT_THROW(parse_canonical_jsonl(a), CorpusError);
  std::istringstream b(R"({"text":"a b","head":[0,1],"tail":[2,3],"relation":"x","lang":"en","extra":1})");
  EXPECT_THROW(parse_canonical_jsonl(b), CorpusError);
  LoadOptions opt;
  opt.extra_languages = {"zz"};
  std::istringstream c(R"({"text":"a b","head":[0,1],"tail":[2,3],"relation":"x","lang":"zz"})");
  EXPECT_EQ(parse_canonical_jsonl(c, opt).size(), 1u);
}

TEST(Corpus, CanonicalRoundTrip) {
  Dataset d({oracle::goethe(), oracle::example("e1", "has-spouse")}, Split::Train);
  const auto text = to_canonical_jsonl(d);
  std::istringstream in(text);
  const auto back = parse_canonical_jsonl(in);
  EXPECT_EQ(back.examples(), d.examples());
  EXPECT_EQ(to_canonical_jsonl(back), text);
}

TEST(Corpus, SmilerTsvTags) {
  std::istringstream map("header = true\nid = 0\nrelation = 3\ntext = 4\nlang = 5\nhead = 1\ntail = 2\n");
  LoadOptions opt;
  opt.mapping = TsvMapping::parse(map);
  std::istringstream tsv(
      "id\tentity_1\tentity_2\tlabel\ttext\tlang\n"
      "de_1\tFaust\tGoethe\thas-author\t<e2>Goethe</e2> schrieb <e1>Faust</e1>.\tde\n");
  const auto d = parse_smiler_tsv(tsv, opt);
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d.examples()[0].id, "de_1");
  EXPECT_EQ(d.examples()[0].text, "Goethe schrieb Faust.");
  EXPECT_EQ(d.examples()[0].head, (Span{15, 20}));
  EXPECT_EQ(d.examples()[0].tail, (Span{0, 6}));
}

TEST(Corpus, MappingRejectsUnknownKey) {
  std::istringstream map("text = 0\nrelation = 1\ndefault_lang = en\ncolour = 3\n");
  EXPECT_THROW(TsvMapping::parse(map), std::invalid_argument);
}

TEST(Corpus, GroupOf) {
  EXPECT_EQ(group_of("en"), LanguageGroup::EN);
  EXPECT_EQ(group_of("SV"), LanguageGroup::L);
  EXPECT_EQ(group_of("uk"), LanguageGroup::L);
  for (const char* h : {"de", "es", "fr", "it", "nl", "pl", "pt", "ru"}) {
    EXPECT_EQ(group_of(h), LanguageGroup::H) << h;
  }
  for (const char* m : {"ar", "fa", "ko"}) EXPECT_EQ(group_of(m), LanguageGroup::M) << m;
  EXPECT_THROW(group_of("zz"), std::invalid_argument);
  std::size_t total = 0;
  for (const auto& l : smiler_languages()) {
    (void)group_of(l);
    ++total;
  }
  EXPECT_EQ(total, 14u);
}

TEST(Corpus, LanguageStatsMatchEnumeration) {
  std::vector<RCExample> ex;
  const char* rels[] = {"a-rel", "b-rel", "c-rel"};
  for (int i = 0; i < 7; ++i) ex.push_back(oracle::example("en" + std::to_string(i), rels[i % 3], "en"));
  for (int i = 0; i < 4; ++i) ex.push_back(oracle::example("de" + std::to_string(i), rels[i % 2], "de"));
  ex.push_back({"long", "one two three four five six", {0, 3}, {4, 7}, "a-rel", "de"});
  Dataset d(ex, Split::Train);
  const auto stats = language_stats(d);
  ASSERT_EQ(stats.size(), 2u);
  // brute force
  for (const auto& p : stats) {
    std::set<std::string> classes;
    std::size_t n = 0, longest = 0;
    for (const auto& e : ex) {
      if (e.language != p.language) continue;
      classes.insert(e.relation);
      ++n;
      longest = std::max(longest, split_whitespace(e.text).size());
    }
    EXPECT_EQ(p.num_classes, classes.size());
    EXPECT_EQ(p.num_train, n);
    EXPECT_EQ(p.max_text_length, longest);
  }
}

TEST(Corpus, ReferenceProfilesCarryPublishedCounts) {
  std::map<std::string, ReferenceProfile> by;
  for (const auto& r : smiler_reference_profiles()) by[r.language] = r;
  EXPECT_EQ(by.at("ar").num_classes, 9u);
  EXPECT_DOUBLE_EQ(by.at("ar").num_train_thousands, 9.3);
  EXPECT_EQ(by.at("en").num_classes, 36u);
  EXPECT_DOUBLE_EQ(by.at("en").num_train_thousands, 267.6);
}

TEST(Corpus, DeclaredRelationSetEnforced) {
  std::map<std::string, std::set<std::string>> decl{{"en", {"a-rel"}}};
  EXPECT_THROW(Dataset({oracle::example("x", "b-rel")}, Split::Train, decl), CorpusError);
}
