#include <gtest/gtest.h>

#include "oracle.hpp"
#include "polyrc/prompt.hpp"

using namespace polyrc;

namespace {
VerbalizerSet german() {
  VerbalizerSet set;
  set.add(VerbalizerTable("de", {{"has-author", "hat Autor"}, {"has-genre", "hat Genre"}}));
  return set;
}
}  // namespace

TEST(Prompt, TemplateSnapshots) {
  const auto v = german();
  const auto ex = oracle::goethe();
  auto cs = render(ex, {PromptKind::CodeSwitch, WordOrder::SVO}, v);
  EXPECT_EQ(cs.input_text(), "Goethe schrieb Faust. Faust ____ Goethe");
  EXPECT_EQ(cs.target, "has author");
  auto sp = render(ex, {PromptKind::SoftPrompt, WordOrder::SVO}, v);
  EXPECT_EQ(sp.input_text(), "Goethe schrieb Faust. [v1]Faust [v2]____ [v3]Goethe");
  EXPECT_EQ(sp.target, "has author");
  auto il = render(ex, {PromptKind::InLanguage, WordOrder::SVO}, v);
  EXPECT_EQ(il.input_text(), cs.input_text());
  EXPECT_EQ(il.target, "hat Autor");
  auto null = render(ex, {PromptKind::Null, WordOrder::SVO}, v);
  EXPECT_EQ(null.input_text(), "Goethe schrieb Faust. ____");
  EXPECT_EQ(null.target, "has author");
}

TEST(Prompt, SovSnapshots) {
  const auto v = german();
  const auto ex = oracle::goethe();
  EXPECT_EQ(render_sov(ex, {PromptKind::CodeSwitch, WordOrder::SVO}, v).input_text(),
            "Goethe schrieb Faust. Faust Goethe ____");
  EXPECT_EQ(render(ex, {PromptKind::CodeSwitch, WordOrder::SOV}, v).input_text(),
            "Goethe schrieb Faust. Faust Goethe ____");
  EXPECT_EQ(render_sov(ex, {PromptKind::Null, WordOrder::SVO}, v).input_text(),
            render(ex, {PromptKind::Null, WordOrder::SVO}, v).input_text());
  EXPECT_EQ(render_sov(ex, {PromptKind::SoftPrompt, WordOrder::SVO}, v).input_text(),
            "Goethe schrieb Faust. [v1]Faust [v3]Goethe [v2]____");
}

TEST(Prompt, PeriodOnlyWhenMissing) {
  RCExample ex{"p", "Goethe schrieb Faust", {15, 20}, {0, 6}, "has-author", "de"};
  EXPECT_EQ(render(ex, {PromptKind::CodeSwitch, WordOrder::SVO}, german()).input_text(),
            "Goethe schrieb Faust. Faust ____ Goethe");
  RCExample q{"q", "Schrieb Goethe Faust?", {15, 20}, {8, 14}, "has-author", "de"};
  EXPECT_EQ(render(q, {PromptKind::CodeSwitch, WordOrder::SVO}, german()).input_text(),
            "Schrieb Goethe Faust? Faust ____ Goethe");
}

TEST(Prompt, EnglishCsEqualsIl) {
  const auto ex = oracle::example("e", "has-spouse");
  VerbalizerSet v;
  const auto cs = render(ex, {PromptKind::CodeSwitch, WordOrder::SVO}, v);
  const auto il = render(ex, {PromptKind::InLanguage, WordOrder::SVO}, v);
  EXPECT_EQ(cs.input, il.input);
  EXPECT_EQ(cs.target, il.target);
}

TEST(Prompt, ExactlyOneBlankAndMissingTableErrors) {
  const auto ex = oracle::goethe();
  for (auto kind : {PromptKind::Null, PromptKind::CodeSwitch, PromptKind::SoftPrompt,
                    PromptKind::InLanguage}) {
    EXPECT_EQ(render(ex, {kind, WordOrder::SVO}, german()).blank_count(), 1u);
  }
  EXPECT_THROW(render(ex, {PromptKind::InLanguage, WordOrder::SVO}, VerbalizerSet()),
               VerbalizerError);
}

TEST(Prompt, MaxTargetLength) {
  WhitespaceTokenizer tok;
  VerbalizerSet v;
  EXPECT_EQ(max_target_length({"has-author"}, {"en"}, v, tok), 2u);
  v.add(VerbalizerTable("de", {{"a", "eins"}, {"b", "zwei drei"}, {"c", "vier fuenf sechs sieben"}}));
  EXPECT_EQ(max_target_length({"a", "b", "c"}, {"de"}, v, tok), 4u);
}

TEST(Prompt, VariantLabels) {
  EXPECT_EQ((PromptVariant{PromptKind::CodeSwitch, WordOrder::SOV}).label(), "CS/SOV");
  EXPECT_EQ((PromptVariant{PromptKind::InLanguage, WordOrder::SVO}).label(), "IL");
  EXPECT_EQ(parse_prompt_kind("sp"), PromptKind::SoftPrompt);
  EXPECT_THROW(parse_word_order("vos"), std::invalid_argument);
}
