#ifndef POLYRC_PROMPT_HPP_
#define POLYRC_PROMPT_HPP_

#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "polyrc/corpus.hpp"
#include "polyrc/verbalizer.hpp"

namespace polyrc {

enum class PromptKind { Null, CodeSwitch, SoftPrompt, InLanguage };
enum class WordOrder { SVO, SOV };

// Config spellings: null, cs, sp, il / svo, sov.
std::string_view to_string(PromptKind kind);
std::string_view to_string(WordOrder order);
PromptKind parse_prompt_kind(std::string_view name);
WordOrder parse_word_order(std::string_view name);

struct PromptVariant {
  PromptKind kind = PromptKind::CodeSwitch;
  WordOrder order = WordOrder::SVO;

  // Short label such as "IL" or "CS/SOV".
  std::string label() const;
  friend bool operator==(const PromptVariant&, const PromptVariant&) = default;
};

inline constexpr int kNumSoftSlots = 3;
inline constexpr std::string_view kBlankMarker = "____";

struct Segment {
  enum class Type { Text, Soft, Blank };

  Type type = Type::Text;
  std::string text;       // Text only
  int soft_slot = 0;      // Soft only, 1..3
  bool space_before = true;

  static Segment literal(std::string t, bool space_before = true) {
    return {Type::Text, std::move(t), 0, space_before};
  }
  static Segment soft(int slot) { return {Type::Soft, {}, slot, true}; }
  static Segment blank(bool space_before = true) {
    return {Type::Blank, {}, 0, space_before};
  }
  friend bool operator==(const Segment&, const Segment&) = default;
};

struct PromptInstance {
  std::vector<Segment> input;
  std::string target;
  std::string language;
  std::string relation;
  std::string example_id;

  // Human-readable rendering: soft slots as "[v1]", the blank as "____".
  std::string input_text() const;
  std::size_t blank_count() const;
};

// Builds T(x) for the variant's word order together with its target:
// the English verbalization for null/CS/SP, the in-language one for IL.
PromptInstance render(const RCExample& example, PromptVariant variant,
                      const VerbalizerSet& verbalizers);

// Same as render with the SOV template "x. e_h e_t ____".
PromptInstance render_sov(const RCExample& example, PromptVariant variant,
                          const VerbalizerSet& verbalizers);

// Language whose verbalizations form the targets of `kind` for an example in
// `example_language`.
std::string target_language(PromptKind kind, const std::string& example_language);

// Longest tokenized verbalization over relations x languages.
std::size_t max_target_length(const std::set<std::string>& relations,
                              const std::vector<std::string>& languages,
                              const VerbalizerSet& verbalizers,
                              const TextTokenizer& tokenizer);

}  // namespace polyrc

#endif  // POLYRC_PROMPT_HPP_
