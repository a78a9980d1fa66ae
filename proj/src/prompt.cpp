#include "polyrc/prompt.hpp"

#include <algorithm>

namespace polyrc {

std::string_view to_string(PromptKind kind) {
  switch (kind) {
    case PromptKind::Null: return "null";
    case PromptKind::CodeSwitch: return "cs";
    case PromptKind::SoftPrompt: return "sp";
    case PromptKind::InLanguage: return "il";
  }
  return "cs";
}

std::string_view to_string(WordOrder order) {
  return order == WordOrder::SVO ? "svo" : "sov";
}

PromptKind parse_prompt_kind(std::string_view name) {
  const std::string n = to_lower_ascii(name);
  if (n == "null") return PromptKind::Null;
  if (n == "cs" || n == "code-switch") return PromptKind::CodeSwitch;
  if (n == "sp" || n == "soft-prompt") return PromptKind::SoftPrompt;
  if (n == "il" || n == "in-language") return PromptKind::InLanguage;
  throw std::invalid_argument("unknown prompt variant: " + std::string(name));
}

WordOrder parse_word_order(std::string_view name) {
  const std::string n = to_lower_ascii(name);
  if (n == "svo") return WordOrder::SVO;
  if (n == "sov") return WordOrder::SOV;
  throw std::invalid_argument("unknown word order: " + std::string(name));
}

std::string PromptVariant::label() const {
  std::string base;
  switch (kind) {
    case PromptKind::Null: return "null";
    case PromptKind::CodeSwitch: base = "CS"; break;
    case PromptKind::SoftPrompt: base = "SP"; break;
    case PromptKind::InLanguage: base = "IL"; break;
  }
  return order == WordOrder::SOV ? base + "/SOV" : base;
}

std::string PromptInstance::input_text() const {
  std::string out;
  for (std::size_t i = 0; i < input.size(); ++i) {
    const auto& seg = input[i];
    if (i > 0 && seg.space_before) out += ' ';
    switch (seg.type) {
      case Segment::Type::Text: out += seg.text; break;
      case Segment::Type::Soft: out += "[v" + std::to_string(seg.soft_slot) + "]"; break;
      case Segment::Type::Blank: out += kBlankMarker; break;
    }
  }
  return out;
}

std::size_t PromptInstance::blank_count() const {
  return static_cast<std::size_t>(std::count_if(input.begin(), input.end(), [](const Segment& s) {
    return s.type == Segment::Type::Blank;
  }));
}

namespace {

bool ends_with_sentence_punctuation(std::string_view text) {
  static const std::vector<std::string_view> marks = {
      ".", "!", "?", "。", "！", "？", "؟", "۔", "…"};
  const auto last = last_codepoint(text);
  return std::find(marks.begin(), marks.end(), last) != marks.end();
}

// A suffix element (entity or blank), optionally preceded by a soft slot.
void append_element(std::vector<Segment>& out, Segment element, int soft_slot) {
  if (soft_slot > 0) {
    out.push_back(Segment::soft(soft_slot));
    element.space_before = false;
  }
  out.push_back(std::move(element));
}

PromptInstance render_with_order(const RCExample& example, PromptVariant variant,
                                 WordOrder order, const VerbalizerSet& verbalizers) {
  validate_example(example);
  PromptInstance inst;
  inst.language = example.language;
  inst.relation = example.relation;
  inst.example_id = example.id;
  inst.target = verbalizers.verbalize(example.relation,
                                      target_language(variant.kind, example.language));

  const std::string body = trim(example.text);
  inst.input.push_back(Segment::literal(body));
  if (!ends_with_sentence_punctuation(body)) {
    inst.input.push_back(Segment::literal(".", false));
  }
  if (variant.kind == PromptKind::Null) {
    inst.input.push_back(Segment::blank());
    return inst;
  }

  const bool soft = variant.kind == PromptKind::SoftPrompt;
  auto head = Segment::literal(example.head_text());
  auto tail = Segment::literal(example.tail_text());
  // Soft slots stay attached to their element: v1 -> e_h, v2 -> blank,
  // v3 -> e_t, whatever the word order.
  append_element(inst.input, head, soft ? 1 : 0);
  if (order == WordOrder::SVO) {
    append_element(inst.input, Segment::blank(), soft ? 2 : 0);
    append_element(inst.input, tail, soft ? 3 : 0);
  } else {
    append_element(inst.input, tail, soft ? 3 : 0);
    append_element(inst.input, Segment::blank(), soft ? 2 : 0);
  }
  return inst;
}

}  // namespace

std::string target_language(PromptKind kind, const std::string& example_language) {
  return kind == PromptKind::InLanguage ? example_language : std::string("en");
}

PromptInstance render(const RCExample& example, PromptVariant variant,
                      const VerbalizerSet& verbalizers) {
  return render_with_order(example, variant, variant.order, verbalizers);
}

PromptInstance render_sov(const RCExample& example, PromptVariant variant,
                          const VerbalizerSet& verbalizers) {
  return render_with_order(example, variant, WordOrder::SOV, verbalizers);
}

std::size_t max_target_length(const std::set<std::string>& relations,
                              const std::vector<std::string>& languages,
                              const VerbalizerSet& verbalizers,
                              const TextTokenizer& tokenizer) {
  std::size_t longest = 0;
  for (const auto& lang : languages) {
    for (const auto& r : relations) {
      longest = std::max(longest, tokenizer.count(verbalizers.verbalize(r, lang)));
    }
  }
  return longest;
}

}  // namespace polyrc
