#ifndef POLYRC_CORPUS_HPP_
#define POLYRC_CORPUS_HPP_

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "polyrc/text.hpp"

namespace polyrc {

// Half-open range of Unicode code points into RCExample::text.
struct Span {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - start; }
  bool overlaps(const Span& other) const {
    return start < other.end && other.start < end;
  }
  friend bool operator==(const Span&, const Span&) = default;
};

struct RCExample {
  std::string id;
  std::string text;
  Span head;
  Span tail;
  std::string relation;
  std::string language;  // lowercase ISO 639-1

  std::string head_text() const { return codepoint_substr(text, head.start, head.end); }
  std::string tail_text() const { return codepoint_substr(text, tail.start, tail.end); }

  friend bool operator==(const RCExample&, const RCExample&) = default;
};

enum class Split { Train, Test, Validation };

std::string_view to_string(Split split);
Split parse_split(std::string_view name);

struct RowError {
  std::string row_id;
  std::string message;
};

// Raised for anything that makes a corpus file or example unusable. Carries
// every offending row so callers can report all of them at once.
class CorpusError : public std::runtime_error {
 public:
  CorpusError(std::string what, std::vector<RowError> rows = {});
  const std::vector<RowError>& rows() const { return rows_; }

 private:
  std::vector<RowError> rows_;
};

// The 14 SMiLER languages in lowercase, alphabetical.
const std::vector<std::string>& smiler_languages();
bool is_smiler_language(std::string_view code);

enum class LanguageGroup { EN, H, M, L };

std::string_view to_string(LanguageGroup group);
const std::vector<LanguageGroup>& all_groups();

// Resource group of a SMiLER language (case-insensitive). Throws
// std::invalid_argument for codes outside the 14.
LanguageGroup group_of(std::string_view language);

// Checks span bounds and disjointness; throws CorpusError naming the row.
void validate_example(const RCExample& example);

// An immutable, validated collection of examples of one split.
class Dataset {
 public:
  Dataset() = default;

  // relation_sets: declared relations per language. Languages missing from
  // the map get the set of relations observed in `examples`.
  Dataset(std::vector<RCExample> examples, Split split,
          std::map<std::string, std::set<std::string>> relation_sets = {});

  const std::vector<RCExample>& examples() const { return examples_; }
  Split split() const { return split_; }
  std::size_t size() const { return examples_.size(); }
  bool empty() const { return examples_.empty(); }

  std::vector<std::string> languages() const;
  const std::set<std::string>& relation_set(const std::string& language) const;
  const std::map<std::string, std::set<std::string>>& relation_sets() const {
    return relation_sets_;
  }

  Dataset for_language(const std::string& language) const;

 private:
  std::vector<RCExample> examples_;
  Split split_ = Split::Train;
  std::map<std::string, std::set<std::string>> relation_sets_;
};

enum class CorpusFormat { CanonicalJsonl, SmilerTsv };

CorpusFormat parse_corpus_format(std::string_view name);

// Column mapping for tab-separated SMiLER-style sources, read from a plain
// key=value file. Column values are zero-based indices.
struct TsvMapping {
  enum class Markup { Tags, Offsets };

  bool header = true;
  std::optional<std::size_t> id_column;
  std::size_t text_column = 0;
  std::size_t relation_column = 0;
  std::optional<std::size_t> lang_column;
  std::string default_language;  // used when lang_column is unset
  Markup markup = Markup::Tags;
  std::string head_open = "<e1>";
  std::string head_close = "</e1>";
  std::string tail_open = "<e2>";
  std::string tail_close = "</e2>";
  std::size_t head_start_column = 0;
  std::size_t head_end_column = 0;
  std::size_t tail_start_column = 0;
  std::size_t tail_end_column = 0;

  static TsvMapping parse(std::istream& in);
  static TsvMapping load(const std::filesystem::path& path);
};

struct LoadOptions {
  Split split = Split::Train;
  std::optional<TsvMapping> mapping;  // required for SmilerTsv
  std::set<std::string> extra_languages;
  std::map<std::string, std::set<std::string>> declared_relations;
};

Dataset parse_canonical_jsonl(std::istream& in, const LoadOptions& options = {});
Dataset parse_smiler_tsv(std::istream& in, const LoadOptions& options);

// Reads and validates a corpus file. Malformed rows raise CorpusError listing
// every bad row id; nothing is dropped silently.
Dataset load_corpus(const std::filesystem::path& path, CorpusFormat format,
                    const LoadOptions& options = {});

// One JSON object per line, keys in the order id, text, head, tail,
// relation, lang.
void write_canonical_jsonl(const Dataset& dataset, std::ostream& out);
std::string to_canonical_jsonl(const Dataset& dataset);

struct LanguageProfile {
  std::string language;
  std::size_t num_classes = 0;
  std::size_t num_train = 0;
  std::size_t max_text_length = 0;
  std::optional<LanguageGroup> group;
};

// Per-language class count, example count and maximum token length. When
// `test` is given, max_text_length spans both splits. Whitespace tokens are
// used unless a tokenizer is supplied.
std::vector<LanguageProfile> language_stats(
    const Dataset& train, const Dataset* test = nullptr,
    const TextTokenizer* tokenizer = nullptr);

// Published per-language figures for SMiLER, for side-by-side comparison in
// `polyrc stats`. num_train is in examples (rounded from thousands).
struct ReferenceProfile {
  std::string language;
  std::size_t num_classes;
  double num_train_thousands;
  std::size_t num_test;
  std::size_t max_text_length;
};
const std::vector<ReferenceProfile>& smiler_reference_profiles();

}  // namespace polyrc

#endif  // POLYRC_CORPUS_HPP_
