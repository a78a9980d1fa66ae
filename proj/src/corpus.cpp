#include "polyrc/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace polyrc {

using ordered_json = nlohmann::ordered_json;

std::string_view to_string(Split split) {
  switch (split) {
    case Split::Train: return "train";
    case Split::Test: return "test";
    case Split::Validation: return "validation";
  }
  return "train";
}

Split parse_split(std::string_view name) {
  const std::string n = to_lower_ascii(name);
  if (n == "train") return Split::Train;
  if (n == "test") return Split::Test;
  if (n == "validation" || n == "dev") return Split::Validation;
  throw std::invalid_argument("unknown split: " + std::string(name));
}

namespace {

std::string summarize(const std::string& what, const std::vector<RowError>& rows) {
  if (rows.empty()) return what;
  std::ostringstream os;
  os << what << " (" << rows.size() << " bad row" << (rows.size() == 1 ? "" : "s")
     << "; first: row " << rows.front().row_id << ": " << rows.front().message
     << ")";
  return os.str();
}

}  // namespace

CorpusError::CorpusError(std::string what, std::vector<RowError> rows)
    : std::runtime_error(summarize(what, rows)), rows_(std::move(rows)) {}

const std::vector<std::string>& smiler_languages() {
  static const std::vector<std::string> codes = {
      "ar", "de", "en", "es", "fa", "fr", "it",
      "ko", "nl", "pl", "pt", "ru", "sv", "uk"};
  return codes;
}

bool is_smiler_language(std::string_view code) {
  const std::string lower = to_lower_ascii(code);
  const auto& codes = smiler_languages();
  return std::find(codes.begin(), codes.end(), lower) != codes.end();
}

std::string_view to_string(LanguageGroup group) {
  switch (group) {
    case LanguageGroup::EN: return "EN";
    case LanguageGroup::H: return "H";
    case LanguageGroup::M: return "M";
    case LanguageGroup::L: return "L";
  }
  return "EN";
}

const std::vector<LanguageGroup>& all_groups() {
  static const std::vector<LanguageGroup> groups = {
      LanguageGroup::EN, LanguageGroup::H, LanguageGroup::M, LanguageGroup::L};
  return groups;
}

LanguageGroup group_of(std::string_view language) {
  static const std::map<std::string, LanguageGroup> table = {
      {"en", LanguageGroup::EN},
      {"de", LanguageGroup::H}, {"es", LanguageGroup::H},
      {"fr", LanguageGroup::H}, {"it", LanguageGroup::H},
      {"nl", LanguageGroup::H}, {"pl", LanguageGroup::H},
      {"pt", LanguageGroup::H}, {"ru", LanguageGroup::H},
      {"ar", LanguageGroup::M}, {"fa", LanguageGroup::M},
      {"ko", LanguageGroup::M},
      {"sv", LanguageGroup::L}, {"uk", LanguageGroup::L},
  };
  const auto it = table.find(to_lower_ascii(language));
  if (it == table.end()) {
    throw std::invalid_argument("no resource group for language '" +
                                std::string(language) + "'");
  }
  return it->second;
}

void validate_example(const RCExample& example) {
  auto fail = [&](const std::string& msg) {
    throw CorpusError("invalid example", {{example.id, msg}});
  };
  std::size_t length = 0;
  try {
    length = codepoint_length(example.text);
  } catch (const Utf8Error& e) {
    fail(e.what());
  }
  for (const auto& [name, span] :
       {std::pair{"head", example.head}, std::pair{"tail", example.tail}}) {
    if (span.start >= span.end) {
      fail(std::string(name) + " span is empty or reversed");
    }
    if (span.end > length) {
      fail(std::string(name) + " span [" + std::to_string(span.start) + "," +
           std::to_string(span.end) + ") exceeds text length " +
           std::to_string(length));
    }
  }
  if (example.head.overlaps(example.tail)) {
    fail("head and tail spans overlap");
  }
  if (example.relation.empty()) fail("empty relation");
  if (example.language.empty()) fail("empty language");
}

Dataset::Dataset(std::vector<RCExample> examples, Split split,
                 std::map<std::string, std::set<std::string>> relation_sets)
    : examples_(std::move(examples)),
      split_(split),
      relation_sets_(std::move(relation_sets)) {
  std::map<std::string, std::set<std::string>> observed;
  std::vector<RowError> errors;
  for (const auto& ex : examples_) {
    try {
      validate_example(ex);
    } catch (const CorpusError& e) {
      errors.insert(errors.end(), e.rows().begin(), e.rows().end());
      continue;
    }
    observed[ex.language].insert(ex.relation);
  }
  for (auto& [lang, rels] : observed) {
    const auto declared = relation_sets_.find(lang);
    if (declared == relation_sets_.end()) {
      relation_sets_[lang] = rels;
      continue;
    }
    for (const auto& ex : examples_) {
      if (ex.language == lang && !declared->second.count(ex.relation)) {
        errors.push_back({ex.id, "relation '" + ex.relation +
                                     "' not in declared set for '" + lang + "'"});
      }
    }
  }
  if (!errors.empty()) throw CorpusError("invalid dataset", std::move(errors));
}

std::vector<std::string> Dataset::languages() const {
  std::vector<std::string> langs;
  for (const auto& ex : examples_) langs.push_back(ex.language);
  std::sort(langs.begin(), langs.end());
  langs.erase(std::unique(langs.begin(), langs.end()), langs.end());
  return langs;
}

const std::set<std::string>& Dataset::relation_set(const std::string& language) const {
  static const std::set<std::string> empty;
  const auto it = relation_sets_.find(language);
  return it == relation_sets_.end() ? empty : it->second;
}

Dataset Dataset::for_language(const std::string& language) const {
  std::vector<RCExample> subset;
  for (const auto& ex : examples_) {
    if (ex.language == language) subset.push_back(ex);
  }
  std::map<std::string, std::set<std::string>> rels;
  if (const auto it = relation_sets_.find(language); it != relation_sets_.end()) {
    rels[language] = it->second;
  }
  return Dataset(std::move(subset), split_, std::move(rels));
}

CorpusFormat parse_corpus_format(std::string_view name) {
  const std::string n = to_lower_ascii(name);
  if (n == "canonical-jsonl" || n == "jsonl") return CorpusFormat::CanonicalJsonl;
  if (n == "smiler-tsv" || n == "tsv") return CorpusFormat::SmilerTsv;
  throw std::invalid_argument("unknown corpus format: " + std::string(name));
}

namespace {

std::size_t parse_index(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const unsigned long v = std::stoul(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("mapping key '" + key +
                                "' expects a column index, got '" + value + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  const std::string v = to_lower_ascii(value);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw std::invalid_argument("mapping key '" + key + "' expects a boolean");
}

std::string check_language(std::string code, const LoadOptions& options) {
  code = to_lower_ascii(trim(code));
  if (!is_smiler_language(code) && !options.extra_languages.count(code)) {
    throw std::invalid_argument("unknown language code '" + code + "'");
  }
  return code;
}

Dataset finish(std::vector<RCExample> examples, std::vector<RowError> errors,
               const LoadOptions& options) {
  if (!errors.empty()) {
    throw CorpusError("corpus rejected", std::move(errors));
  }
  return Dataset(std::move(examples), options.split, options.declared_relations);
}

}  // namespace

TsvMapping TsvMapping::parse(std::istream& in) {
  TsvMapping m;
  bool has_text = false;
  bool has_relation = false;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("mapping line " + std::to_string(line_no) +
                                  " is not key=value");
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key == "header") m.header = parse_bool(key, value);
    else if (key == "id") m.id_column = parse_index(key, value);
    else if (key == "text") { m.text_column = parse_index(key, value); has_text = true; }
    else if (key == "relation") { m.relation_column = parse_index(key, value); has_relation = true; }
    else if (key == "lang") m.lang_column = parse_index(key, value);
    else if (key == "default_lang") m.default_language = to_lower_ascii(value);
    else if (key == "markup") {
      if (value == "tags") m.markup = Markup::Tags;
      else if (value == "offsets") m.markup = Markup::Offsets;
      else throw std::invalid_argument("markup must be 'tags' or 'offsets'");
    }
    else if (key == "head_open") m.head_open = value;
    else if (key == "head_close") m.head_close = value;
    else if (key == "tail_open") m.tail_open = value;
    else if (key == "tail_close") m.tail_close = value;
    else if (key == "head_start") m.head_start_column = parse_index(key, value);
    else if (key == "head_end") m.head_end_column = parse_index(key, value);
    else if (key == "tail_start") m.tail_start_column = parse_index(key, value);
    else if (key == "tail_end") m.tail_end_column = parse_index(key, value);
    // Surface-form columns exist in SMiLER but are redundant with the markup.
    else if (key == "head" || key == "tail") parse_index(key, value);
    else throw std::invalid_argument("unknown mapping key '" + key + "'");
  }
  if (!has_text || !has_relation) {
    throw std::invalid_argument("mapping must define 'text' and 'relation'");
  }
  if (!m.lang_column && m.default_language.empty()) {
    throw std::invalid_argument("mapping must define 'lang' or 'default_lang'");
  }
  return m;
}

TsvMapping TsvMapping::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read mapping file " + path.string());
  return parse(in);
}

Dataset parse_canonical_jsonl(std::istream& in, const LoadOptions& options) {
  std::vector<RCExample> examples;
  std::vector<RowError> errors;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::string row_id = "line " + std::to_string(line_no);
    try {
      const auto row = nlohmann::json::parse(line);
      if (!row.is_object()) throw std::invalid_argument("row is not an object");
      for (const auto& [key, _] : row.items()) {
        if (key != "id" && key != "text" && key != "head" && key != "tail" &&
            key != "relation" && key != "lang") {
          throw std::invalid_argument("unknown key '" + key + "'");
        }
      }
      RCExample ex;
      ex.id = row.contains("id") ? row.at("id").get<std::string>()
                                 : std::to_string(line_no);
      row_id = ex.id;
      ex.text = row.at("text").get<std::string>();
      const auto head = row.at("head").get<std::vector<std::size_t>>();
      const auto tail = row.at("tail").get<std::vector<std::size_t>>();
      if (head.size() != 2 || tail.size() != 2) {
        throw std::invalid_argument("spans must be [start, end] pairs");
      }
      ex.head = {head[0], head[1]};
      ex.tail = {tail[0], tail[1]};
      ex.relation = row.at("relation").get<std::string>();
      ex.language = check_language(row.at("lang").get<std::string>(), options);
      validate_example(ex);
      examples.push_back(std::move(ex));
    } catch (const CorpusError& e) {
      errors.insert(errors.end(), e.rows().begin(), e.rows().end());
    } catch (const std::exception& e) {
      errors.push_back({row_id, e.what()});
    }
  }
  return finish(std::move(examples), std::move(errors), options);
}

namespace {

// Removes open/close tags from `marked` and returns the plain text plus the
// code-point spans the tags enclosed.
struct Unmarked {
  std::string text;
  Span head;
  Span tail;
};

Unmarked strip_markup(const std::string& marked, const TsvMapping& m) {
  struct Tag {
    const std::string* literal;
    int which;  // 0 head open, 1 head close, 2 tail open, 3 tail close
  };
  const Tag tags[] = {{&m.head_open, 0}, {&m.head_close, 1},
                      {&m.tail_open, 2}, {&m.tail_close, 3}};
  std::string plain;
  std::size_t pos[4] = {0, 0, 0, 0};
  bool seen[4] = {false, false, false, false};
  std::size_t i = 0;
  while (i < marked.size()) {
    bool matched = false;
    // Longest tag first so "</e1>" is not mistaken for a prefix match.
    const Tag* best = nullptr;
    for (const auto& t : tags) {
      if (!t.literal->empty() && marked.compare(i, t.literal->size(), *t.literal) == 0 &&
          (!best || t.literal->size() > best->literal->size())) {
        best = &t;
      }
    }
    if (best) {
      if (seen[best->which]) {
        throw std::invalid_argument("entity tag '" + *best->literal + "' repeated");
      }
      seen[best->which] = true;
      pos[best->which] = codepoint_length(plain);
      i += best->literal->size();
      matched = true;
    }
    if (!matched) plain += marked[i++];
  }
  for (int k = 0; k < 4; ++k) {
    if (!seen[k]) throw std::invalid_argument("missing entity tag '" + *tags[k].literal + "'");
  }
  return {plain, {pos[0], pos[1]}, {pos[2], pos[3]}};
}

std::size_t parse_offset(const std::string& s) {
  std::size_t used = 0;
  const unsigned long v = std::stoul(s, &used);
  if (used != s.size()) throw std::invalid_argument("bad offset '" + s + "'");
  return v;
}

}  // namespace

Dataset parse_smiler_tsv(std::istream& in, const LoadOptions& options) {
  if (!options.mapping) {
    throw std::invalid_argument("smiler-tsv requires a column mapping");
  }
  const TsvMapping& m = *options.mapping;
  std::vector<RCExample> examples;
  std::vector<RowError> errors;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1 && m.header) continue;
    if (trim(line).empty()) continue;
    const auto cols = split(line, '\t');
    std::string row_id = "line " + std::to_string(line_no);
    try {
      auto col = [&](std::size_t idx) -> const std::string& {
        if (idx >= cols.size()) {
          throw std::invalid_argument("missing column " + std::to_string(idx));
        }
        return cols[idx];
      };
      RCExample ex;
      ex.id = m.id_column ? col(*m.id_column) : std::to_string(line_no);
      row_id = ex.id;
      ex.relation = trim(col(m.relation_column));
      ex.language = check_language(
          m.lang_column ? col(*m.lang_column) : m.default_language, options);
      if (m.markup == TsvMapping::Markup::Tags) {
        auto un = strip_markup(col(m.text_column), m);
        ex.text = std::move(un.text);
        ex.head = un.head;
        ex.tail = un.tail;
      } else {
        ex.text = col(m.text_column);
        ex.head = {parse_offset(col(m.head_start_column)),
                   parse_offset(col(m.head_end_column))};
        ex.tail = {parse_offset(col(m.tail_start_column)),
                   parse_offset(col(m.tail_end_column))};
      }
      validate_example(ex);
      examples.push_back(std::move(ex));
    } catch (const CorpusError& e) {
      errors.insert(errors.end(), e.rows().begin(), e.rows().end());
    } catch (const std::exception& e) {
      errors.push_back({row_id, e.what()});
    }
  }
  return finish(std::move(examples), std::move(errors), options);
}

Dataset load_corpus(const std::filesystem::path& path, CorpusFormat format,
                    const LoadOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw CorpusError("cannot read corpus file " + path.string());
  }
  return format == CorpusFormat::CanonicalJsonl ? parse_canonical_jsonl(in, options)
                                                : parse_smiler_tsv(in, options);
}

void write_canonical_jsonl(const Dataset& dataset, std::ostream& out) {
  for (const auto& ex : dataset.examples()) {
    ordered_json row;
    row["id"] = ex.id;
    row["text"] = ex.text;
    row["head"] = {ex.head.start, ex.head.end};
    row["tail"] = {ex.tail.start, ex.tail.end};
    row["relation"] = ex.relation;
    row["lang"] = ex.language;
    out << row.dump(-1, ' ', false, nlohmann::json::error_handler_t::strict) << '\n';
  }
}

std::string to_canonical_jsonl(const Dataset& dataset) {
  std::ostringstream os;
  write_canonical_jsonl(dataset, os);
  return os.str();
}

std::vector<LanguageProfile> language_stats(const Dataset& train,
                                            const Dataset* test,
                                            const TextTokenizer* tokenizer) {
  const WhitespaceTokenizer whitespace;
  const TextTokenizer& tok = tokenizer ? *tokenizer : whitespace;
  std::map<std::string, LanguageProfile> profiles;
  auto visit = [&](const Dataset& ds, bool count_train) {
    for (const auto& ex : ds.examples()) {
      auto& p = profiles[ex.language];
      p.language = ex.language;
      if (count_train) ++p.num_train;
      p.max_text_length = std::max(p.max_text_length, tok.count(ex.text));
    }
  };
  visit(train, true);
  if (test) visit(*test, false);
  std::vector<LanguageProfile> out;
  for (auto& [lang, p] : profiles) {
    p.num_classes = train.relation_set(lang).size();
    if (is_smiler_language(lang)) p.group = group_of(lang);
    out.push_back(p);
  }
  return out;
}

const std::vector<ReferenceProfile>& smiler_reference_profiles() {
  static const std::vector<ReferenceProfile> table = {
      {"ar", 9, 9.3, 190, 74},    {"de", 22, 51.5, 1051, 84},
      {"en", 36, 267.6, 5461, 110}, {"es", 21, 11.1, 226, 70},
      {"fa", 8, 2.6, 54, 93},     {"fr", 22, 60.9, 1243, 83},
      {"it", 22, 74.0, 1510, 86}, {"ko", 28, 18.7, 382, 95},
      {"nl", 22, 38.9, 793, 76},  {"pl", 21, 16.8, 344, 86},
      {"pt", 22, 43.3, 885, 82},  {"ru", 8, 6.4, 131, 69},
      {"sv", 22, 4.5, 92, 84},    {"uk", 7, 1.0, 20, 65},
  };
  return table;
}

}  // namespace polyrc
