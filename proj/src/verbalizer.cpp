#include "polyrc/verbalizer.hpp"

#include <cmath>
#include <fstream>

#include "json.hpp"

namespace polyrc {

const Abbreviations& default_abbreviations() {
  static const Abbreviations abbr = {
      {"org", "organization"},
      {"loc", "location"},
      {"edu", "education"},
      {"per", "person"},
  };
  return abbr;
}

Abbreviations load_abbreviations(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw VerbalizerError("cannot read abbreviations " + path.string());
  const auto j = nlohmann::json::parse(in);
  return j.get<Abbreviations>();
}

std::string verbalize_en(std::string_view relation, const Abbreviations& abbreviations) {
  if (trim(relation).empty()) {
    throw VerbalizerError("cannot verbalize an empty relation identifier");
  }
  std::vector<std::string> words;
  std::string current;
  auto flush = [&] {
    if (current.empty()) return;
    const auto it = abbreviations.find(current);
    words.push_back(it == abbreviations.end() ? current : it->second);
    current.clear();
  };
  for (char c : relation) {
    if (c == '-' || c == '_' || c == ' ') {
      flush();
    } else {
      current += c;
    }
  }
  flush();
  return join(words, " ");
}

VerbalizerTable::VerbalizerTable(std::string language,
                                 std::map<std::string, std::string> entries)
    : language_(to_lower_ascii(language)), entries_(std::move(entries)) {
  std::map<std::string, std::string> seen;
  for (const auto& [relation, text] : entries_) {
    if (text.empty() || text != join(split_whitespace(text), " ")) {
      throw VerbalizerError("verbalization of '" + relation + "' in '" + language_ +
                            "' is empty or has irregular whitespace");
    }
    const auto [it, inserted] = seen.emplace(text, relation);
    if (!inserted) {
      throw VerbalizerError("verbalizer for '" + language_ + "' is not one-to-one: '" +
                            it->second + "' and '" + relation + "' both map to '" +
                            text + "'");
    }
  }
}

VerbalizerTable VerbalizerTable::from_json_file(const std::filesystem::path& path,
                                                std::string language) {
  std::ifstream in(path);
  if (!in) throw VerbalizerError("cannot read verbalizer table " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw VerbalizerError(path.string() + ": " + e.what());
  }
  if (!j.is_object()) throw VerbalizerError(path.string() + ": expected a JSON object");
  return VerbalizerTable(std::move(language), j.get<std::map<std::string, std::string>>());
}

const std::string& VerbalizerTable::at(const std::string& relation) const {
  const auto it = entries_.find(relation);
  if (it == entries_.end()) {
    throw VerbalizerError("no verbalization for relation '" + relation +
                          "' in language '" + language_ + "'");
  }
  return it->second;
}

std::vector<std::string> VerbalizerTable::missing(const std::set<std::string>& relation_set) const {
  std::vector<std::string> out;
  for (const auto& r : relation_set) {
    if (!contains(r)) out.push_back(r);
  }
  return out;
}

VerbalizerTable english_table(const std::set<std::string>& relations,
                              const Abbreviations& abbreviations) {
  std::map<std::string, std::string> entries;
  for (const auto& r : relations) entries[r] = verbalize_en(r, abbreviations);
  return VerbalizerTable("en", std::move(entries));
}

VerbalizerSet VerbalizerSet::load_directory(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw VerbalizerError("verbalizer directory not found: " + dir.string());
  }
  const auto abbr_path = dir / "abbreviations.json";
  VerbalizerSet set(std::filesystem::exists(abbr_path) ? load_abbreviations(abbr_path)
                                                       : default_abbreviations());
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() == ".json" && entry.path().filename() != "abbreviations.json") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    set.add(VerbalizerTable::from_json_file(f, f.stem().string()));
  }
  return set;
}

void VerbalizerSet::add(VerbalizerTable table) {
  const std::string lang = table.language();
  tables_[lang] = std::move(table);
}

bool VerbalizerSet::has_language(const std::string& language) const {
  return to_lower_ascii(language) == "en" || tables_.count(to_lower_ascii(language)) > 0;
}

const VerbalizerTable* VerbalizerSet::find(const std::string& language) const {
  const auto it = tables_.find(to_lower_ascii(language));
  return it == tables_.end() ? nullptr : &it->second;
}

std::vector<std::string> VerbalizerSet::languages() const {
  std::vector<std::string> out;
  for (const auto& [lang, _] : tables_) out.push_back(lang);
  return out;
}

std::string VerbalizerSet::verbalize(const std::string& relation,
                                     const std::string& language) const {
  const std::string lang = to_lower_ascii(language);
  if (lang == "en") return verbalize_en(relation, abbreviations_);
  const auto* table = find(lang);
  if (!table) {
    throw VerbalizerError("no verbalizer table for language '" + lang +
                          "' (needed for relation '" + relation + "')");
  }
  return table->at(relation);
}

void VerbalizerSet::check_total(const std::set<std::string>& relations,
                                const std::string& language) const {
  std::vector<std::string> missing;
  std::set<std::string> produced;
  for (const auto& r : relations) {
    try {
      produced.insert(verbalize(r, language));
    } catch (const VerbalizerError&) {
      missing.push_back(r);
    }
  }
  if (!missing.empty()) {
    throw VerbalizerError("verbalizer for '" + language + "' lacks: " + join(missing, ", "));
  }
  if (produced.size() != relations.size()) {
    throw VerbalizerError("verbalizer for '" + language +
                          "' is not one-to-one on the active relation set");
  }
}

namespace {

LengthStats stats_of(const std::vector<double>& lengths) {
  LengthStats s;
  s.count = lengths.size();
  if (lengths.empty()) return s;
  double sum = 0.0;
  for (double v : lengths) sum += v;
  s.mean = sum / static_cast<double>(lengths.size());
  double sq = 0.0;
  for (double v : lengths) sq += (v - s.mean) * (v - s.mean);
  s.stddev = std::sqrt(sq / static_cast<double>(lengths.size()));
  return s;
}

}  // namespace

LengthStats length_stats(const VerbalizerTable& table, const TextTokenizer& tokenizer) {
  return length_stats(std::vector<VerbalizerTable>{table}, tokenizer);
}

LengthStats length_stats(const std::vector<VerbalizerTable>& tables,
                         const TextTokenizer& tokenizer) {
  std::vector<double> lengths;
  for (const auto& t : tables) {
    for (const auto& [_, text] : t.entries()) {
      lengths.push_back(static_cast<double>(tokenizer.count(text)));
    }
  }
  return stats_of(lengths);
}

}  // namespace polyrc
