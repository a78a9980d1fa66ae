#ifndef POLYRC_VERBALIZER_HPP_
#define POLYRC_VERBALIZER_HPP_

#include <filesystem>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "polyrc/text.hpp"

namespace polyrc {

class VerbalizerError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Token-level abbreviation expansions applied by verbalize_en, e.g.
// org -> organization.
using Abbreviations = std::map<std::string, std::string>;

const Abbreviations& default_abbreviations();
Abbreviations load_abbreviations(const std::filesystem::path& path);

// Splits the identifier on '-' and '_' and expands abbreviations:
// "org-has-member" -> "organization has member".
std::string verbalize_en(std::string_view relation,
                         const Abbreviations& abbreviations = default_abbreviations());

// One-to-one relation -> verbalization map for a single language.
class VerbalizerTable {
 public:
  VerbalizerTable() = default;
  // Throws VerbalizerError if two relations share a verbalization, or an
  // entry is empty or carries stray whitespace.
  VerbalizerTable(std::string language, std::map<std::string, std::string> entries);

  static VerbalizerTable from_json_file(const std::filesystem::path& path,
                                        std::string language);

  const std::string& language() const { return language_; }
  const std::map<std::string, std::string>& entries() const { return entries_; }
  bool contains(const std::string& relation) const { return entries_.count(relation) > 0; }
  const std::string& at(const std::string& relation) const;

  // Relations of `relation_set` without an entry.
  std::vector<std::string> missing(const std::set<std::string>& relation_set) const;

 private:
  std::string language_;
  std::map<std::string, std::string> entries_;
};

// English is rule-derived; every other language needs a table.
VerbalizerTable english_table(const std::set<std::string>& relations,
                              const Abbreviations& abbreviations = default_abbreviations());

class VerbalizerSet {
 public:
  VerbalizerSet() = default;
  explicit VerbalizerSet(Abbreviations abbreviations)
      : abbreviations_(std::move(abbreviations)) {}

  // Loads every <lang>.json in `dir`, plus abbreviations.json when present.
  static VerbalizerSet load_directory(const std::filesystem::path& dir);

  void add(VerbalizerTable table);
  bool has_language(const std::string& language) const;
  const VerbalizerTable* find(const std::string& language) const;
  std::vector<std::string> languages() const;
  const Abbreviations& abbreviations() const { return abbreviations_; }

  // phi^L(r). For English this is verbalize_en(r); otherwise the table entry.
  // Throws VerbalizerError naming relation and language when undefined.
  std::string verbalize(const std::string& relation, const std::string& language) const;

  // Throws unless verbalize(r, language) is defined for every r.
  void check_total(const std::set<std::string>& relations,
                   const std::string& language) const;

 private:
  Abbreviations abbreviations_ = default_abbreviations();
  std::map<std::string, VerbalizerTable> tables_;
};

struct LengthStats {
  std::size_t count = 0;
  double mean = 0.0;
  double stddev = 0.0;  // population
};

LengthStats length_stats(const VerbalizerTable& table, const TextTokenizer& tokenizer);
// Pooled over all entries of all tables.
LengthStats length_stats(const std::vector<VerbalizerTable>& tables,
                         const TextTokenizer& tokenizer);

}  // namespace polyrc

#endif  // POLYRC_VERBALIZER_HPP_
