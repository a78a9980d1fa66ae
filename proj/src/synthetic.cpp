#include "polyrc/synthetic.hpp"

#include <stdexcept>

#include "polyrc/random.hpp"

namespace polyrc {

namespace {

const std::vector<std::string>& relation_pool() {
  static const std::vector<std::string> pool{
      "birth-place",  "has-author", "has-spouse",   "headquarters", "won-award",
      "has-genre",    "is-member-of", "org-has-founder", "has-parent", "movie-has-director",
      "from-country", "has-occupation"};
  return pool;
}

RCExample make_sentence(const std::string& id, const std::string& relation,
                        std::size_t relation_index, const std::string& lang,
                        const SyntheticConfig& config, Rng& rng) {
  std::vector<std::string> words;
  for (std::size_t i = 0; i < config.filler_words; ++i) {
    words.push_back("w" + std::to_string(rng.below(config.filler_vocab)) + "_" + lang);
  }
  const std::string trigger = config.shared_triggers
                                  ? "t" + std::to_string(relation_index)
                                  : "t" + std::to_string(relation_index) + "_" + lang;
  const std::string head = "ent" + std::to_string(rng.below(500));
  std::string tail = "ent" + std::to_string(rng.below(500));
  if (tail == head) tail += "b";
  // head < trigger < tail in most sentences; swapped order otherwise
  std::size_t a = static_cast<std::size_t>(rng.below(words.size() + 1));
  words.insert(words.begin() + static_cast<std::ptrdiff_t>(a), head);
  std::size_t b = a + 1 + static_cast<std::size_t>(rng.below(words.size() - a));
  words.insert(words.begin() + static_cast<std::ptrdiff_t>(b), trigger);
  std::size_t c = b + 1 + static_cast<std::size_t>(rng.below(words.size() - b));
  words.insert(words.begin() + static_cast<std::ptrdiff_t>(c), tail);
  const bool swap = rng.uniform() < 0.3;
  std::size_t head_pos = swap ? c : a;
  std::size_t tail_pos = swap ? a : c;
  if (swap) std::swap(words[a], words[c]);

  RCExample ex;
  ex.id = id;
  ex.relation = relation;
  ex.language = lang;
  std::size_t offset = 0;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i) {
      ex.text += ' ';
      ++offset;
    }
    const Span span{offset, offset + words[i].size()};  // ASCII only
    if (i == head_pos) ex.head = span;
    if (i == tail_pos) ex.tail = span;
    ex.text += words[i];
    offset += words[i].size();
  }
  ex.text += '.';
  return ex;
}

}  // namespace

SyntheticCorpus make_synthetic_corpus(const SyntheticConfig& config) {
  if (config.relations == 0 || config.relations > relation_pool().size()) {
    throw std::invalid_argument("synthetic corpus supports 1.." +
                                std::to_string(relation_pool().size()) + " relations");
  }
  if (config.languages.empty()) throw std::invalid_argument("synthetic corpus needs languages");
  if (config.filler_vocab == 0) throw std::invalid_argument("filler_vocab must be positive");
  SyntheticCorpus out;
  std::vector<std::string> rels(relation_pool().begin(),
                                relation_pool().begin() + static_cast<std::ptrdiff_t>(config.relations));
  out.relations.insert(rels.begin(), rels.end());

  std::vector<RCExample> train, test;
  for (const auto& lang : config.languages) {
    Rng rng(derive_seed(config.seed, fnv1a64(lang)));
    for (std::size_t r = 0; r < rels.size(); ++r) {
      for (std::size_t i = 0; i < config.train_per_relation; ++i) {
        train.push_back(make_sentence(lang + "-train-" + std::to_string(r) + "-" +
                                          std::to_string(i),
                                      rels[r], r, lang, config, rng));
      }
      for (std::size_t i = 0; i < config.test_per_relation; ++i) {
        test.push_back(make_sentence(lang + "-test-" + std::to_string(r) + "-" +
                                         std::to_string(i),
                                     rels[r], r, lang, config, rng));
      }
    }
    if (lang != "en") {
      std::map<std::string, std::string> entries;
      for (std::size_t r = 0; r < rels.size(); ++r) {
        std::string v;
        for (const auto& w : split_whitespace(verbalize_en(rels[r]))) {
          v += (v.empty() ? "" : " ") + w + "_" + lang;
        }
        // vary the length against English
        if (r % 2 == 0) v += " x_" + lang;
        entries[rels[r]] = v;
      }
      out.verbalizers.add(VerbalizerTable(lang, std::move(entries)));
    }
  }
  out.train = Dataset(std::move(train), Split::Train);
  out.test = Dataset(std::move(test), Split::Test);
  return out;
}

}  // namespace polyrc
