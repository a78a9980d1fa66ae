#ifndef POLYRC_SYNTHETIC_HPP_
#define POLYRC_SYNTHETIC_HPP_

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "polyrc/corpus.hpp"
#include "polyrc/verbalizer.hpp"

namespace polyrc {

// Toy multilingual relation corpus. Each sentence is filler words plus a
// head entity, a tail entity and one trigger word that determines the
// relation. Filler words are language-specific; trigger words are shared
// across languages when shared_triggers is set.
struct SyntheticConfig {
  std::vector<std::string> languages{"en", "de", "fr"};
  std::size_t relations = 5;  // at most 12
  std::size_t train_per_relation = 32;
  std::size_t test_per_relation = 20;
  std::size_t filler_vocab = 40;
  std::size_t filler_words = 6;
  bool shared_triggers = true;
  std::uint64_t seed = 7;
};

struct SyntheticCorpus {
  Dataset train;
  Dataset test;
  std::set<std::string> relations;
  // English is rule-derived; every other language gets a generated table
  // whose entries differ from English in wording and length.
  VerbalizerSet verbalizers;
};

SyntheticCorpus make_synthetic_corpus(const SyntheticConfig& config);

}  // namespace polyrc

#endif  // POLYRC_SYNTHETIC_HPP_
