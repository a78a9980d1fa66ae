#ifndef POLYRC_EXPERIMENT_HPP_
#define POLYRC_EXPERIMENT_HPP_

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "polyrc/backend.hpp"
#include "polyrc/classifier.hpp"
#include "polyrc/corpus.hpp"
#include "polyrc/metrics.hpp"
#include "polyrc/prompt.hpp"
#include "polyrc/report.hpp"
#include "polyrc/verbalizer.hpp"

namespace polyrc {

class ExperimentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Episode {
  std::size_t k = 0;
  std::uint64_t seed = 0;
  std::string language;  // "mixed" when drawn from several languages
  std::vector<RCExample> examples;
  std::map<std::string, std::size_t> per_relation;
  std::vector<std::string> underfilled;  // relations with fewer than k examples

  std::vector<std::string> ids() const;
  Dataset dataset() const;
};

// min(k, n_r) examples per (language, relation), drawn without replacement.
// A pure function of (dataset, k, seed). Requires a train split.
Episode sample_k_shot(const Dataset& dataset, std::size_t k, std::uint64_t seed);

// English k-shot episode drawn from a separate seed stream, never containing
// an id from `exclude_ids` (normally the training episode's ids).
Episode make_validation(const Dataset& english_train, std::size_t k, std::uint64_t seed,
                        const std::set<std::string>& exclude_ids = {});

enum class Protocol { Full, FewShot, ZeroShotInContext, ZeroShotTransfer };

std::string_view to_string(Protocol protocol);  // full | fewshot | zeroshot-incontext | ...
Protocol parse_protocol(std::string_view name);

inline const std::vector<std::uint64_t>& default_seeds() {
  static const std::vector<std::uint64_t> seeds{13, 36, 121, 223, 319};
  return seeds;
}

struct RunSpec {
  Protocol protocol = Protocol::Full;
  PromptKind kind = PromptKind::InLanguage;
  std::vector<WordOrder> word_orders{WordOrder::SVO};
  std::vector<std::string> languages;  // empty: every language with a test split
  std::vector<std::uint64_t> seeds = default_seeds();
  std::size_t k = 8;
  bool allow_any_k = false;  // otherwise k must be 8, 16 or 32
  TrainConfig train_config;
  F1Convention convention = F1Convention::AllClasses;
  StdKind std_kind = StdKind::Population;
  bool resample_validation_per_seed = true;
  std::size_t decode_length = 0;  // 0: longest candidate target
  std::size_t threads = 0;        // evaluation workers, 0: hardware

  void validate() const;
};

// Protocol defaults: full lr 3e-5 / 5 epochs, few-shot lr 3e-4 / 20 epochs,
// batch 16 and max length 256 for both.
RunSpec default_run_spec(Protocol protocol);

nlohmann::ordered_json to_json(const RunSpec& spec);
// Keys missing from `j` keep `base`; unknown keys throw ExperimentError.
RunSpec run_spec_from_json(const nlohmann::json& j, RunSpec base);

// Datasets by (language, split). Every lookup is logged so protocol
// constraints can be audited.
class CorpusStore {
 public:
  using Key = std::pair<std::string, Split>;

  CorpusStore() = default;
  // Splits multilingual datasets per language.
  void add(const Dataset& dataset);

  bool has(const std::string& language, Split split) const;
  const Dataset& get(const std::string& language, Split split) const;
  std::vector<std::string> languages(Split split) const;

  std::vector<Key> access_log() const;
  void clear_log() const;

 private:
  std::map<Key, Dataset> data_;
  mutable std::mutex mutex_;
  mutable std::vector<Key> log_;
};

struct LanguageEval {
  std::string language;
  double micro_f1 = 0.0;
  std::size_t examples = 0;
  std::size_t ties = 0;
  std::size_t truncated = 0;
  std::vector<std::string> predictions;
};

// Scores every test example against the language's relation set.
LanguageEval evaluate_language(const Seq2SeqBackend& backend, const Dataset& test,
                               PromptVariant variant, const VerbalizerSet& verbalizers,
                               F1Convention convention, std::size_t decode_length = 0);

std::vector<PromptInstance> render_all(const std::vector<RCExample>& examples,
                                       PromptVariant variant, const VerbalizerSet& verbalizers);

// All runners clone `backend` and leave it untouched.
EvalReport run_fully_supervised(const RunSpec& spec, const Seq2SeqBackend& backend,
                                const CorpusStore& data, const VerbalizerSet& verbalizers);
EvalReport run_few_shot(const RunSpec& spec, const Seq2SeqBackend& backend,
                        const CorpusStore& data, const VerbalizerSet& verbalizers);
EvalReport run_zero_shot_incontext(const RunSpec& spec, const Seq2SeqBackend& backend,
                                   const CorpusStore& data, const VerbalizerSet& verbalizers);
// Trains on the English train split with IL prompts, then evaluates every
// requested language with CS prompts.
EvalReport run_cross_lingual_transfer(const RunSpec& spec, const Seq2SeqBackend& backend,
                                      const CorpusStore& data,
                                      const VerbalizerSet& verbalizers);

EvalReport run_protocol(const RunSpec& spec, const Seq2SeqBackend& backend,
                        const CorpusStore& data, const VerbalizerSet& verbalizers);

}  // namespace polyrc

#endif  // POLYRC_EXPERIMENT_HPP_
