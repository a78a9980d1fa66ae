#ifndef POLYRC_BACKEND_HPP_
#define POLYRC_BACKEND_HPP_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "polyrc/corpus.hpp"
#include "polyrc/prompt.hpp"
#include "polyrc/text.hpp"
#include "polyrc/verbalizer.hpp"

namespace polyrc {

class BackendError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Word-level vocabulary shared by the desk-scale backends. Ids 0..7 are
// reserved; soft-prompt tokens live past size() and are never produced by
// the decoder.
class Vocabulary final : public TextTokenizer {
 public:
  static constexpr int kPad = 0;
  static constexpr int kUnk = 1;
  static constexpr int kBos = 2;
  static constexpr int kBlank = 3;  // realisation of the template blank
  static constexpr int kHeadStart = 4;
  static constexpr int kHeadEnd = 5;
  static constexpr int kTailStart = 6;
  static constexpr int kTailEnd = 7;
  static constexpr int kNumReserved = 8;

  Vocabulary();
  // `tokens` must begin with the reserved tokens in order.
  explicit Vocabulary(std::vector<std::string> tokens);

  int add(const std::string& token);
  std::optional<int> find(std::string_view token) const;
  int id(std::string_view token) const;  // kUnk when absent
  const std::string& token(int id) const;
  std::size_t size() const { return tokens_.size(); }
  const std::vector<std::string>& tokens() const { return tokens_; }

  // Whitespace tokens; targets are tokenized this way.
  std::vector<std::string> tokenize(std::string_view text) const override;
  // Encoder-side words: whitespace split, trailing punctuation peeled off.
  static std::vector<std::string> input_words(std::string_view text);

  // Throws BackendError if any word is out of vocabulary.
  std::vector<int> encode_target(std::string_view text) const;
  std::string decode(std::span<const int> ids) const;

  // Collects words from the given datasets plus every verbalization the
  // verbalizer set yields for `relations` in `languages`.
  static Vocabulary build(const std::vector<const Dataset*>& datasets,
                          const VerbalizerSet& verbalizers,
                          const std::set<std::string>& relations,
                          const std::vector<std::string>& languages);

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> index_;
};

struct EncodedInput {
  std::vector<int> ids;
  bool truncated = false;
};

// Maps a rendered prompt to encoder ids: literal words through the
// vocabulary, soft slot k to vocabulary.size() + k - 1, the blank to kBlank.
// When the result exceeds max_length, words are dropped from the end of the
// body text first so the entity/blank suffix survives.
EncodedInput encode_prompt(const PromptInstance& instance, const Vocabulary& vocabulary,
                           std::size_t max_length);

// Decoder scores, vocabulary x decode steps.
class LogitMatrix {
 public:
  LogitMatrix() = default;
  // Throws BackendError on non-finite entries.
  explicit LogitMatrix(Eigen::MatrixXd values, bool truncated = false);

  const Eigen::MatrixXd& values() const { return values_; }
  std::size_t vocab_size() const { return static_cast<std::size_t>(values_.rows()); }
  std::size_t length() const { return static_cast<std::size_t>(values_.cols()); }
  double operator()(std::size_t token, std::size_t step) const {
    return values_(static_cast<Eigen::Index>(token), static_cast<Eigen::Index>(step));
  }
  // Input was cut to max_sequence_length before decoding.
  bool truncated() const { return truncated_; }

 private:
  Eigen::MatrixXd values_;
  bool truncated_ = false;
};

struct TrainConfig {
  double learning_rate = 3e-5;
  std::size_t batch_size = 16;
  std::size_t epochs = 5;
  std::size_t max_sequence_length = 256;
  std::string optimizer = "adamw";
  double weight_decay = 0.01;
  std::uint64_t seed = 319;

  void validate() const;
};

nlohmann::json to_json(const TrainConfig& config);
// Missing keys keep the values already in `base`; unknown keys throw.
TrainConfig train_config_from_json(const nlohmann::json& j, TrainConfig base = {});

struct TrainSummary {
  std::vector<double> epoch_loss;        // mean over instances of summed token NLL
  std::vector<double> epoch_token_loss;  // nats per target token
  std::size_t steps = 0;
};

// Encoder-decoder used for prompting. Inference is const and may run
// concurrently; train() needs exclusive access.
class Seq2SeqBackend {
 public:
  virtual ~Seq2SeqBackend() = default;

  virtual std::string name() const = 0;
  virtual const Vocabulary& vocabulary() const = 0;

  // Scores for decode steps 1..max_length, obtained by greedy decoding that
  // feeds back the model's own argmax tokens.
  virtual LogitMatrix decode_logits(const PromptInstance& instance,
                                    std::size_t max_length) const = 0;

  // Teacher-forced NLL training on the instances' targets.
  virtual TrainSummary train(std::span<const PromptInstance> instances,
                             const TrainConfig& config) = 0;

  virtual std::unique_ptr<Seq2SeqBackend> clone() const = 0;

  // Opaque blob; see save_checkpoint for the sidecar.
  virtual void save_blob(const std::filesystem::path& path) const = 0;

  std::vector<int> target_ids(std::string_view text) const {
    return vocabulary().encode_target(text);
  }
};

// Writes `path` (blob) and `path`.json recording backend name, TrainConfig
// and seed.
void save_checkpoint(const Seq2SeqBackend& backend, const std::filesystem::path& path,
                     const TrainConfig& config);
std::unique_ptr<Seq2SeqBackend> load_checkpoint(const std::filesystem::path& path);
std::filesystem::path checkpoint_sidecar(const std::filesystem::path& path);

}  // namespace polyrc

#endif  // POLYRC_BACKEND_HPP_
