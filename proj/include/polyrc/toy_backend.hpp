#ifndef POLYRC_TOY_BACKEND_HPP_
#define POLYRC_TOY_BACKEND_HPP_

#include <span>
#include <vector>

#include "polyrc/backend.hpp"

namespace polyrc {

struct ToyModelConfig {
  std::size_t dim = 32;
  std::size_t max_decode_length = 16;
  std::uint64_t init_seed = 1;
};

// Small trainable encoder-decoder.
//
// Encoder: mean of input embeddings (soft-prompt slots have their own
// columns) through one tanh layer, giving a context vector s.
// Decoder step t: h_t = tanh(C s + D[y_{t-1}] + P[t] + b), logits = U h_t + u,
// with y_0 = <s>. Trained with AdamW on the summed token NLL under teacher
// forcing; gradients are computed by hand.
class ToySeq2Seq final : public Seq2SeqBackend {
 public:
  struct Parameters {
    Eigen::MatrixXd enc_embed;   // dim x (V + 3)
    Eigen::MatrixXd enc_weight;  // dim x dim
    Eigen::VectorXd enc_bias;
    Eigen::MatrixXd dec_context; // dim x dim
    Eigen::MatrixXd dec_embed;   // dim x V
    Eigen::MatrixXd dec_pos;     // dim x max_decode_length
    Eigen::VectorXd dec_bias;
    Eigen::MatrixXd out_weight;  // V x dim
    Eigen::VectorXd out_bias;

    Parameters zeros_like() const;
    // Every tensor as a flat column-major block, in a fixed order.
    std::vector<std::span<double>> blocks();
    std::size_t count() const;
  };

  ToySeq2Seq(Vocabulary vocabulary, ToyModelConfig config);

  static std::unique_ptr<ToySeq2Seq> load_blob(const std::filesystem::path& path);

  std::string name() const override { return "toy"; }
  const Vocabulary& vocabulary() const override { return vocab_; }
  LogitMatrix decode_logits(const PromptInstance& instance,
                            std::size_t max_length) const override;
  TrainSummary train(std::span<const PromptInstance> instances,
                     const TrainConfig& config) override;
  std::unique_ptr<Seq2SeqBackend> clone() const override;
  void save_blob(const std::filesystem::path& path) const override;

  // Mean over instances of the summed target-token NLL.
  double loss(std::span<const PromptInstance> instances) const;
  // Gradient of loss() with respect to every parameter.
  Parameters gradient(std::span<const PromptInstance> instances) const;

  const Parameters& parameters() const { return params_; }
  Parameters& mutable_parameters() { return params_; }
  const ToyModelConfig& config() const { return config_; }
  std::size_t max_sequence_length() const { return max_sequence_length_; }
  void set_max_sequence_length(std::size_t n) { max_sequence_length_ = n; }

 private:
  // Per-instance loss; accumulates into grad when non-null.
  double instance_loss(const PromptInstance& instance, std::size_t max_len,
                       Parameters* grad, std::size_t* tokens) const;
  Eigen::VectorXd encode(const std::vector<int>& ids) const;

  Vocabulary vocab_;
  ToyModelConfig config_;
  std::size_t max_sequence_length_ = 256;
  Parameters params_;
};

}  // namespace polyrc

#endif  // POLYRC_TOY_BACKEND_HPP_
