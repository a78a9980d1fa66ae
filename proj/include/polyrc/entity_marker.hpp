#ifndef POLYRC_ENTITY_MARKER_HPP_
#define POLYRC_ENTITY_MARKER_HPP_

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "polyrc/backend.hpp"
#include "polyrc/classifier.hpp"
#include "polyrc/corpus.hpp"

namespace polyrc {

// Token ids with <e1> </e1> around the head and <e2> </e2> around the tail.
struct MarkedInput {
  std::vector<int> ids;
  std::size_t head_start = 0;  // index of <e1>
  std::size_t tail_start = 0;  // index of <e2>
};

// Throws BackendError when the marked sequence is longer than max_length.
MarkedInput mark_entities(const RCExample& example, const Vocabulary& vocabulary,
                          std::size_t max_length);

// Anything that maps a token sequence to one vector per position.
class TokenEncoder {
 public:
  virtual ~TokenEncoder() = default;
  virtual std::size_t dim() const = 0;
  virtual Eigen::MatrixXd encode(const std::vector<int>& ids) const = 0;  // dim x n
};

// Vectors at the two start markers.
EntityPair encode_entity_starts(const TokenEncoder& encoder, const MarkedInput& input);

// Position i -> one-hot e_i of width max_positions. Handy in tests.
class OneHotPositionEncoder final : public TokenEncoder {
 public:
  explicit OneHotPositionEncoder(std::size_t max_positions) : size_(max_positions) {}
  std::size_t dim() const override { return size_; }
  Eigen::MatrixXd encode(const std::vector<int>& ids) const override;

 private:
  std::size_t size_;
};

struct EntityMarkerConfig {
  std::size_t dim = 32;
  double learning_rate = 1e-2;
  std::size_t epochs = 50;
  std::size_t batch_size = 16;
  std::size_t max_sequence_length = 256;
  std::uint64_t seed = 319;
};

// v_i = tanh(E[x_i] + E[x_{i+1}] + M mean_j E[x_j] + b), followed by the
// linear head over [v_<e1>; v_<e2>]. Trained with Adam on cross-entropy.
class EntityMarkerModel final : public TokenEncoder {
 public:
  EntityMarkerModel(Vocabulary vocabulary, std::vector<std::string> relations,
                    EntityMarkerConfig config);

  std::size_t dim() const override { return config_.dim; }
  Eigen::MatrixXd encode(const std::vector<int>& ids) const override;

  // Returns mean cross-entropy per epoch.
  std::vector<double> train(std::span<const RCExample> examples);
  Eigen::VectorXd logits(const RCExample& example) const;
  std::string predict(const RCExample& example) const;

  double loss(std::span<const RCExample> examples) const;

  const LinearHead& head() const { return head_; }
  const Vocabulary& vocabulary() const { return vocab_; }

 private:
  struct Grads {
    Eigen::MatrixXd embed, mix, weight;
    Eigen::VectorXd bias, head_bias;
  };
  double example_loss(const RCExample& example, Grads* grads) const;

  Vocabulary vocab_;
  EntityMarkerConfig config_;
  Eigen::MatrixXd embed_;  // dim x V
  Eigen::MatrixXd mix_;    // dim x dim
  Eigen::VectorXd bias_;
  LinearHead head_;
};

}  // namespace polyrc

#endif  // POLYRC_ENTITY_MARKER_HPP_
