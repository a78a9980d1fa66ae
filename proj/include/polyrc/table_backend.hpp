#ifndef POLYRC_TABLE_BACKEND_HPP_
#define POLYRC_TABLE_BACKEND_HPP_

#include <functional>
#include <map>

#include "polyrc/backend.hpp"

namespace polyrc {

// Deterministic mock that serves prepared logit matrices. Lookup order:
// exact rendered input text, then the generator, then the default matrix.
// The first max_length columns are returned.
class TableBackend final : public Seq2SeqBackend {
 public:
  using Generator = std::function<Eigen::MatrixXd(const PromptInstance&, std::size_t)>;

  TableBackend(Vocabulary vocabulary, Eigen::MatrixXd default_matrix);

  void set_matrix_for(const std::string& input_text, Eigen::MatrixXd matrix);
  void set_generator(Generator generator) { generator_ = std::move(generator); }

  std::string name() const override { return "table"; }
  const Vocabulary& vocabulary() const override { return vocab_; }
  LogitMatrix decode_logits(const PromptInstance& instance,
                            std::size_t max_length) const override;
  // Only a zero-epoch call is accepted; it leaves the table untouched.
  TrainSummary train(std::span<const PromptInstance> instances,
                     const TrainConfig& config) override;
  std::unique_ptr<Seq2SeqBackend> clone() const override;
  // JSON blob with the vocabulary and the default/keyed matrices. Generators
  // are not persisted.
  void save_blob(const std::filesystem::path& path) const override;
  static std::unique_ptr<TableBackend> load_blob(const std::filesystem::path& path);

 private:
  Vocabulary vocab_;
  Eigen::MatrixXd default_;
  std::map<std::string, Eigen::MatrixXd> keyed_;
  Generator generator_;
};

}  // namespace polyrc

#endif  // POLYRC_TABLE_BACKEND_HPP_
