#include "polyrc/table_backend.hpp"

#include <fstream>

namespace polyrc {

namespace {

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j) {
  const auto rows = j.get<std::vector<std::vector<double>>>();
  const Eigen::Index cols = rows.empty() ? 0 : static_cast<Eigen::Index>(rows.front().size());
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (static_cast<Eigen::Index>(rows[r].size()) != cols) {
      throw BackendError("ragged matrix in table backend blob");
    }
    for (Eigen::Index c = 0; c < cols; ++c) m(static_cast<Eigen::Index>(r), c) = rows[r][c];
  }
  return m;
}

}  // namespace

TableBackend::TableBackend(Vocabulary vocabulary, Eigen::MatrixXd default_matrix)
    : vocab_(std::move(vocabulary)), default_(std::move(default_matrix)) {
  if (default_.rows() != static_cast<Eigen::Index>(vocab_.size())) {
    throw BackendError("table backend matrix rows must equal the vocabulary size");
  }
}

void TableBackend::set_matrix_for(const std::string& input_text, Eigen::MatrixXd matrix) {
  if (matrix.rows() != static_cast<Eigen::Index>(vocab_.size())) {
    throw BackendError("table backend matrix rows must equal the vocabulary size");
  }
  keyed_[input_text] = std::move(matrix);
}

LogitMatrix TableBackend::decode_logits(const PromptInstance& instance,
                                        std::size_t max_length) const {
  if (max_length == 0) throw BackendError("decode length must be at least 1");
  Eigen::MatrixXd m;
  if (const auto it = keyed_.find(instance.input_text()); it != keyed_.end()) {
    m = it->second;
  } else if (generator_) {
    m = generator_(instance, max_length);
  } else {
    m = default_;
  }
  if (m.cols() < static_cast<Eigen::Index>(max_length)) {
    throw BackendError("table backend holds " + std::to_string(m.cols()) +
                       " decode steps, " + std::to_string(max_length) + " requested");
  }
  return LogitMatrix(m.leftCols(static_cast<Eigen::Index>(max_length)));
}

TrainSummary TableBackend::train(std::span<const PromptInstance>, const TrainConfig& config) {
  if (config.epochs != 0) throw BackendError("table backend is not trainable");
  return {};
}

std::unique_ptr<Seq2SeqBackend> TableBackend::clone() const {
  return std::make_unique<TableBackend>(*this);
}

void TableBackend::save_blob(const std::filesystem::path& path) const {
  nlohmann::json j;
  j["vocabulary"] = vocab_.tokens();
  j["default"] = matrix_to_json(default_);
  j["keyed"] = nlohmann::json::object();
  for (const auto& [text, m] : keyed_) j["keyed"][text] = matrix_to_json(m);
  std::ofstream out(path);
  if (!out) throw BackendError("cannot write " + path.string());
  out << j.dump() << '\n';
}

std::unique_ptr<TableBackend> TableBackend::load_blob(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw BackendError("cannot read " + path.string());
  const auto j = nlohmann::json::parse(in);
  auto backend = std::make_unique<TableBackend>(
      Vocabulary(j.at("vocabulary").get<std::vector<std::string>>()),
      matrix_from_json(j.at("default")));
  for (const auto& [text, m] : j.at("keyed").items()) {
    backend->set_matrix_for(text, matrix_from_json(m));
  }
  return backend;
}

}  // namespace polyrc
