// Deterministic backends for protocol tests.
#ifndef POLYRC_TEST_MOCK_BACKENDS_HPP_
#define POLYRC_TEST_MOCK_BACKENDS_HPP_

#include <memory>

#include "polyrc/random.hpp"
#include "polyrc/table_backend.hpp"

namespace mocks {

// Puts a large logit on the gold target token at every step, i.e. a model
// that has memorised the data.
inline std::unique_ptr<polyrc::TableBackend> gold_backend(const polyrc::Vocabulary& vocab) {
  const auto V = static_cast<Eigen::Index>(vocab.size());
  auto b = std::make_unique<polyrc::TableBackend>(vocab, Eigen::MatrixXd::Zero(V, 1));
  b->set_generator([vocab](const polyrc::PromptInstance& inst, std::size_t len) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(vocab.size()),
                                              static_cast<Eigen::Index>(len));
    const auto ids = vocab.encode_target(inst.target);
    for (std::size_t t = 0; t < ids.size() && t < len; ++t) {
      m(ids[t], static_cast<Eigen::Index>(t)) = 10.0;
    }
    return m;
  });
  return b;
}

// Gaussian logits keyed by the prompt text; carries no information.
inline std::unique_ptr<polyrc::TableBackend> noise_backend(const polyrc::Vocabulary& vocab,
                                                           std::uint64_t seed) {
  const auto V = static_cast<Eigen::Index>(vocab.size());
  auto b = std::make_unique<polyrc::TableBackend>(vocab, Eigen::MatrixXd::Zero(V, 1));
  b->set_generator([V, seed](const polyrc::PromptInstance& inst, std::size_t len) {
    polyrc::Rng rng(polyrc::derive_seed(seed, polyrc::fnv1a64(inst.example_id)));
    Eigen::MatrixXd m(V, static_cast<Eigen::Index>(len));
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      for (Eigen::Index r = 0; r < V; ++r) m(r, c) = rng.normal(0.0, 3.0);
    }
    return m;
  });
  return b;
}

}  // namespace mocks

#endif  // POLYRC_TEST_MOCK_BACKENDS_HPP_
