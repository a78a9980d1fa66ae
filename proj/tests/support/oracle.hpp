// Test-side reference computations. Written independently of the library:
// no max-shift softmax, long double accumulation, plain loops.
#ifndef POLYRC_TEST_ORACLE_HPP_
#define POLYRC_TEST_ORACLE_HPP_

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "polyrc/corpus.hpp"

namespace oracle {

using Matrix = std::vector<std::vector<double>>;  // [token][step]

inline long double softmax_at(const Matrix& logits, std::size_t step, std::size_t token) {
  long double denom = 0.0L;
  for (const auto& row : logits) denom += std::exp(static_cast<long double>(row[step]));
  return std::exp(static_cast<long double>(logits[token][step])) / denom;
}

inline std::map<std::string, double> scores(const Matrix& logits,
                                             const std::map<std::string, std::vector<int>>& targets) {
  std::map<std::string, double> out;
  for (const auto& [rel, ids] : targets) {
    long double total = 0.0L;
    for (std::size_t t = 0; t < ids.size(); ++t) {
      total += softmax_at(logits, t, static_cast<std::size_t>(ids[t]));
    }
    out[rel] = static_cast<double>(total / static_cast<long double>(ids.size()));
  }
  return out;
}

// Exhaustive scan: keep the first maximum in lexicographic order.
inline std::string argmax(const std::map<std::string, double>& s) {
  std::string best;
  double best_score = -1.0;
  for (const auto& [rel, v] : s) {
    if (v > best_score) {
      best = rel;
      best_score = v;
    }
  }
  return best;
}

inline polyrc::RCExample goethe() {
  // Faust has-author Goethe
  return {"goethe", "Goethe schrieb Faust.", {15, 20}, {0, 6}, "has-author", "de"};
}

inline polyrc::RCExample example(std::string id, std::string relation, std::string lang = "en") {
  return {std::move(id), "Alice met Bob today.", {0, 5}, {10, 13}, std::move(relation),
          std::move(lang)};
}

}  // namespace oracle

#endif  // POLYRC_TEST_ORACLE_HPP_
