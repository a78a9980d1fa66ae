#include "polyrc/classifier.hpp"

#include <algorithm>
#include <cmath>

namespace polyrc {

const RelationScore& ScoreTable::at(const std::string& relation) const {
  for (const auto& e : entries) {
    if (e.relation == relation) return e;
  }
  throw ClassifierError("relation '" + relation + "' not in score table");
}

Eigen::VectorXd column_softmax(const LogitMatrix& logits, std::size_t step) {
  if (step >= logits.length()) throw ClassifierError("decode step out of range");
  const auto col = logits.values().col(static_cast<Eigen::Index>(step));
  const double peak = col.maxCoeff();
  Eigen::VectorXd p = (col.array() - peak).exp().matrix();
  return p / p.sum();
}

ScoreTable score_relations(const LogitMatrix& logits,
                           const std::map<std::string, std::vector<int>>& targets) {
  if (targets.empty()) throw ClassifierError("no candidate relations to score");
  std::size_t longest = 0;
  for (const auto& [relation, ids] : targets) {
    if (ids.empty()) throw ClassifierError("relation '" + relation + "' has an empty target");
    longest = std::max(longest, ids.size());
    for (int id : ids) {
      if (id < 0 || static_cast<std::size_t>(id) >= logits.vocab_size()) {
        throw ClassifierError("target token " + std::to_string(id) + " of '" + relation +
                              "' outside the vocabulary");
      }
    }
  }
  if (longest > logits.length()) {
    throw ClassifierError("target of length " + std::to_string(longest) +
                          " exceeds decode length " + std::to_string(logits.length()));
  }
  std::vector<Eigen::VectorXd> probs;
  probs.reserve(longest);
  for (std::size_t t = 0; t < longest; ++t) probs.push_back(column_softmax(logits, t));

  ScoreTable table;
  double best = -1.0;
  std::size_t best_count = 0;
  for (const auto& [relation, ids] : targets) {
    double sum = 0.0;
    for (std::size_t t = 0; t < ids.size(); ++t) sum += probs[t](ids[t]);
    const double score = sum / static_cast<double>(ids.size());
    table.entries.push_back({relation, score, ids});
    if (score > best) {
      best = score;
      best_count = 1;
    } else if (score == best) {
      ++best_count;
    }
  }
  table.tie_break_applied = best_count > 1;
  return table;
}

Prediction predict(const ScoreTable& scores) {
  if (scores.entries.empty()) throw ClassifierError("cannot predict from an empty table");
  const RelationScore* best = nullptr;
  bool tie = false;
  for (const auto& e : scores.entries) {
    if (!best || e.score > best->score) {
      best = &e;
      tie = false;
    } else if (e.score == best->score) {
      tie = true;
      if (e.relation < best->relation) best = &e;
    }
  }
  return {best->relation, best->score, tie};
}

nlohmann::json to_json(const ScoreTable& scores) {
  std::vector<const RelationScore*> ranked;
  for (const auto& e : scores.entries) ranked.push_back(&e);
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto* a, const auto* b) {
    if (a->score != b->score) return a->score > b->score;
    return a->relation < b->relation;
  });
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    rows.push_back({{"relation", ranked[i]->relation},
                    {"score", ranked[i]->score},
                    {"rank", i + 1}});
  }
  return {{"scores", rows}, {"tie_break_applied", scores.tie_break_applied}};
}

std::map<std::string, std::vector<int>> target_token_ids(
    const std::set<std::string>& relations, const std::string& language,
    const VerbalizerSet& verbalizers, const Vocabulary& vocabulary) {
  std::map<std::string, std::vector<int>> out;
  for (const auto& r : relations) {
    out[r] = vocabulary.encode_target(verbalizers.verbalize(r, language));
  }
  return out;
}

Eigen::VectorXd entity_marker_classify(const EntityPair& vectors, const LinearHead& head) {
  const auto d = vectors.first.size();
  if (vectors.second.size() != d) {
    throw ClassifierError("head and tail vectors differ in dimension");
  }
  if (head.weight.cols() != 2 * d) {
    throw ClassifierError("head expects input dimension " +
                          std::to_string(head.weight.cols()) + ", got " +
                          std::to_string(2 * d));
  }
  if (head.bias.size() != head.weight.rows()) {
    throw ClassifierError("head bias does not match its weight rows");
  }
  Eigen::VectorXd features(2 * d);
  features << vectors.first, vectors.second;
  return head.weight * features + head.bias;
}

double random_baseline_micro_f1(std::size_t num_classes) {
  if (num_classes == 0) throw ClassifierError("random baseline needs at least one class");
  return 100.0 / static_cast<double>(num_classes);
}

}  // namespace polyrc
