#ifndef POLYRC_CLASSIFIER_HPP_
#define POLYRC_CLASSIFIER_HPP_

#include <map>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "polyrc/backend.hpp"

namespace polyrc {

class ClassifierError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RelationScore {
  std::string relation;
  double score = 0.0;
  std::vector<int> target_ids;
};

struct ScoreTable {
  std::vector<RelationScore> entries;  // sorted by relation id
  bool tie_break_applied = false;      // the top score is shared

  const RelationScore& at(const std::string& relation) const;
};

// Softmax over the vocabulary of one decode step.
Eigen::VectorXd column_softmax(const LogitMatrix& logits, std::size_t step);

// score(r) = (1/|phi(r)|) * sum_t softmax(L[:, t])[phi_t(r)].
// Probabilities are summed across positions rather than multiplied, then
// divided by the target length. Throws ClassifierError for empty targets,
// targets longer than the matrix, or ids outside the vocabulary.
ScoreTable score_relations(const LogitMatrix& logits,
                           const std::map<std::string, std::vector<int>>& targets);

struct Prediction {
  std::string relation;
  double score = 0.0;
  bool tie = false;
};

// Highest score wins; ties go to the lexicographically smallest relation id.
// Rescaling the scores (e.g. normalising by their sum) never changes it.
Prediction predict(const ScoreTable& scores);

// Audit view: relation, score, rank (1 = predicted).
nlohmann::json to_json(const ScoreTable& scores);

// Token ids of every relation's verbalization in `language`.
std::map<std::string, std::vector<int>> target_token_ids(
    const std::set<std::string>& relations, const std::string& language,
    const VerbalizerSet& verbalizers, const Vocabulary& vocabulary);

// Linear classifier over concatenated entity-start vectors.
struct LinearHead {
  Eigen::MatrixXd weight;  // classes x (2 * dim)
  Eigen::VectorXd bias;    // classes
  std::vector<std::string> relations;
};

using EntityPair = std::pair<Eigen::VectorXd, Eigen::VectorXd>;

// W [v_head; v_tail] + b. Throws ClassifierError on dimension mismatch.
Eigen::VectorXd entity_marker_classify(const EntityPair& vectors, const LinearHead& head);

// Expected micro-F1 (%) of uniform guessing over num_classes: 100 / C.
double random_baseline_micro_f1(std::size_t num_classes);

}  // namespace polyrc

#endif  // POLYRC_CLASSIFIER_HPP_
