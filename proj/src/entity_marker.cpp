#include "polyrc/entity_marker.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "polyrc/adamw.hpp"
#include "polyrc/random.hpp"

namespace polyrc {

namespace {

void append_words(const std::string& text, const Vocabulary& vocab, std::vector<int>& out) {
  for (const auto& w : Vocabulary::input_words(text)) out.push_back(vocab.id(w));
}

std::span<double> flat(Eigen::MatrixXd& m) { return {m.data(), static_cast<std::size_t>(m.size())}; }
std::span<double> flat(Eigen::VectorXd& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

}  // namespace

MarkedInput mark_entities(const RCExample& example, const Vocabulary& vocabulary,
                          std::size_t max_length) {
  validate_example(example);
  const bool head_first = example.head.start < example.tail.start;
  const Span& first = head_first ? example.head : example.tail;
  const Span& second = head_first ? example.tail : example.head;
  const int first_open = head_first ? Vocabulary::kHeadStart : Vocabulary::kTailStart;
  const int first_close = head_first ? Vocabulary::kHeadEnd : Vocabulary::kTailEnd;
  const int second_open = head_first ? Vocabulary::kTailStart : Vocabulary::kHeadStart;
  const int second_close = head_first ? Vocabulary::kTailEnd : Vocabulary::kHeadEnd;
  const std::size_t n = codepoint_length(example.text);
  const auto& text = example.text;

  MarkedInput out;
  append_words(codepoint_substr(text, 0, first.start), vocabulary, out.ids);
  const std::size_t first_pos = out.ids.size();
  out.ids.push_back(first_open);
  append_words(codepoint_substr(text, first.start, first.end), vocabulary, out.ids);
  out.ids.push_back(first_close);
  append_words(codepoint_substr(text, first.end, second.start), vocabulary, out.ids);
  const std::size_t second_pos = out.ids.size();
  out.ids.push_back(second_open);
  append_words(codepoint_substr(text, second.start, second.end), vocabulary, out.ids);
  out.ids.push_back(second_close);
  append_words(codepoint_substr(text, second.end, n), vocabulary, out.ids);

  out.head_start = head_first ? first_pos : second_pos;
  out.tail_start = head_first ? second_pos : first_pos;
  if (out.ids.size() > max_length) {
    throw BackendError("example '" + example.id + "' has " + std::to_string(out.ids.size()) +
                       " marked tokens, limit " + std::to_string(max_length));
  }
  return out;
}

EntityPair encode_entity_starts(const TokenEncoder& encoder, const MarkedInput& input) {
  const Eigen::MatrixXd h = encoder.encode(input.ids);
  if (input.head_start >= static_cast<std::size_t>(h.cols()) ||
      input.tail_start >= static_cast<std::size_t>(h.cols())) {
    throw BackendError("entity marker position outside the encoded sequence");
  }
  return {h.col(static_cast<Eigen::Index>(input.head_start)),
          h.col(static_cast<Eigen::Index>(input.tail_start))};
}

Eigen::MatrixXd OneHotPositionEncoder::encode(const std::vector<int>& ids) const {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(size_),
                                              static_cast<Eigen::Index>(ids.size()));
  if (ids.size() > size_) throw BackendError("sequence longer than one-hot encoder width");
  for (std::size_t i = 0; i < ids.size(); ++i) {
    out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = 1.0;
  }
  return out;
}

EntityMarkerModel::EntityMarkerModel(Vocabulary vocabulary, std::vector<std::string> relations,
                                     EntityMarkerConfig config)
    : vocab_(std::move(vocabulary)), config_(config) {
  if (relations.empty()) throw BackendError("entity marker model needs relations");
  std::sort(relations.begin(), relations.end());
  const auto d = static_cast<Eigen::Index>(config_.dim);
  const auto v = static_cast<Eigen::Index>(vocab_.size());
  const auto c = static_cast<Eigen::Index>(relations.size());
  Rng rng(derive_seed(config_.seed, 0xe17));
  auto fill = [&](Eigen::MatrixXd& m, double scale) {
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.normal(0.0, scale);
  };
  embed_.resize(d, v);
  fill(embed_, 0.5);
  mix_.resize(d, d);
  fill(mix_, 1.0 / std::sqrt(static_cast<double>(d)));
  bias_ = Eigen::VectorXd::Zero(d);
  head_.weight.resize(c, 2 * d);
  fill(head_.weight, 1.0 / std::sqrt(2.0 * static_cast<double>(d)));
  head_.bias = Eigen::VectorXd::Zero(c);
  head_.relations = std::move(relations);
}

Eigen::MatrixXd EntityMarkerModel::encode(const std::vector<int>& ids) const {
  const auto n = static_cast<Eigen::Index>(ids.size());
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(embed_.rows());
  for (int id : ids) mean += embed_.col(id);
  if (n > 0) mean /= static_cast<double>(n);
  const Eigen::VectorXd shared = mix_ * mean + bias_;
  Eigen::MatrixXd out(embed_.rows(), n);
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::VectorXd a = embed_.col(ids[i]) + shared;
    if (i + 1 < n) a += embed_.col(ids[i + 1]);
    out.col(i) = a.array().tanh().matrix();
  }
  return out;
}

Eigen::VectorXd EntityMarkerModel::logits(const RCExample& example) const {
  const auto marked = mark_entities(example, vocab_, config_.max_sequence_length);
  return entity_marker_classify(encode_entity_starts(*this, marked), head_);
}

std::string EntityMarkerModel::predict(const RCExample& example) const {
  const Eigen::VectorXd z = logits(example);
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < z.size(); ++i) {
    if (z(i) > z(best)) best = i;
  }
  return head_.relations[static_cast<std::size_t>(best)];
}

double EntityMarkerModel::example_loss(const RCExample& example, Grads* grads) const {
  const auto it = std::lower_bound(head_.relations.begin(), head_.relations.end(),
                                   example.relation);
  if (it == head_.relations.end() || *it != example.relation) {
    throw BackendError("relation '" + example.relation + "' unknown to the classifier head");
  }
  const auto gold = static_cast<Eigen::Index>(it - head_.relations.begin());
  const auto marked = mark_entities(example, vocab_, config_.max_sequence_length);
  const auto& ids = marked.ids;
  const auto n = static_cast<Eigen::Index>(ids.size());
  const Eigen::Index d = embed_.rows();

  Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
  for (int id : ids) mean += embed_.col(id);
  mean /= static_cast<double>(n);
  const Eigen::VectorXd shared = mix_ * mean + bias_;
  auto state = [&](std::size_t pos) {
    const auto i = static_cast<Eigen::Index>(pos);
    Eigen::VectorXd a = embed_.col(ids[pos]) + shared;
    if (i + 1 < n) a += embed_.col(ids[pos + 1]);
    return Eigen::VectorXd(a.array().tanh().matrix());
  };
  const Eigen::VectorXd vh = state(marked.head_start);
  const Eigen::VectorXd vt = state(marked.tail_start);
  Eigen::VectorXd f(2 * d);
  f << vh, vt;
  const Eigen::VectorXd z = head_.weight * f + head_.bias;
  const double peak = z.maxCoeff();
  Eigen::VectorXd p = (z.array() - peak).exp().matrix();
  const double norm = p.sum();
  p /= norm;
  const double loss = -(z(gold) - peak - std::log(norm));
  if (!grads) return loss;

  Eigen::VectorXd dz = p;
  dz(gold) -= 1.0;
  grads->weight += dz * f.transpose();
  grads->head_bias += dz;
  const Eigen::VectorXd df = head_.weight.transpose() * dz;
  Eigen::VectorXd dshared = Eigen::VectorXd::Zero(d);
  auto back = [&](std::size_t pos, const Eigen::VectorXd& v, const Eigen::VectorXd& dv) {
    const Eigen::VectorXd da = dv.array() * (1.0 - v.array().square());
    grads->embed.col(ids[pos]) += da;
    if (static_cast<Eigen::Index>(pos) + 1 < n) grads->embed.col(ids[pos + 1]) += da;
    dshared += da;
  };
  back(marked.head_start, vh, df.head(d));
  back(marked.tail_start, vt, df.tail(d));
  grads->bias += dshared;
  grads->mix += dshared * mean.transpose();
  const Eigen::VectorXd dmean = mix_.transpose() * dshared / static_cast<double>(n);
  for (int id : ids) grads->embed.col(id) += dmean;
  return loss;
}

double EntityMarkerModel::loss(std::span<const RCExample> examples) const {
  if (examples.empty()) return 0.0;
  double total = 0.0;
  for (const auto& e : examples) total += example_loss(e, nullptr);
  return total / static_cast<double>(examples.size());
}

std::vector<double> EntityMarkerModel::train(std::span<const RCExample> examples) {
  if (examples.empty()) throw BackendError("no training examples for the entity marker model");
  const std::size_t batch = std::max<std::size_t>(1, config_.batch_size);
  auto params = [&]() {
    return std::vector<std::span<double>>{flat(embed_), flat(mix_), flat(bias_),
                                          flat(head_.weight), flat(head_.bias)};
  };
  AdamW optimizer(params(), config_.learning_rate, 0.0, false);
  Rng rng(derive_seed(config_.seed, 0xe17e));
  std::vector<std::size_t> order(examples.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> history;
  for (std::size_t epoch = 0; epoch < config_.epochs; ++epoch) {
    rng.shuffle(order);
    double total = 0.0;
    for (std::size_t begin = 0; begin < order.size(); begin += batch) {
      const std::size_t end = std::min(order.size(), begin + batch);
      Grads g{Eigen::MatrixXd::Zero(embed_.rows(), embed_.cols()),
              Eigen::MatrixXd::Zero(mix_.rows(), mix_.cols()),
              Eigen::MatrixXd::Zero(head_.weight.rows(), head_.weight.cols()),
              Eigen::VectorXd::Zero(bias_.size()), Eigen::VectorXd::Zero(head_.bias.size())};
      for (std::size_t i = begin; i < end; ++i) total += example_loss(examples[order[i]], &g);
      optimizer.step(params(),
                     {flat(g.embed), flat(g.mix), flat(g.bias), flat(g.weight),
                      flat(g.head_bias)},
                     1.0 / static_cast<double>(end - begin));
    }
    const double mean = total / static_cast<double>(examples.size());
    if (!std::isfinite(mean)) {
      throw BackendError("entity marker loss diverged at epoch " + std::to_string(epoch + 1));
    }
    history.push_back(mean);
  }
  return history;
}

}  // namespace polyrc
