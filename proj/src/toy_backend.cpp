#include "polyrc/toy_backend.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "polyrc/adamw.hpp"
#include "polyrc/random.hpp"

namespace polyrc {

namespace {

constexpr char kMagic[8] = {'P', 'O', 'L', 'Y', 'R', 'C', 'T', '1'};

void fill_normal(Eigen::MatrixXd& m, Rng& rng, double mean, double stddev) {
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) m(r, c) = rng.normal(mean, stddev);
  }
}

std::span<double> flat(Eigen::MatrixXd& m) {
  return {m.data(), static_cast<std::size_t>(m.size())};
}
std::span<double> flat(Eigen::VectorXd& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

Eigen::Index argmax(const Eigen::VectorXd& v) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i) {
    if (v(i) > v(best)) best = i;
  }
  return best;
}

template <typename T>
void write_pod(std::ostream& out, const T& value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw BackendError("truncated toy checkpoint");
  return value;
}

}  // namespace

ToySeq2Seq::Parameters ToySeq2Seq::Parameters::zeros_like() const {
  Parameters z;
  z.enc_embed = Eigen::MatrixXd::Zero(enc_embed.rows(), enc_embed.cols());
  z.enc_weight = Eigen::MatrixXd::Zero(enc_weight.rows(), enc_weight.cols());
  z.enc_bias = Eigen::VectorXd::Zero(enc_bias.size());
  z.dec_context = Eigen::MatrixXd::Zero(dec_context.rows(), dec_context.cols());
  z.dec_embed = Eigen::MatrixXd::Zero(dec_embed.rows(), dec_embed.cols());
  z.dec_pos = Eigen::MatrixXd::Zero(dec_pos.rows(), dec_pos.cols());
  z.dec_bias = Eigen::VectorXd::Zero(dec_bias.size());
  z.out_weight = Eigen::MatrixXd::Zero(out_weight.rows(), out_weight.cols());
  z.out_bias = Eigen::VectorXd::Zero(out_bias.size());
  return z;
}

std::vector<std::span<double>> ToySeq2Seq::Parameters::blocks() {
  return {flat(enc_embed), flat(enc_weight), flat(enc_bias),
          flat(dec_context), flat(dec_embed), flat(dec_pos),
          flat(dec_bias),  flat(out_weight), flat(out_bias)};
}

std::size_t ToySeq2Seq::Parameters::count() const {
  return static_cast<std::size_t>(enc_embed.size() + enc_weight.size() + enc_bias.size() +
                                  dec_context.size() + dec_embed.size() + dec_pos.size() +
                                  dec_bias.size() + out_weight.size() + out_bias.size());
}

ToySeq2Seq::ToySeq2Seq(Vocabulary vocabulary, ToyModelConfig config)
    : vocab_(std::move(vocabulary)), config_(config) {
  if (config_.dim == 0 || config_.max_decode_length == 0) {
    throw BackendError("toy model needs positive dim and max_decode_length");
  }
  const auto d = static_cast<Eigen::Index>(config_.dim);
  const auto v = static_cast<Eigen::Index>(vocab_.size());
  const auto lmax = static_cast<Eigen::Index>(config_.max_decode_length);
  const double scale = 1.0 / std::sqrt(static_cast<double>(config_.dim));
  Rng rng(config_.init_seed);

  params_.enc_embed.resize(d, v + kNumSoftSlots);
  Eigen::MatrixXd base(d, v);
  fill_normal(base, rng, 0.0, 1.0);
  params_.enc_embed.leftCols(v) = base;
  // Soft-prompt columns start from the empirical distribution of the base
  // embeddings.
  const double mean = base.mean();
  const double stddev = std::sqrt((base.array() - mean).square().mean());
  Eigen::MatrixXd soft(d, kNumSoftSlots);
  fill_normal(soft, rng, mean, stddev);
  params_.enc_embed.rightCols(kNumSoftSlots) = soft;

  params_.enc_weight.resize(d, d);
  fill_normal(params_.enc_weight, rng, 0.0, scale);
  params_.enc_bias = Eigen::VectorXd::Zero(d);
  params_.dec_context.resize(d, d);
  fill_normal(params_.dec_context, rng, 0.0, scale);
  params_.dec_embed.resize(d, v);
  fill_normal(params_.dec_embed, rng, 0.0, 1.0);
  params_.dec_pos.resize(d, lmax);
  fill_normal(params_.dec_pos, rng, 0.0, 0.5);
  params_.dec_bias = Eigen::VectorXd::Zero(d);
  params_.out_weight.resize(v, d);
  fill_normal(params_.out_weight, rng, 0.0, scale);
  params_.out_bias = Eigen::VectorXd::Zero(v);
}

Eigen::VectorXd ToySeq2Seq::encode(const std::vector<int>& ids) const {
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(params_.enc_embed.rows());
  for (int id : ids) mean += params_.enc_embed.col(id);
  if (!ids.empty()) mean /= static_cast<double>(ids.size());
  return mean;
}

double ToySeq2Seq::instance_loss(const PromptInstance& instance, std::size_t max_len,
                                 Parameters* grad, std::size_t* tokens) const {
  const auto enc = encode_prompt(instance, vocab_, max_len);
  const auto target = vocab_.encode_target(instance.target);
  if (target.size() > config_.max_decode_length) {
    throw BackendError("target '" + instance.target + "' longer than the decoder's " +
                       std::to_string(config_.max_decode_length) + " positions");
  }
  const Eigen::VectorXd m = encode(enc.ids);
  const Eigen::VectorXd s = (params_.enc_weight * m + params_.enc_bias).array().tanh().matrix();
  const Eigen::VectorXd ctx = params_.dec_context * s + params_.dec_bias;

  Eigen::VectorXd ds = Eigen::VectorXd::Zero(s.size());
  double loss = 0.0;
  for (std::size_t t = 0; t < target.size(); ++t) {
    const int prev = t == 0 ? Vocabulary::kBos : target[t - 1];
    const auto ti = static_cast<Eigen::Index>(t);
    const Eigen::VectorXd h =
        (ctx + params_.dec_embed.col(prev) + params_.dec_pos.col(ti)).array().tanh().matrix();
    const Eigen::VectorXd z = params_.out_weight * h + params_.out_bias;
    const double zmax = z.maxCoeff();
    const double lse = zmax + std::log((z.array() - zmax).exp().sum());
    const int y = target[t];
    loss += lse - z(y);
    if (grad) {
      Eigen::VectorXd dz = (z.array() - lse).exp().matrix();
      dz(y) -= 1.0;
      grad->out_weight.noalias() += dz * h.transpose();
      grad->out_bias += dz;
      const Eigen::VectorXd dpre =
          (params_.out_weight.transpose() * dz).cwiseProduct((1.0 - h.array().square()).matrix());
      grad->dec_context.noalias() += dpre * s.transpose();
      grad->dec_embed.col(prev) += dpre;
      grad->dec_pos.col(ti) += dpre;
      grad->dec_bias += dpre;
      ds.noalias() += params_.dec_context.transpose() * dpre;
    }
  }
  if (grad) {
    const Eigen::VectorXd dpre_s = ds.cwiseProduct((1.0 - s.array().square()).matrix());
    grad->enc_weight.noalias() += dpre_s * m.transpose();
    grad->enc_bias += dpre_s;
    if (!enc.ids.empty()) {
      const Eigen::VectorXd dm =
          params_.enc_weight.transpose() * dpre_s / static_cast<double>(enc.ids.size());
      for (int id : enc.ids) grad->enc_embed.col(id) += dm;
    }
  }
  if (tokens) *tokens += target.size();
  return loss;
}

double ToySeq2Seq::loss(std::span<const PromptInstance> instances) const {
  if (instances.empty()) throw BackendError("loss over an empty instance set");
  double total = 0.0;
  for (const auto& inst : instances) {
    total += instance_loss(inst, max_sequence_length_, nullptr, nullptr);
  }
  return total / static_cast<double>(instances.size());
}

ToySeq2Seq::Parameters ToySeq2Seq::gradient(std::span<const PromptInstance> instances) const {
  if (instances.empty()) throw BackendError("gradient over an empty instance set");
  Parameters grad = params_.zeros_like();
  for (const auto& inst : instances) {
    instance_loss(inst, max_sequence_length_, &grad, nullptr);
  }
  const double inv = 1.0 / static_cast<double>(instances.size());
  for (auto block : grad.blocks()) {
    for (double& g : block) g *= inv;
  }
  return grad;
}

LogitMatrix ToySeq2Seq::decode_logits(const PromptInstance& instance,
                                      std::size_t max_length) const {
  if (max_length == 0 || max_length > config_.max_decode_length) {
    throw BackendError("decode length " + std::to_string(max_length) + " outside [1, " +
                       std::to_string(config_.max_decode_length) + "]");
  }
  const auto enc = encode_prompt(instance, vocab_, max_sequence_length_);
  const Eigen::VectorXd s =
      (params_.enc_weight * encode(enc.ids) + params_.enc_bias).array().tanh().matrix();
  const Eigen::VectorXd ctx = params_.dec_context * s + params_.dec_bias;
  Eigen::MatrixXd out(static_cast<Eigen::Index>(vocab_.size()),
                      static_cast<Eigen::Index>(max_length));
  Eigen::Index prev = Vocabulary::kBos;
  for (Eigen::Index t = 0; t < out.cols(); ++t) {
    const Eigen::VectorXd h =
        (ctx + params_.dec_embed.col(prev) + params_.dec_pos.col(t)).array().tanh().matrix();
    out.col(t) = params_.out_weight * h + params_.out_bias;
    prev = argmax(out.col(t));
  }
  return LogitMatrix(std::move(out), enc.truncated);
}

TrainSummary ToySeq2Seq::train(std::span<const PromptInstance> instances,
                               const TrainConfig& config) {
  config.validate();
  TrainSummary summary;
  if (config.epochs == 0) return summary;
  if (instances.empty()) throw BackendError("training needs at least one instance");
  max_sequence_length_ = config.max_sequence_length;

  AdamW optimizer(params_.blocks(), config.learning_rate, config.weight_decay,
                  config.optimizer == "adamw");
  Rng rng(config.seed);
  std::vector<std::size_t> order(instances.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::size_t step = 0;

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(order);
    double epoch_loss = 0.0;
    std::size_t epoch_tokens = 0;
    for (std::size_t begin = 0; begin < order.size(); begin += config.batch_size) {
      const std::size_t end = std::min(order.size(), begin + config.batch_size);
      Parameters grad = params_.zeros_like();
      double batch_loss = 0.0;
      for (std::size_t k = begin; k < end; ++k) {
        batch_loss += instance_loss(instances[order[k]], max_sequence_length_, &grad,
                                    &epoch_tokens);
      }
      if (!std::isfinite(batch_loss)) {
        std::ostringstream os;
        os << "non-finite loss at epoch " << epoch + 1 << ", step " << step + 1
           << " (batch of " << end - begin << ", lr " << config.learning_rate << ")";
        throw BackendError(os.str());
      }
      epoch_loss += batch_loss;
      ++step;
      optimizer.step(params_.blocks(), grad.blocks(), 1.0 / static_cast<double>(end - begin));
    }
    summary.epoch_loss.push_back(epoch_loss / static_cast<double>(instances.size()));
    summary.epoch_token_loss.push_back(epoch_loss / static_cast<double>(epoch_tokens));
  }
  summary.steps = step;
  return summary;
}

std::unique_ptr<Seq2SeqBackend> ToySeq2Seq::clone() const {
  return std::make_unique<ToySeq2Seq>(*this);
}

void ToySeq2Seq::save_blob(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw BackendError("cannot write " + path.string());
  out.write(kMagic, sizeof(kMagic));
  write_pod<std::uint64_t>(out, config_.dim);
  write_pod<std::uint64_t>(out, config_.max_decode_length);
  write_pod<std::uint64_t>(out, config_.init_seed);
  write_pod<std::uint64_t>(out, max_sequence_length_);
  write_pod<std::uint64_t>(out, vocab_.size());
  for (const auto& tok : vocab_.tokens()) {
    write_pod<std::uint64_t>(out, tok.size());
    out.write(tok.data(), static_cast<std::streamsize>(tok.size()));
  }
  auto copy = params_;
  for (auto block : copy.blocks()) {
    write_pod<std::uint64_t>(out, block.size());
    out.write(reinterpret_cast<const char*>(block.data()),
              static_cast<std::streamsize>(block.size() * sizeof(double)));
  }
  if (!out) throw BackendError("failed writing " + path.string());
}

std::unique_ptr<ToySeq2Seq> ToySeq2Seq::load_blob(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw BackendError("cannot read " + path.string());
  char magic[sizeof(kMagic)];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw BackendError(path.string() + " is not a toy checkpoint");
  }
  ToyModelConfig cfg;
  cfg.dim = read_pod<std::uint64_t>(in);
  cfg.max_decode_length = read_pod<std::uint64_t>(in);
  cfg.init_seed = read_pod<std::uint64_t>(in);
  const auto max_seq = read_pod<std::uint64_t>(in);
  const auto vocab_size = read_pod<std::uint64_t>(in);
  std::vector<std::string> tokens;
  tokens.reserve(vocab_size);
  for (std::uint64_t i = 0; i < vocab_size; ++i) {
    const auto len = read_pod<std::uint64_t>(in);
    std::string tok(len, '\0');
    in.read(tok.data(), static_cast<std::streamsize>(len));
    tokens.push_back(std::move(tok));
  }
  auto model = std::make_unique<ToySeq2Seq>(Vocabulary(std::move(tokens)), cfg);
  model->max_sequence_length_ = max_seq;
  for (auto block : model->params_.blocks()) {
    const auto n = read_pod<std::uint64_t>(in);
    if (n != block.size()) throw BackendError("toy checkpoint shape mismatch");
    in.read(reinterpret_cast<char*>(block.data()),
            static_cast<std::streamsize>(n * sizeof(double)));
    if (!in) throw BackendError("truncated toy checkpoint");
  }
  return model;
}

}  // namespace polyrc
