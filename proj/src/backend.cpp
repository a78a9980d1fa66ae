#include "polyrc/backend.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "polyrc/table_backend.hpp"
#include "polyrc/toy_backend.hpp"

namespace polyrc {

namespace {

const std::vector<std::string>& reserved_tokens() {
  static const std::vector<std::string> tokens = {
      "<pad>", "<unk>", "<s>", "<blank>", "<e1>", "</e1>", "<e2>", "</e2>"};
  return tokens;
}

bool is_trailing_punct(char c) {
  return c == '.' || c == ',' || c == '!' || c == '?' || c == ';' || c == ':';
}

}  // namespace

Vocabulary::Vocabulary() : Vocabulary(reserved_tokens()) {}

Vocabulary::Vocabulary(std::vector<std::string> tokens) {
  const auto& reserved = reserved_tokens();
  if (tokens.size() < reserved.size() ||
      !std::equal(reserved.begin(), reserved.end(), tokens.begin())) {
    throw BackendError("vocabulary must start with the reserved tokens");
  }
  for (const auto& t : tokens) add(t);
}

int Vocabulary::add(const std::string& token) {
  const auto it = index_.find(token);
  if (it != index_.end()) return it->second;
  const int id = static_cast<int>(tokens_.size());
  tokens_.push_back(token);
  index_.emplace(token, id);
  return id;
}

std::optional<int> Vocabulary::find(std::string_view token) const {
  const auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

int Vocabulary::id(std::string_view token) const { return find(token).value_or(kUnk); }

const std::string& Vocabulary::token(int id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= tokens_.size()) {
    throw BackendError("token id " + std::to_string(id) + " outside vocabulary");
  }
  return tokens_[static_cast<std::size_t>(id)];
}

std::vector<std::string> Vocabulary::tokenize(std::string_view text) const {
  return split_whitespace(text);
}

std::vector<std::string> Vocabulary::input_words(std::string_view text) {
  std::vector<std::string> out;
  for (auto word : split_whitespace(text)) {
    std::vector<std::string> peeled;
    while (word.size() > 1 && is_trailing_punct(word.back())) {
      peeled.emplace_back(1, word.back());
      word.pop_back();
    }
    out.push_back(std::move(word));
    out.insert(out.end(), peeled.rbegin(), peeled.rend());
  }
  return out;
}

std::vector<int> Vocabulary::encode_target(std::string_view text) const {
  std::vector<int> ids;
  for (const auto& w : tokenize(text)) {
    const auto id = find(w);
    if (!id) {
      throw BackendError("target word '" + w + "' of '" + std::string(text) +
                         "' is not in the vocabulary");
    }
    ids.push_back(*id);
  }
  if (ids.empty()) throw BackendError("empty target sequence");
  return ids;
}

std::string Vocabulary::decode(std::span<const int> ids) const {
  std::vector<std::string> words;
  for (int id : ids) words.push_back(token(id));
  return join(words, " ");
}

Vocabulary Vocabulary::build(const std::vector<const Dataset*>& datasets,
                             const VerbalizerSet& verbalizers,
                             const std::set<std::string>& relations,
                             const std::vector<std::string>& languages) {
  std::set<std::string> words;
  for (const auto* ds : datasets) {
    if (!ds) continue;
    for (const auto& ex : ds->examples()) {
      for (auto& w : input_words(ex.text)) words.insert(std::move(w));
    }
  }
  for (const auto& lang : languages) {
    for (const auto& r : relations) {
      for (auto& w : split_whitespace(verbalizers.verbalize(r, lang))) {
        words.insert(std::move(w));
      }
    }
  }
  Vocabulary vocab;
  for (const auto& w : words) vocab.add(w);
  return vocab;
}

EncodedInput encode_prompt(const PromptInstance& instance, const Vocabulary& vocabulary,
                           std::size_t max_length) {
  if (max_length == 0) throw BackendError("max sequence length must be positive");
  std::vector<int> body;
  std::vector<int> suffix;
  for (std::size_t i = 0; i < instance.input.size(); ++i) {
    const auto& seg = instance.input[i];
    const bool in_body = i == 0 || (i == 1 && seg.type == Segment::Type::Text && !seg.space_before);
    auto& dst = in_body ? body : suffix;
    switch (seg.type) {
      case Segment::Type::Text:
        for (const auto& w : Vocabulary::input_words(seg.text)) dst.push_back(vocabulary.id(w));
        break;
      case Segment::Type::Soft:
        if (seg.soft_slot < 1 || seg.soft_slot > kNumSoftSlots) {
          throw BackendError("soft slot out of range");
        }
        dst.push_back(static_cast<int>(vocabulary.size()) + seg.soft_slot - 1);
        break;
      case Segment::Type::Blank:
        dst.push_back(Vocabulary::kBlank);
        break;
    }
  }
  EncodedInput out;
  if (body.size() + suffix.size() <= max_length) {
    out.ids = std::move(body);
    out.ids.insert(out.ids.end(), suffix.begin(), suffix.end());
    return out;
  }
  out.truncated = true;
  if (suffix.size() >= max_length) {
    out.ids.assign(suffix.end() - static_cast<std::ptrdiff_t>(max_length), suffix.end());
    return out;
  }
  body.resize(max_length - suffix.size());
  out.ids = std::move(body);
  out.ids.insert(out.ids.end(), suffix.begin(), suffix.end());
  return out;
}

LogitMatrix::LogitMatrix(Eigen::MatrixXd values, bool truncated)
    : values_(std::move(values)), truncated_(truncated) {
  if (!values_.allFinite()) throw BackendError("logit matrix has non-finite entries");
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw std::invalid_argument("learning_rate must be positive");
  }
  if (batch_size == 0) throw std::invalid_argument("batch_size must be positive");
  if (max_sequence_length == 0) {
    throw std::invalid_argument("max_sequence_length must be positive");
  }
  if (weight_decay < 0.0) throw std::invalid_argument("weight_decay must be >= 0");
  if (optimizer != "adamw" && optimizer != "adam") {
    throw std::invalid_argument("optimizer must be 'adamw' or 'adam'");
  }
}

nlohmann::json to_json(const TrainConfig& c) {
  return {{"learning_rate", c.learning_rate}, {"batch_size", c.batch_size},
          {"epochs", c.epochs},               {"max_sequence_length", c.max_sequence_length},
          {"optimizer", c.optimizer},         {"weight_decay", c.weight_decay},
          {"seed", c.seed}};
}

TrainConfig train_config_from_json(const nlohmann::json& j, TrainConfig c) {
  if (!j.is_object()) throw std::invalid_argument("train config must be an object");
  for (const auto& [key, value] : j.items()) {
    if (key == "learning_rate") c.learning_rate = value.get<double>();
    else if (key == "batch_size") c.batch_size = value.get<std::size_t>();
    else if (key == "epochs") c.epochs = value.get<std::size_t>();
    else if (key == "max_sequence_length") c.max_sequence_length = value.get<std::size_t>();
    else if (key == "optimizer") c.optimizer = value.get<std::string>();
    else if (key == "weight_decay") c.weight_decay = value.get<double>();
    else if (key == "seed") c.seed = value.get<std::uint64_t>();
    else throw std::invalid_argument("unknown train config key '" + key + "'");
  }
  c.validate();
  return c;
}

std::filesystem::path checkpoint_sidecar(const std::filesystem::path& path) {
  auto p = path;
  p += ".json";
  return p;
}

void save_checkpoint(const Seq2SeqBackend& backend, const std::filesystem::path& path,
                     const TrainConfig& config) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  backend.save_blob(path);
  nlohmann::json side = {{"backend", backend.name()},
                         {"train_config", to_json(config)},
                         {"seed", config.seed},
                         {"vocabulary_size", backend.vocabulary().size()}};
  std::ofstream out(checkpoint_sidecar(path));
  if (!out) throw BackendError("cannot write checkpoint sidecar for " + path.string());
  out << side.dump(2) << '\n';
}

std::unique_ptr<Seq2SeqBackend> load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(checkpoint_sidecar(path));
  if (!in) throw BackendError("missing checkpoint sidecar " + checkpoint_sidecar(path).string());
  const auto side = nlohmann::json::parse(in);
  const auto name = side.at("backend").get<std::string>();
  if (name == "toy") {
    auto model = ToySeq2Seq::load_blob(path);
    model->set_max_sequence_length(
        side.at("train_config").value("max_sequence_length", std::size_t{256}));
    return model;
  }
  if (name == "table") return TableBackend::load_blob(path);
  throw BackendError("unknown backend '" + name + "' in checkpoint");
}

}  // namespace polyrc
