#include "polyrc/experiment.hpp"

#include <algorithm>
#include <cstdio>
#include <future>
#include <thread>

#include "polyrc/random.hpp"

namespace polyrc {

namespace {

constexpr std::uint64_t kValidationStream = 0x76616c6964ULL;

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

Episode draw(const std::vector<const RCExample*>& pool, std::size_t k, std::uint64_t seed,
             std::uint64_t stream) {
  if (pool.empty()) throw ExperimentError("cannot sample an episode from an empty dataset");
  if (k == 0) throw ExperimentError("episode size k must be positive");
  // dataset order within each (language, relation) bucket
  std::map<std::pair<std::string, std::string>, std::vector<const RCExample*>> buckets;
  std::set<std::string> langs;
  for (const auto* e : pool) {
    buckets[{e->relation, e->language}].push_back(e);
    langs.insert(e->language);
  }
  Episode ep;
  ep.k = k;
  ep.seed = seed;
  ep.language = langs.size() == 1 ? *langs.begin() : "mixed";
  std::set<std::string> underfilled;
  for (auto& [key, items] : buckets) {
    const auto& [relation, lang] = key;
    Rng rng(derive_seed(derive_seed(seed, stream), fnv1a64(lang + '\x1f' + relation)));
    std::vector<std::size_t> order(items.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    rng.shuffle(order);
    const std::size_t take = std::min(k, items.size());
    for (std::size_t i = 0; i < take; ++i) ep.examples.push_back(*items[order[i]]);
    ep.per_relation[relation] += take;
    if (take < k) underfilled.insert(relation);
  }
  ep.underfilled.assign(underfilled.begin(), underfilled.end());
  return ep;
}

std::vector<std::string> target_languages(const RunSpec& spec, const CorpusStore& data) {
  if (!spec.languages.empty()) return spec.languages;
  return data.languages(Split::Test);
}

std::vector<PromptVariant> variants_of(const RunSpec& spec, PromptKind kind) {
  std::vector<PromptVariant> out;
  for (auto order : spec.word_orders) out.push_back({kind, order});
  return out;
}

std::vector<std::string> gold_labels(const Dataset& d) {
  std::vector<std::string> out;
  for (const auto& e : d.examples()) out.push_back(e.relation);
  return out;
}

// Runs fn(language) for every language, in parallel unless threads == 1.
template <typename Fn>
std::map<std::string, LanguageEval> for_languages(const std::vector<std::string>& langs,
                                                  std::size_t threads, Fn fn) {
  std::map<std::string, LanguageEval> out;
  if (threads == 1 || langs.size() <= 1) {
    for (const auto& l : langs) out[l] = fn(l);
    return out;
  }
  const std::size_t workers =
      threads ? threads : std::max(1u, std::thread::hardware_concurrency());
  for (std::size_t begin = 0; begin < langs.size(); begin += workers) {
    std::vector<std::future<LanguageEval>> jobs;
    const std::size_t end = std::min(langs.size(), begin + workers);
    for (std::size_t i = begin; i < end; ++i) {
      jobs.push_back(std::async(std::launch::async, fn, langs[i]));
    }
    for (std::size_t i = begin; i < end; ++i) out[langs[i]] = jobs[i - begin].get();
  }
  return out;
}

TrainSummary train_with_context(Seq2SeqBackend& model, const std::vector<PromptInstance>& data,
                                const TrainConfig& config, const std::string& context) {
  try {
    return model.train(data, config);
  } catch (const std::exception& e) {
    throw ExperimentError("training failed for " + context + ": " + e.what());
  }
}

EvalReport skeleton(const RunSpec& spec, const Seq2SeqBackend& backend) {
  EvalReport report;
  auto& p = report.provenance;
  p.protocol = std::string(to_string(spec.protocol));
  p.seeds = spec.seeds;
  p.train_config = to_json(spec.train_config);
  if (spec.protocol == Protocol::FewShot) p.k = spec.k;
  p.backend = backend.name();
  p.f1_convention = std::string(to_string(spec.convention));
  p.std_kind = std::string(to_string(spec.std_kind));
  p.run_spec = to_json(spec);
  p.config_hash = hex64(fnv1a64(p.run_spec.dump()));
  return report;
}

void record_eval(nlohmann::ordered_json& diag, const std::string& row, std::uint64_t seed,
                 const LanguageEval& ev) {
  nlohmann::ordered_json e;
  e["seed"] = seed;
  e["examples"] = ev.examples;
  e["micro_f1"] = ev.micro_f1;
  e["ties"] = ev.ties;
  e["truncated"] = ev.truncated;
  diag["evaluations"][row][ev.language].push_back(e);
}

}  // namespace

std::vector<std::string> Episode::ids() const {
  std::vector<std::string> out;
  out.reserve(examples.size());
  for (const auto& e : examples) out.push_back(e.id);
  return out;
}

Dataset Episode::dataset() const { return Dataset(examples, Split::Train); }

Episode sample_k_shot(const Dataset& dataset, std::size_t k, std::uint64_t seed) {
  if (dataset.split() != Split::Train) {
    throw ExperimentError("k-shot episodes are drawn from train splits only");
  }
  std::vector<const RCExample*> pool;
  for (const auto& e : dataset.examples()) pool.push_back(&e);
  return draw(pool, k, seed, 0);
}

Episode make_validation(const Dataset& english_train, std::size_t k, std::uint64_t seed,
                        const std::set<std::string>& exclude_ids) {
  if (english_train.split() != Split::Train) {
    throw ExperimentError("validation episodes are drawn from the English train split");
  }
  std::vector<const RCExample*> pool;
  for (const auto& e : english_train.examples()) {
    if (e.language != "en") {
      throw ExperimentError("validation data must be English, found '" + e.language + "'");
    }
    if (!exclude_ids.count(e.id)) pool.push_back(&e);
  }
  return draw(pool, k, seed, kValidationStream);
}

std::string_view to_string(Protocol protocol) {
  switch (protocol) {
    case Protocol::Full: return "full";
    case Protocol::FewShot: return "fewshot";
    case Protocol::ZeroShotInContext: return "zeroshot-incontext";
    case Protocol::ZeroShotTransfer: return "zeroshot-transfer";
  }
  return "?";
}

Protocol parse_protocol(std::string_view name) {
  for (auto p : {Protocol::Full, Protocol::FewShot, Protocol::ZeroShotInContext,
                 Protocol::ZeroShotTransfer}) {
    if (to_string(p) == name) return p;
  }
  throw ExperimentError("unknown protocol '" + std::string(name) + "'");
}

void RunSpec::validate() const {
  if (seeds.empty()) throw ExperimentError("run needs at least one seed");
  if (word_orders.empty()) throw ExperimentError("run needs at least one word order");
  if (protocol == Protocol::FewShot && !allow_any_k && k != 8 && k != 16 && k != 32) {
    throw ExperimentError("few-shot k must be 8, 16 or 32 (set allow_any_k to override), got " +
                          std::to_string(k));
  }
  if (k == 0) throw ExperimentError("k must be positive");
  try {
    train_config.validate();
  } catch (const std::exception& e) {
    throw ExperimentError(std::string("train_config: ") + e.what());
  }
}

RunSpec default_run_spec(Protocol protocol) {
  RunSpec spec;
  spec.protocol = protocol;
  if (protocol == Protocol::FewShot) {
    spec.train_config.learning_rate = 3e-4;
    spec.train_config.epochs = 20;
  }
  if (protocol == Protocol::ZeroShotInContext) spec.train_config.epochs = 0;
  if (protocol == Protocol::ZeroShotInContext) spec.kind = PromptKind::CodeSwitch;
  return spec;
}

nlohmann::ordered_json to_json(const RunSpec& spec) {
  nlohmann::ordered_json j;
  j["protocol"] = std::string(to_string(spec.protocol));
  j["variant"] = std::string(to_string(spec.kind));
  auto orders = nlohmann::ordered_json::array();
  for (auto o : spec.word_orders) orders.push_back(std::string(to_string(o)));
  j["word_orders"] = orders;
  j["languages"] = spec.languages;
  j["seeds"] = spec.seeds;
  j["k"] = spec.k;
  j["allow_any_k"] = spec.allow_any_k;
  j["train_config"] = to_json(spec.train_config);
  j["f1_convention"] = std::string(to_string(spec.convention));
  j["std_kind"] = std::string(to_string(spec.std_kind));
  j["resample_validation_per_seed"] = spec.resample_validation_per_seed;
  j["decode_length"] = spec.decode_length;
  j["threads"] = spec.threads;
  return j;
}

RunSpec run_spec_from_json(const nlohmann::json& j, RunSpec base) {
  if (!j.is_object()) throw ExperimentError("run spec must be a JSON object");
  static const std::set<std::string> known{
      "protocol", "variant", "word_orders", "languages", "seeds", "k", "allow_any_k",
      "train_config", "f1_convention", "std_kind", "resample_validation_per_seed",
      "decode_length", "threads"};
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw ExperimentError("unknown run spec key '" + key + "'");
  }
  try {
    if (j.contains("protocol")) base.protocol = parse_protocol(j["protocol"].get<std::string>());
    if (j.contains("variant")) base.kind = parse_prompt_kind(j["variant"].get<std::string>());
    if (j.contains("word_orders")) {
      base.word_orders.clear();
      for (const auto& o : j["word_orders"]) {
        base.word_orders.push_back(parse_word_order(o.get<std::string>()));
      }
    }
    if (j.contains("languages")) base.languages = j["languages"].get<std::vector<std::string>>();
    if (j.contains("seeds")) base.seeds = j["seeds"].get<std::vector<std::uint64_t>>();
    if (j.contains("k")) base.k = j["k"].get<std::size_t>();
    if (j.contains("allow_any_k")) base.allow_any_k = j["allow_any_k"].get<bool>();
    if (j.contains("train_config")) {
      base.train_config = train_config_from_json(j["train_config"], base.train_config);
    }
    if (j.contains("f1_convention")) {
      base.convention = parse_f1_convention(j["f1_convention"].get<std::string>());
    }
    if (j.contains("std_kind")) base.std_kind = parse_std_kind(j["std_kind"].get<std::string>());
    if (j.contains("resample_validation_per_seed")) {
      base.resample_validation_per_seed = j["resample_validation_per_seed"].get<bool>();
    }
    if (j.contains("decode_length")) base.decode_length = j["decode_length"].get<std::size_t>();
    if (j.contains("threads")) base.threads = j["threads"].get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw ExperimentError(std::string("run spec: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ExperimentError(std::string("run spec: ") + e.what());
  }
  return base;
}

void CorpusStore::add(const Dataset& dataset) {
  for (const auto& lang : dataset.languages()) {
    const Key key{lang, dataset.split()};
    if (data_.count(key)) {
      throw ExperimentError("duplicate " + std::string(to_string(dataset.split())) +
                            " split for language '" + lang + "'");
    }
    data_.emplace(key, dataset.for_language(lang));
  }
}

bool CorpusStore::has(const std::string& language, Split split) const {
  return data_.count({language, split}) > 0;
}

const Dataset& CorpusStore::get(const std::string& language, Split split) const {
  {
    std::lock_guard lock(mutex_);
    log_.emplace_back(language, split);
  }
  const auto it = data_.find({language, split});
  if (it == data_.end()) {
    throw ExperimentError("no " + std::string(to_string(split)) + " split for language '" +
                          language + "'");
  }
  return it->second;
}

std::vector<std::string> CorpusStore::languages(Split split) const {
  std::vector<std::string> out;
  for (const auto& [key, d] : data_) {
    if (key.second == split) out.push_back(key.first);
  }
  return out;
}

std::vector<CorpusStore::Key> CorpusStore::access_log() const {
  std::lock_guard lock(mutex_);
  return log_;
}

void CorpusStore::clear_log() const {
  std::lock_guard lock(mutex_);
  log_.clear();
}

std::vector<PromptInstance> render_all(const std::vector<RCExample>& examples,
                                       PromptVariant variant, const VerbalizerSet& verbalizers) {
  std::vector<PromptInstance> out;
  out.reserve(examples.size());
  for (const auto& e : examples) out.push_back(render(e, variant, verbalizers));
  return out;
}

LanguageEval evaluate_language(const Seq2SeqBackend& backend, const Dataset& test,
                               PromptVariant variant, const VerbalizerSet& verbalizers,
                               F1Convention convention, std::size_t decode_length) {
  LanguageEval ev;
  const auto langs = test.languages();
  if (langs.size() != 1) throw ExperimentError("evaluation expects a single-language test set");
  ev.language = langs.front();
  ev.examples = test.size();
  const auto targets =
      target_token_ids(test.relation_set(ev.language), target_language(variant.kind, ev.language),
                       verbalizers, backend.vocabulary());
  std::size_t length = decode_length;
  if (length == 0) {
    for (const auto& [r, ids] : targets) length = std::max(length, ids.size());
  }
  for (const auto& e : test.examples()) {
    const auto logits = backend.decode_logits(render(e, variant, verbalizers), length);
    const auto table = score_relations(logits, targets);
    const auto pred = predict(table);
    if (pred.tie) ++ev.ties;
    if (logits.truncated()) ++ev.truncated;
    ev.predictions.push_back(pred.relation);
  }
  ev.micro_f1 = micro_f1(ev.predictions, gold_labels(test), convention);
  return ev;
}

EvalReport run_fully_supervised(const RunSpec& spec, const Seq2SeqBackend& backend,
                                const CorpusStore& data, const VerbalizerSet& verbalizers) {
  spec.validate();
  auto report = skeleton(spec, backend);
  const auto langs = target_languages(spec, data);
  for (const auto& variant : variants_of(spec, spec.kind)) {
    std::map<std::string, std::vector<double>> scores;
    for (auto seed : spec.seeds) {
      auto config = spec.train_config;
      config.seed = seed;
      // training is serialised, evaluation fans out
      std::map<std::string, std::unique_ptr<Seq2SeqBackend>> models;
      for (const auto& lang : langs) {
        auto model = backend.clone();
        const auto train = render_all(data.get(lang, Split::Train).examples(), variant,
                                      verbalizers);
        train_with_context(*model, train, config,
                           "language '" + lang + "', seed " + std::to_string(seed));
        models[lang] = std::move(model);
      }
      const auto evals = for_languages(langs, spec.threads, [&](const std::string& lang) {
        return evaluate_language(*models.at(lang), data.get(lang, Split::Test), variant,
                                 verbalizers, spec.convention, spec.decode_length);
      });
      for (const auto& [lang, ev] : evals) {
        scores[lang].push_back(ev.micro_f1);
        record_eval(report.diagnostics, variant.label(), seed, ev);
      }
    }
    report.rows.push_back(make_row(variant.label(), std::string(to_string(variant.kind)),
                                   std::string(to_string(variant.order)), scores,
                                   spec.std_kind));
  }
  return report;
}

EvalReport run_few_shot(const RunSpec& spec, const Seq2SeqBackend& backend,
                        const CorpusStore& data, const VerbalizerSet& verbalizers) {
  spec.validate();
  auto report = skeleton(spec, backend);
  const auto langs = target_languages(spec, data);
  const bool validate_en = data.has("en", Split::Train);
  for (const auto& variant : variants_of(spec, spec.kind)) {
    std::map<std::string, std::vector<double>> scores;
    std::optional<Episode> shared_validation;
    for (auto seed : spec.seeds) {
      auto config = spec.train_config;
      config.seed = seed;
      std::map<std::string, std::unique_ptr<Seq2SeqBackend>> models;
      std::map<std::string, Episode> episodes;
      for (const auto& lang : langs) {
        auto episode = sample_k_shot(data.get(lang, Split::Train), spec.k, seed);
        nlohmann::ordered_json ed;
        ed["seed"] = seed;
        ed["size"] = episode.examples.size();
        ed["underfilled"] = episode.underfilled;
        report.diagnostics["episodes"][lang].push_back(ed);
        auto model = backend.clone();
        train_with_context(*model, render_all(episode.examples, variant, verbalizers), config,
                           "language '" + lang + "', seed " + std::to_string(seed));
        models[lang] = std::move(model);
        episodes.emplace(lang, std::move(episode));
      }
      if (validate_en && models.count("en")) {
        const auto& en_train = data.get("en", Split::Train);
        const auto en_ids = episodes.at("en").ids();
        const std::set<std::string> exclude(en_ids.begin(), en_ids.end());
        Episode validation;
        if (spec.resample_validation_per_seed || !shared_validation) {
          validation = make_validation(en_train, spec.k, seed, exclude);
          if (!spec.resample_validation_per_seed) shared_validation = validation;
        } else {
          validation = *shared_validation;
        }
        std::size_t overlap = 0;
        for (const auto& id : validation.ids()) overlap += exclude.count(id);
        const auto ev = evaluate_language(*models.at("en"), validation.dataset(), variant,
                                          verbalizers, spec.convention, spec.decode_length);
        nlohmann::ordered_json vd;
        vd["seed"] = seed;
        vd["size"] = validation.examples.size();
        vd["overlap_with_train"] = overlap;
        vd["micro_f1"] = ev.micro_f1;
        report.diagnostics["validation"][variant.label()].push_back(vd);
      }
      const auto evals = for_languages(langs, spec.threads, [&](const std::string& lang) {
        return evaluate_language(*models.at(lang), data.get(lang, Split::Test), variant,
                                 verbalizers, spec.convention, spec.decode_length);
      });
      for (const auto& [lang, ev] : evals) {
        scores[lang].push_back(ev.micro_f1);
        record_eval(report.diagnostics, variant.label(), seed, ev);
      }
    }
    report.rows.push_back(make_row(variant.label(), std::string(to_string(variant.kind)),
                                   std::string(to_string(variant.order)), scores,
                                   spec.std_kind));
  }
  return report;
}

EvalReport run_zero_shot_incontext(const RunSpec& spec, const Seq2SeqBackend& backend,
                                   const CorpusStore& data, const VerbalizerSet& verbalizers) {
  spec.validate();
  auto report = skeleton(spec, backend);
  const auto langs = target_languages(spec, data);
  for (const auto& variant : variants_of(spec, spec.kind)) {
    // nothing is trained, so a single pass stands for every seed
    const auto evals = for_languages(langs, spec.threads, [&](const std::string& lang) {
      return evaluate_language(backend, data.get(lang, Split::Test), variant, verbalizers,
                               spec.convention, spec.decode_length);
    });
    std::map<std::string, std::vector<double>> scores;
    for (const auto& [lang, ev] : evals) {
      scores[lang].push_back(ev.micro_f1);
      record_eval(report.diagnostics, variant.label(), spec.seeds.front(), ev);
    }
    report.rows.push_back(make_row(variant.label(), std::string(to_string(variant.kind)),
                                   std::string(to_string(variant.order)), scores,
                                   spec.std_kind));
  }
  return report;
}

EvalReport run_cross_lingual_transfer(const RunSpec& spec, const Seq2SeqBackend& backend,
                                      const CorpusStore& data,
                                      const VerbalizerSet& verbalizers) {
  spec.validate();
  auto report = skeleton(spec, backend);
  const auto langs = target_languages(spec, data);
  const auto& en_train = data.get("en", Split::Train);
  for (auto order : spec.word_orders) {
    const PromptVariant train_variant{PromptKind::InLanguage, order};
    const PromptVariant eval_variant{PromptKind::CodeSwitch, order};
    const auto train = render_all(en_train.examples(), train_variant, verbalizers);
    std::map<std::string, std::vector<double>> scores;
    for (auto seed : spec.seeds) {
      auto config = spec.train_config;
      config.seed = seed;
      auto model = backend.clone();
      train_with_context(*model, train, config, "English, seed " + std::to_string(seed));
      const auto evals = for_languages(langs, spec.threads, [&](const std::string& lang) {
        return evaluate_language(*model, data.get(lang, Split::Test), eval_variant, verbalizers,
                                 spec.convention, spec.decode_length);
      });
      for (const auto& [lang, ev] : evals) {
        scores[lang].push_back(ev.micro_f1);
        record_eval(report.diagnostics, eval_variant.label(), seed, ev);
        report.diagnostics["eval_variant"][lang] = eval_variant.label();
      }
    }
    report.diagnostics["train_variant"] = train_variant.label();
    report.rows.push_back(make_row("EN-IL→" + eval_variant.label(),
                                   std::string(to_string(eval_variant.kind)),
                                   std::string(to_string(order)), scores, spec.std_kind));
  }
  return report;
}

EvalReport run_protocol(const RunSpec& spec, const Seq2SeqBackend& backend,
                        const CorpusStore& data, const VerbalizerSet& verbalizers) {
  switch (spec.protocol) {
    case Protocol::Full: return run_fully_supervised(spec, backend, data, verbalizers);
    case Protocol::FewShot: return run_few_shot(spec, backend, data, verbalizers);
    case Protocol::ZeroShotInContext:
      return run_zero_shot_incontext(spec, backend, data, verbalizers);
    case Protocol::ZeroShotTransfer:
      return run_cross_lingual_transfer(spec, backend, data, verbalizers);
  }
  throw ExperimentError("unhandled protocol");
}

}  // namespace polyrc
