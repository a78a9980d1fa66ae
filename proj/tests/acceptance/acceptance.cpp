// One PASS/FAIL line per acceptance criterion; nonzero exit on any failure.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>

#include "mock_backends.hpp"
#include "oracle.hpp"
#include "polyrc/classifier.hpp"
#include "polyrc/experiment.hpp"
#include "polyrc/metrics.hpp"
#include "polyrc/prompt.hpp"
#include "polyrc/random.hpp"
#include "polyrc/synthetic.hpp"
#include "polyrc/toy_backend.hpp"

using namespace polyrc;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

LogitMatrix to_logits(const oracle::Matrix& m) {
  Eigen::MatrixXd e(static_cast<Eigen::Index>(m.size()), static_cast<Eigen::Index>(m[0].size()));
  for (std::size_t r = 0; r < m.size(); ++r) {
    for (std::size_t c = 0; c < m[r].size(); ++c) {
      e(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = m[r][c];
    }
  }
  return LogitMatrix(e);
}

// 1
void scorer_oracle(Outcome& o) {
  const auto t0 = Clock::now();
  Rng rng(20240601);
  double worst = 0.0;
  std::size_t mismatches = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t V = 5 + rng.below(46);
    const std::size_t L = 1 + rng.below(6);
    oracle::Matrix m(V, std::vector<double>(L));
    for (auto& row : m) for (auto& v : row) v = rng.normal(0.0, 4.0);
    std::map<std::string, std::vector<int>> targets;
    const std::size_t R = 2 + rng.below(9);
    for (std::size_t r = 0; r < R; ++r) {
      std::vector<int> ids(1 + rng.below(L));
      for (auto& id : ids) id = static_cast<int>(rng.below(V));
      targets["rel" + std::to_string(r)] = ids;
    }
    const auto got = score_relations(to_logits(m), targets);
    const auto ref = oracle::scores(m, targets);
    for (const auto& [rel, s] : ref) {
      worst = std::max(worst, std::abs(got.at(rel).score - s) / std::abs(s));
    }
    if (predict(got).relation != oracle::argmax(ref)) ++mismatches;
  }
  const double secs = seconds_since(t0);
  o.detail << "1000 instances, max rel err " << worst << ", argmax mismatches " << mismatches
           << ", " << secs << " s";
  o.check(worst <= 1e-9, "relative error");
  o.check(mismatches == 0, "argmax");
  o.check(secs < 10.0, "time");
}

// 2
void worked_example(Outcome& o) {
  const auto s = score_relations(to_logits({{2, 0}, {0, 2}}), {{"r1", {0, 1}}, {"r2", {0, 0}}});
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4f / %.4f", s.at("r1").score, s.at("r2").score);
  o.detail << "scores " << buf << ", prediction " << predict(s).relation;
  o.check(std::string(buf) == "0.8808 / 0.5000", "scores");
  o.check(predict(s).relation == "r1", "prediction");
}

// 3
void metrics_fixtures(Outcome& o) {
  const std::vector<std::string> langs{"ar", "de", "en", "es", "fa", "fr", "it",
                                       "ko", "nl", "pl", "pt", "ru", "sv", "uk"};
  const std::vector<double> il{94.1, 94.0, 96.0, 70.5, 73.1, 97.2, 97.0,
                               83.2, 93.5, 93.0, 85.2, 83.3, 58.7, 71.8};
  const std::vector<double> em{98.4, 95.7, 95.9, 27.9, 0.0, 82.6, 98.9,
                               64.6, 92.2, 97.4, 97.4, 96.9, 2.2, 5.1};
  std::map<std::string, double> il_row, em_row;
  for (std::size_t i = 0; i < langs.size(); ++i) {
    il_row[langs[i]] = il[i];
    em_row[langs[i]] = em[i];
  }
  const double macro = round_display(macro_average(il_row));
  const auto g = group_average(em_row);
  const double h = round_display(g.at(LanguageGroup::H));
  const double m = round_display(g.at(LanguageGroup::M));
  const double l = round_display(g.at(LanguageGroup::L));
  const double conf = micro_f1({"a", "b", "b", "c", "c", "a"}, {"a", "a", "b", "b", "c", "c"});
  const auto rs = run_stats({10.0, 20.0});
  o.detail << "IL macro " << macro << ", groups H/M/L " << h << "/" << m << "/" << l
           << ", 3-class " << conf << ", runs " << rs.mean << "±" << rs.stddev;
  o.check(macro == 85.0, "macro");
  o.check(h == 86.1 && m == 54.3 && l == 3.7, "groups");
  o.check(conf == 50.0, "confusion");
  o.check(rs.mean == 15.0 && rs.stddev == 5.0, "run stats");
}

// 4
void random_baseline(Outcome& o) {
  const double b36 = round_display(random_baseline_micro_f1(36));
  const double b8 = round_display(random_baseline_micro_f1(8));
  const double b7 = round_display(random_baseline_micro_f1(7));
  SyntheticConfig cfg;
  cfg.languages = {"en"};
  cfg.relations = 8;
  cfg.train_per_relation = 1;
  cfg.test_per_relation = 1250;
  const auto corpus = make_synthetic_corpus(cfg);
  const auto vocab =
      Vocabulary::build({&corpus.test}, corpus.verbalizers, corpus.relations, {"en"});
  const auto backend = mocks::noise_backend(vocab, 4242);
  const auto ev = evaluate_language(*backend, corpus.test, {PromptKind::CodeSwitch, WordOrder::SVO},
                                    corpus.verbalizers, F1Convention::AllClasses);
  o.detail << "closed form " << b36 << "/" << b8 << "/" << b7 << ", simulated C=8 over "
           << ev.examples << " examples: " << ev.micro_f1;
  o.check(b36 == 2.8 && b8 == 12.5 && b7 == 14.3, "closed form");
  o.check(ev.examples == 10000, "example count");
  o.check(std::abs(ev.micro_f1 - random_baseline_micro_f1(8)) <= 1.5, "simulation");
}

// 5
void template_snapshots(Outcome& o) {
  VerbalizerSet v;
  v.add(VerbalizerTable("de", {{"has-author", "hat Autor"}}));
  const auto ex = oracle::goethe();
  const auto cs = render(ex, {PromptKind::CodeSwitch, WordOrder::SVO}, v);
  const auto sp = render(ex, {PromptKind::SoftPrompt, WordOrder::SVO}, v);
  const auto il = render(ex, {PromptKind::InLanguage, WordOrder::SVO}, v);
  const auto nl = render(ex, {PromptKind::Null, WordOrder::SVO}, v);
  const auto sov = render(ex, {PromptKind::CodeSwitch, WordOrder::SOV}, v);
  const auto sp_sov = render(ex, {PromptKind::SoftPrompt, WordOrder::SOV}, v);
  int ok = 0;
  ok += cs.input_text() == "Goethe schrieb Faust. Faust ____ Goethe" && cs.target == "has author";
  ok += sp.input_text() == "Goethe schrieb Faust. [v1]Faust [v2]____ [v3]Goethe";
  ok += il.input_text() == cs.input_text() && il.target == "hat Autor";
  ok += nl.input_text() == "Goethe schrieb Faust. ____";
  ok += sov.input_text() == "Goethe schrieb Faust. Faust Goethe ____";
  ok += sp_sov.input_text() == "Goethe schrieb Faust. [v1]Faust [v3]Goethe [v2]____";
  o.detail << ok << "/6 snapshots match";
  o.check(ok == 6, "snapshots");
}

// 6
void sampler(Outcome& o) {
  SyntheticConfig cfg;
  cfg.train_per_relation = 40;
  auto corpus = make_synthetic_corpus(cfg);
  // thin out one relation so the min() matters
  std::vector<RCExample> ex;
  const std::string thin = *corpus.relations.begin();
  std::map<std::pair<std::string, std::string>, std::size_t> seen;
  for (const auto& e : corpus.train.examples()) {
    if (e.relation == thin && seen[{e.language, e.relation}] >= 5) continue;
    ++seen[{e.language, e.relation}];
    ex.push_back(e);
  }
  const Dataset train(ex, Split::Train);
  bool counts_ok = true, repeat_ok = true;
  for (std::size_t k : {8u, 16u, 32u}) {
    for (auto seed : default_seeds()) {
      for (const auto& lang : train.languages()) {
        const auto part = train.for_language(lang);
        const auto ep = sample_k_shot(part, k, seed);
        for (const auto& r : part.relation_set(lang)) {
          std::size_t n = 0;
          for (const auto& e : part.examples()) n += e.relation == r;
          counts_ok &= ep.per_relation.at(r) == std::min(k, n);
        }
        if (k == 8 && seed == 13) {
          const auto first = ep.ids();
          for (int i = 0; i < 100; ++i) repeat_ok &= sample_k_shot(part, k, seed).ids() == first;
        }
      }
    }
  }
  CorpusStore store;
  store.add(train);
  store.add(corpus.test);
  const auto vocab = Vocabulary::build({&train, &corpus.test}, corpus.verbalizers,
                                       corpus.relations, cfg.languages);
  const auto backend = mocks::gold_backend(vocab);
  auto spec = default_run_spec(Protocol::FewShot);
  spec.train_config.epochs = 0;
  const auto report = run_few_shot(spec, *backend, store, corpus.verbalizers);
  const auto j = to_json(report);
  const bool seeds_ok =
      j["provenance"]["seeds"] == nlohmann::json({13, 36, 121, 223, 319}) &&
      j["diagnostics"]["episodes"]["en"].size() == 5;
  o.detail << "per-class counts " << (counts_ok ? "ok" : "wrong") << ", 100 repeats "
           << (repeat_ok ? "identical" : "differ") << ", report seeds "
           << j["provenance"]["seeds"].dump();
  o.check(counts_ok, "counts");
  o.check(repeat_ok, "determinism");
  o.check(seeds_ok, "seeds in report");
}

// 7
void e2e_toy(Outcome& o) {
  const auto t0 = Clock::now();
  SyntheticConfig cfg;
  cfg.languages = {"en", "de", "fr"};
  cfg.relations = 5;
  cfg.train_per_relation = 32;
  cfg.test_per_relation = 20;
  const auto corpus = make_synthetic_corpus(cfg);
  const auto vocab = Vocabulary::build({&corpus.train, &corpus.test}, corpus.verbalizers,
                                       corpus.relations, cfg.languages);
  ToySeq2Seq model(vocab, {32, 16, 1});
  const PromptVariant il{PromptKind::InLanguage, WordOrder::SVO};
  const auto instances = render_all(corpus.train.examples(), il, corpus.verbalizers);
  TrainConfig tc;
  tc.learning_rate = 1e-2;
  tc.batch_size = 16;
  tc.epochs = 10;
  tc.weight_decay = 0.0;
  auto worst_f1 = [&](const Dataset& d) {
    double worst = 100.0;
    for (const auto& lang : d.languages()) {
      worst = std::min(worst, evaluate_language(model, d.for_language(lang), il,
                                                corpus.verbalizers, F1Convention::AllClasses)
                                  .micro_f1);
    }
    return worst;
  };
  std::size_t epochs = 0;
  double train_f1 = 0.0;
  while (epochs < 200) {
    tc.seed = 319 + epochs;
    model.train(instances, tc);
    epochs += tc.epochs;
    train_f1 = worst_f1(corpus.train);
    if (train_f1 >= 95.0) break;
  }
  const double test_f1 = worst_f1(corpus.test);
  const double secs = seconds_since(t0);
  o.detail << instances.size() << " train prompts, " << epochs << " epochs, min train F1 "
           << train_f1 << ", min held-out F1 " << test_f1 << ", " << secs << " s";
  o.check(train_f1 >= 95.0, "train F1");
  o.check(test_f1 >= 60.0, "held-out F1");
  o.check(secs < 300.0, "time");
}

// 8
void length_normalisation(Outcome& o) {
  // step probabilities: short target 0.6 at one step, long target 0.5 at three
  auto column = [](double p, int hot) {
    std::vector<double> probs(4, (1.0 - p) / 3.0);
    probs[static_cast<std::size_t>(hot)] = p;
    return probs;
  };
  const std::vector<std::vector<double>> cols{column(0.6, 0), column(0.5, 1), column(0.5, 1)};
  oracle::Matrix m(4, std::vector<double>(3));
  for (std::size_t t = 0; t < 3; ++t) {
    for (std::size_t v = 0; v < 4; ++v) m[v][t] = std::log(cols[t][v]);
  }
  // the long target reads token 1 at step 0 too, where it only has 0.4/3
  const std::map<std::string, std::vector<int>> targets{{"a-short", {0}}, {"b-long", {1, 1, 1}}};
  const auto s = score_relations(to_logits(m), targets);
  const double long_expected = (0.4 / 3.0 + 0.5 + 0.5) / 3.0;
  double err = 0.0;
  for (const auto& [rel, ref] : oracle::scores(m, targets)) {
    err = std::max(err, std::abs(s.at(rel).score - ref));
  }
  err = std::max(err, std::abs(s.at("a-short").score - 0.6));
  err = std::max(err, std::abs(s.at("b-long").score - long_expected));
  // unnormalised sums would rank the long target first
  const double short_sum = 0.6, long_sum = 0.4 / 3.0 + 1.0;
  const auto pred = predict(s).relation;
  o.detail << "max abs err " << err << ", normalised pick " << pred << ", unnormalised pick "
           << (long_sum > short_sum ? "b-long" : "a-short");
  o.check(err <= 1e-12, "exactness");
  o.check(pred == "a-short", "normalised argmax");
  o.check(long_sum > short_sum, "negative control discriminates");
}

// Records which languages reach train() and which targets are scored.
class AuditBackend final : public Seq2SeqBackend {
 public:
  struct Log {
    std::mutex mutex;
    std::set<std::string> train_languages;
    std::set<std::string> train_kinds;
    std::size_t eval_calls = 0;
    std::size_t non_cs_evals = 0;
  };
  AuditBackend(std::shared_ptr<Seq2SeqBackend> inner, std::shared_ptr<Log> log)
      : inner_(std::move(inner)), log_(std::move(log)) {}
  std::string name() const override { return "audit"; }
  const Vocabulary& vocabulary() const override { return inner_->vocabulary(); }
  LogitMatrix decode_logits(const PromptInstance& inst, std::size_t n) const override {
    {
      std::lock_guard lock(log_->mutex);
      ++log_->eval_calls;
      // CS: English target, no soft slots
      bool cs = inst.target == verbalize_en(inst.relation);
      for (const auto& seg : inst.input) cs &= seg.type != Segment::Type::Soft;
      if (!cs) ++log_->non_cs_evals;
    }
    return inner_->decode_logits(inst, n);
  }
  TrainSummary train(std::span<const PromptInstance> instances, const TrainConfig& c) override {
    std::lock_guard lock(log_->mutex);
    for (const auto& i : instances) log_->train_languages.insert(i.language);
    return inner_->train(instances, c);
  }
  std::unique_ptr<Seq2SeqBackend> clone() const override {
    return std::make_unique<AuditBackend>(inner_, log_);
  }
  void save_blob(const std::filesystem::path& p) const override { inner_->save_blob(p); }

 private:
  std::shared_ptr<Seq2SeqBackend> inner_;
  std::shared_ptr<Log> log_;
};

// 9
void transfer_audit(Outcome& o) {
  SyntheticConfig cfg;
  cfg.languages = {"en", "de", "fr"};
  cfg.train_per_relation = 8;
  cfg.test_per_relation = 5;
  const auto corpus = make_synthetic_corpus(cfg);
  CorpusStore store;
  store.add(corpus.train);
  store.add(corpus.test);
  const auto en_train = corpus.train.for_language("en");
  const auto vocab = Vocabulary::build({&en_train, &corpus.test}, corpus.verbalizers,
                                       corpus.relations, cfg.languages);
  auto log = std::make_shared<AuditBackend::Log>();
  AuditBackend backend(std::shared_ptr<Seq2SeqBackend>(mocks::gold_backend(vocab)), log);
  auto spec = default_run_spec(Protocol::ZeroShotTransfer);
  spec.train_config.epochs = 0;
  spec.seeds = {13, 36};
  store.clear_log();
  const auto report = run_cross_lingual_transfer(spec, backend, store, corpus.verbalizers);
  std::size_t foreign_train_reads = 0;
  for (const auto& [lang, split] : store.access_log()) {
    if (split == Split::Train && lang != "en") ++foreign_train_reads;
  }
  bool labels_ok = true;
  for (const auto& lang : cfg.languages) {
    labels_ok &= report.diagnostics["eval_variant"][lang] == "CS";
  }
  o.detail << "non-EN train reads " << foreign_train_reads << ", train languages {";
  for (const auto& l : log->train_languages) o.detail << l << (l == *log->train_languages.rbegin() ? "" : ",");
  o.detail << "}, " << log->eval_calls << " evaluations, " << log->non_cs_evals << " not CS";
  o.check(foreign_train_reads == 0, "train reads");
  o.check(log->train_languages == std::set<std::string>{"en"}, "train languages");
  o.check(log->non_cs_evals == 0 && log->eval_calls > 0, "CS only");
  o.check(labels_ok, "report labels");
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
      {"1 scorer matches reference implementation", scorer_oracle},
      {"2 worked scoring example", worked_example},
      {"3 metric fixtures", metrics_fixtures},
      {"4 random baseline", random_baseline},
      {"5 template snapshots", template_snapshots},
      {"6 k-shot sampler", sampler},
      {"7 end-to-end toy training", e2e_toy},
      {"8 length normalisation", length_normalisation},
      {"9 cross-lingual transfer audit", transfer_audit},
  };
  int failures = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      fn(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " [exception: " << e.what() << "]";
    }
    std::cout << (o.pass ? "PASS" : "FAIL") << "  " << name << " : " << o.detail.str() << '\n';
    failures += !o.pass;
  }
  std::cout << (failures ? "FAILED " : "ALL PASSED ") << criteria.size() - failures << "/"
            << criteria.size() << '\n';
  return failures ? 1 : 0;
}
