#include "polyrc/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "polyrc/backend.hpp"
#include "polyrc/classifier.hpp"
#include "polyrc/corpus.hpp"
#include "polyrc/experiment.hpp"
#include "polyrc/metrics.hpp"
#include "polyrc/prompt.hpp"
#include "polyrc/random.hpp"
#include "polyrc/report.hpp"
#include "polyrc/synthetic.hpp"
#include "polyrc/table_backend.hpp"
#include "polyrc/toy_backend.hpp"
#include "polyrc/verbalizer.hpp"

namespace polyrc {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

void reject_unknown(const nlohmann::json& j, const std::set<std::string>& known,
                    const std::string& where) {
  if (!j.is_object()) throw ValidationFailure(where + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw ValidationFailure("unknown key '" + key + "' in " + where);
  }
}

nlohmann::json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationFailure("cannot read " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationFailure(path.string() + ": " + e.what());
  }
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

Span parse_span(const std::string& s) {
  const auto parts = split(s, ',');
  if (parts.size() != 2) throw ValidationFailure("span must be 'start,end', got '" + s + "'");
  try {
    return {std::stoul(parts[0]), std::stoul(parts[1])};
  } catch (const std::exception&) {
    throw ValidationFailure("span must be 'start,end', got '" + s + "'");
  }
}

// --- data / backend plumbing ------------------------------------------------

struct DataConfig {
  std::vector<std::string> train;
  std::vector<std::string> test;
  std::string format = "jsonl";
  std::string mapping;
  std::vector<std::string> extra_languages;
};

struct BackendConfig {
  std::string name = "toy";
  ToyModelConfig toy;
  std::string checkpoint;
};

struct CliConfig {
  RunSpec spec;
  DataConfig data;
  BackendConfig backend;
  std::string verbalizers;
  std::string output_dir = "polyrc-out";
};

ojson to_json(const CliConfig& c) {
  ojson j;
  j["run"] = to_json(c.spec);
  j["data"] = {{"train", c.data.train},
               {"test", c.data.test},
               {"format", c.data.format},
               {"mapping", c.data.mapping},
               {"extra_languages", c.data.extra_languages}};
  j["backend"] = {{"name", c.backend.name},
                  {"dim", c.backend.toy.dim},
                  {"max_decode_length", c.backend.toy.max_decode_length},
                  {"init_seed", c.backend.toy.init_seed},
                  {"checkpoint", c.backend.checkpoint}};
  j["verbalizers"] = c.verbalizers;
  j["output_dir"] = c.output_dir;
  return j;
}

void apply_config_file(const nlohmann::json& j, CliConfig& c) {
  reject_unknown(j, {"run", "data", "backend", "verbalizers", "output_dir"}, "config");
  if (j.contains("run")) {
    try {
      c.spec = run_spec_from_json(j["run"], c.spec);
    } catch (const ExperimentError& e) {
      throw ValidationFailure(e.what());
    } catch (const BackendError& e) {
      throw ValidationFailure(e.what());
    }
  }
  try {
    if (j.contains("data")) {
      const auto& d = j["data"];
      reject_unknown(d, {"train", "test", "format", "mapping", "extra_languages"}, "data");
      if (d.contains("train")) c.data.train = d["train"].get<std::vector<std::string>>();
      if (d.contains("test")) c.data.test = d["test"].get<std::vector<std::string>>();
      if (d.contains("format")) c.data.format = d["format"].get<std::string>();
      if (d.contains("mapping")) c.data.mapping = d["mapping"].get<std::string>();
      if (d.contains("extra_languages")) {
        c.data.extra_languages = d["extra_languages"].get<std::vector<std::string>>();
      }
    }
    if (j.contains("backend")) {
      const auto& b = j["backend"];
      reject_unknown(b, {"name", "dim", "max_decode_length", "init_seed", "checkpoint"},
                     "backend");
      if (b.contains("name")) c.backend.name = b["name"].get<std::string>();
      if (b.contains("dim")) c.backend.toy.dim = b["dim"].get<std::size_t>();
      if (b.contains("max_decode_length")) {
        c.backend.toy.max_decode_length = b["max_decode_length"].get<std::size_t>();
      }
      if (b.contains("init_seed")) c.backend.toy.init_seed = b["init_seed"].get<std::uint64_t>();
      if (b.contains("checkpoint")) c.backend.checkpoint = b["checkpoint"].get<std::string>();
    }
    if (j.contains("verbalizers")) c.verbalizers = j["verbalizers"].get<std::string>();
    if (j.contains("output_dir")) c.output_dir = j["output_dir"].get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationFailure(std::string("config: ") + e.what());
  }
}

LoadOptions load_options(const DataConfig& d, Split split) {
  LoadOptions opt;
  opt.split = split;
  opt.extra_languages.insert(d.extra_languages.begin(), d.extra_languages.end());
  if (!d.mapping.empty()) opt.mapping = TsvMapping::load(d.mapping);
  return opt;
}

std::vector<Dataset> load_all(const std::vector<std::string>& paths, const DataConfig& d,
                              Split split) {
  std::vector<Dataset> out;
  const auto format = parse_corpus_format(d.format);
  for (const auto& p : paths) out.push_back(load_corpus(p, format, load_options(d, split)));
  return out;
}

VerbalizerSet load_verbalizers(const std::string& dir) {
  return dir.empty() ? VerbalizerSet() : VerbalizerSet::load_directory(dir);
}

std::unique_ptr<Seq2SeqBackend> make_backend(const BackendConfig& b,
                                             const std::vector<const Dataset*>& vocab_sources,
                                             const VerbalizerSet& verbalizers) {
  if (!b.checkpoint.empty()) return load_checkpoint(b.checkpoint);
  if (b.name != "toy") {
    throw ValidationFailure("backend '" + b.name + "' needs a checkpoint; only 'toy' can start fresh");
  }
  std::set<std::string> relations;
  std::set<std::string> langs;
  for (const auto* d : vocab_sources) {
    for (const auto& l : d->languages()) {
      langs.insert(l);
      const auto& rs = d->relation_set(l);
      relations.insert(rs.begin(), rs.end());
    }
  }
  auto vocab = Vocabulary::build(vocab_sources, verbalizers, relations, {"en"});
  // partial tables still contribute their words
  for (const auto& l : langs) {
    if (const auto* table = verbalizers.find(l)) {
      for (const auto& [r, v] : table->entries()) {
        for (const auto& w : split_whitespace(v)) vocab.add(w);
      }
    }
  }
  return std::make_unique<ToySeq2Seq>(std::move(vocab), b.toy);
}

// --- subcommands --------------------------------------------------------------

int cmd_ingest(const fs::path& input, const std::string& format, const std::string& mapping,
               const std::string& split, const std::vector<std::string>& extra,
               const fs::path& output, bool json, std::ostream& out, std::ostream& err) {
  DataConfig d;
  d.format = format;
  d.mapping = mapping;
  d.extra_languages = extra;
  Dataset data;
  try {
    data = load_corpus(input, parse_corpus_format(format), load_options(d, parse_split(split)));
  } catch (const CorpusError& e) {
    err << "ingest: " << e.what() << '\n';
    for (const auto& row : e.rows()) err << "  row " << row.row_id << ": " << row.message << '\n';
    return kExitValidation;
  }
  write_text(output, to_canonical_jsonl(data));
  ojson summary;
  summary["output"] = output.string();
  summary["split"] = std::string(to_string(data.split()));
  summary["examples"] = data.size();
  summary["languages"] = ojson::object();
  for (const auto& l : data.languages()) {
    summary["languages"][l] = {{"examples", data.for_language(l).size()},
                               {"relations", data.relation_set(l).size()}};
  }
  if (json) {
    out << summary.dump(2) << '\n';
  } else {
    out << "wrote " << data.size() << " examples to " << output.string() << '\n';
    for (const auto& [l, v] : summary["languages"].items()) {
      out << "  " << l << ": " << v["examples"] << " examples, " << v["relations"]
          << " relations\n";
    }
  }
  return kExitOk;
}

int cmd_stats(const CliConfig& c, bool json, std::ostream& out, std::ostream& err) {
  Dataset train;
  std::optional<Dataset> test;
  if (!c.data.train.empty()) {
    std::vector<RCExample> all;
    for (const auto& d : load_all(c.data.train, c.data, Split::Train)) {
      all.insert(all.end(), d.examples().begin(), d.examples().end());
    }
    train = Dataset(std::move(all), Split::Train);
  }
  if (!c.data.test.empty()) {
    std::vector<RCExample> all;
    for (const auto& d : load_all(c.data.test, c.data, Split::Test)) {
      all.insert(all.end(), d.examples().begin(), d.examples().end());
    }
    test = Dataset(std::move(all), Split::Test);
  }
  const auto profiles = language_stats(train, test ? &*test : nullptr);
  std::map<std::string, const ReferenceProfile*> reference;
  for (const auto& r : smiler_reference_profiles()) reference[r.language] = &r;

  std::vector<std::string> warnings;
  VerbalizerSet verbalizers;
  try {
    verbalizers = load_verbalizers(c.verbalizers);
  } catch (const VerbalizerError& e) {
    warnings.push_back(e.what());
  }
  WhitespaceTokenizer tok;
  ojson lengths = ojson::object();
  for (const auto& p : profiles) {
    const auto& rels = train.relation_set(p.language);
    if (p.language == "en") {
      const auto s = length_stats(english_table(rels, verbalizers.abbreviations()), tok);
      lengths["en"] = {{"count", s.count}, {"mean", s.mean}, {"std", s.stddev}};
      continue;
    }
    const auto* table = verbalizers.find(p.language);
    if (!table) {
      warnings.push_back("no verbalizer table for '" + p.language + "'");
      continue;
    }
    const auto missing = table->missing(rels);
    if (!missing.empty()) {
      warnings.push_back("verbalizer table '" + p.language + "' lacks " +
                         std::to_string(missing.size()) + " relation(s), e.g. '" +
                         missing.front() + "'");
    }
    const auto s = length_stats(*table, tok);
    lengths[p.language] = {{"count", s.count}, {"mean", s.mean}, {"std", s.stddev}};
  }

  ojson j;
  j["languages"] = ojson::array();
  for (const auto& p : profiles) {
    ojson row;
    row["language"] = p.language;
    row["group"] = p.group ? ojson(std::string(to_string(*p.group))) : ojson(nullptr);
    row["classes"] = p.num_classes;
    row["train"] = p.num_train;
    row["test"] = test ? test->for_language(p.language).size() : 0;
    row["max_length"] = p.max_text_length;
    if (const auto it = reference.find(p.language); it != reference.end()) {
      row["reference"] = {{"classes", it->second->num_classes},
                          {"train_thousands", it->second->num_train_thousands},
                          {"test", it->second->num_test},
                          {"max_length", it->second->max_text_length}};
    }
    j["languages"].push_back(row);
  }
  j["verbalization_lengths"] = lengths;
  j["warnings"] = warnings;

  for (const auto& w : warnings) err << "warning: " << w << '\n';
  if (json) {
    out << j.dump(2) << '\n';
    return kExitOk;
  }
  out << "| lang | group | #class | #train | #test | max len | ref #class | ref #train(K) |\n"
      << "|---|---|---|---|---|---|---|---|\n";
  for (const auto& row : j["languages"]) {
    out << "| " << row["language"].get<std::string>() << " | "
        << (row["group"].is_null() ? "-" : row["group"].get<std::string>()) << " | "
        << row["classes"] << " | " << row["train"] << " | " << row["test"] << " | "
        << row["max_length"] << " | ";
    if (row.contains("reference")) {
      out << row["reference"]["classes"] << " | "
          << format_fixed(row["reference"]["train_thousands"].get<double>()) << " |\n";
    } else {
      out << "- | - |\n";
    }
  }
  if (!lengths.empty()) {
    out << "\n| lang | verbalizations | mean tokens | std |\n|---|---|---|---|\n";
    for (const auto& [l, s] : lengths.items()) {
      out << "| " << l << " | " << s["count"] << " | " << format_fixed(s["mean"].get<double>(), 2)
          << " | " << format_fixed(s["std"].get<double>(), 2) << " |\n";
    }
  }
  return kExitOk;
}

int cmd_run(const CliConfig& c, bool json, std::ostream& out, std::ostream& err) {
  try {
    c.spec.validate();
  } catch (const ExperimentError& e) {
    throw ValidationFailure(e.what());
  }
  if (c.data.test.empty()) throw ValidationFailure("run needs at least one --test file");
  const auto verbalizers = load_verbalizers(c.verbalizers);
  auto trains = load_all(c.data.train, c.data, Split::Train);
  auto tests = load_all(c.data.test, c.data, Split::Test);
  CorpusStore store;
  for (const auto& d : trains) store.add(d);
  for (const auto& d : tests) store.add(d);

  // transfer never sees non-English training text, not even in its vocabulary
  const bool transfer = c.spec.protocol == Protocol::ZeroShotTransfer;
  std::vector<Dataset> vocab_train;
  for (const auto& d : trains) {
    if (!transfer) {
      vocab_train.push_back(d);
      continue;
    }
    const auto langs = d.languages();
    if (std::find(langs.begin(), langs.end(), "en") != langs.end()) {
      vocab_train.push_back(d.for_language("en"));
    }
  }
  std::vector<const Dataset*> sources;
  for (const auto& d : vocab_train) sources.push_back(&d);
  for (const auto& d : tests) sources.push_back(&d);
  for (const auto& lang : c.spec.languages.empty() ? store.languages(Split::Test)
                                                   : c.spec.languages) {
    const auto& rels = store.get(lang, Split::Test).relation_set(lang);
    if (c.spec.kind == PromptKind::InLanguage || transfer) {
      verbalizers.check_total(rels, transfer ? "en" : lang);
    }
  }
  store.clear_log();
  const auto backend = make_backend(c.backend, sources, verbalizers);
  auto report = run_protocol(c.spec, *backend, store, verbalizers);
  report.provenance.run_spec = to_json(c);
  report.provenance.config_hash = [&] {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(to_json(c).dump())));
    return std::string(buf);
  }();
  const auto j = to_json(report);
  validate_report_json(j);
  const fs::path dir(c.output_dir);
  write_text(dir / "report.json", j.dump(2) + "\n");
  write_text(dir / "report.md", to_markdown(report));
  write_text(dir / "config.resolved.json", to_json(c).dump(2) + "\n");
  if (json) {
    out << j.dump(2) << '\n';
  } else {
    out << to_markdown(report);
    err << "reports written to " << dir.string() << '\n';
  }
  return kExitOk;
}

int cmd_train(const CliConfig& c, const std::string& save, std::ostream& out) {
  try {
    c.spec.train_config.validate();
  } catch (const std::exception& e) {
    throw ValidationFailure(e.what());
  }
  if (c.data.train.empty()) throw ValidationFailure("train needs at least one --train file");
  const auto verbalizers = load_verbalizers(c.verbalizers);
  auto trains = load_all(c.data.train, c.data, Split::Train);
  auto tests = load_all(c.data.test, c.data, Split::Test);
  std::vector<const Dataset*> sources;
  for (const auto& d : trains) sources.push_back(&d);
  for (const auto& d : tests) sources.push_back(&d);
  auto backend = make_backend(c.backend, sources, verbalizers);
  std::vector<PromptInstance> instances;
  for (auto order : c.spec.word_orders) {
    for (const auto& d : trains) {
      auto part = render_all(d.examples(), {c.spec.kind, order}, verbalizers);
      instances.insert(instances.end(), part.begin(), part.end());
    }
  }
  const auto summary = backend->train(instances, c.spec.train_config);
  save_checkpoint(*backend, save, c.spec.train_config);
  ojson j;
  j["checkpoint"] = save;
  j["instances"] = instances.size();
  j["epoch_loss"] = summary.epoch_loss;
  j["steps"] = summary.steps;
  out << j.dump(2) << '\n';
  return kExitOk;
}

int cmd_score(const CliConfig& c, const std::string& text, const std::string& head,
              const std::string& tail, const std::string& lang,
              const std::vector<std::string>& relations, std::ostream& out) {
  if (c.backend.checkpoint.empty()) throw ValidationFailure("score needs --checkpoint");
  if (relations.empty()) throw ValidationFailure("score needs --relations");
  const auto verbalizers = load_verbalizers(c.verbalizers);
  const auto backend = load_checkpoint(c.backend.checkpoint);
  RCExample ex{"cli", text, parse_span(head), parse_span(tail), relations.front(), lang};
  try {
    validate_example(ex);
  } catch (const CorpusError& e) {
    throw ValidationFailure(e.what());
  }
  ojson j = ojson::object();
  const std::set<std::string> rels(relations.begin(), relations.end());
  for (auto order : c.spec.word_orders) {
    const PromptVariant variant{c.spec.kind, order};
    const auto instance = render(ex, variant, verbalizers);
    const auto targets =
        target_token_ids(rels, target_language(variant.kind, lang), verbalizers,
                         backend->vocabulary());
    std::size_t length = c.spec.decode_length;
    if (length == 0) {
      for (const auto& [r, ids] : targets) length = std::max(length, ids.size());
    }
    const auto logits = backend->decode_logits(instance, length);
    const auto table = score_relations(logits, targets);
    const auto pred = predict(table);
    ojson v;
    v["prompt"] = instance.input_text();
    v["prediction"] = pred.relation;
    v["tie"] = pred.tie;
    v["truncated"] = logits.truncated();
    v["table"] = to_json(table);
    j[variant.label()] = v;
  }
  out << j.dump(2) << '\n';
  return kExitOk;
}

int cmd_synth(const SyntheticConfig& config, const fs::path& dir, std::ostream& out) {
  const auto corpus = make_synthetic_corpus(config);
  write_text(dir / "train.jsonl", to_canonical_jsonl(corpus.train));
  write_text(dir / "test.jsonl", to_canonical_jsonl(corpus.test));
  fs::create_directories(dir / "verbalizers");
  for (const auto& l : corpus.verbalizers.languages()) {
    if (l == "en") continue;
    const auto* t = corpus.verbalizers.find(l);
    if (!t) continue;
    ojson j(t->entries());
    write_text(dir / "verbalizers" / (l + ".json"), j.dump(2) + "\n");
  }
  out << "wrote synthetic corpus (" << corpus.train.size() << " train, " << corpus.test.size()
      << " test) to " << dir.string() << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"polyrc: multilingual relation classification by prompting"};
  app.set_version_flag("--version", std::string(POLYRC_VERSION));
  app.require_subcommand(1);
  bool json = false;
  app.add_flag("--json", json, "Machine-readable JSON on stdout");

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Validate a corpus and write canonical JSONL");
  std::string in_path, in_format = "jsonl", in_mapping, in_split = "train", in_out;
  std::vector<std::string> in_extra;
  ingest->add_option("--input", in_path, "Source corpus")->required()->check(CLI::ExistingFile);
  ingest->add_option("--format", in_format, "jsonl | tsv");
  ingest->add_option("--mapping", in_mapping, "Column mapping for tsv sources");
  ingest->add_option("--split", in_split, "train | test | validation");
  ingest->add_option("--extra-language", in_extra, "Accept a language outside the 14");
  ingest->add_option("--output", in_out, "Canonical JSONL output")->required();

  // shared run/stats/train/score options
  CliConfig cfg;
  std::string config_path, protocol_flag, variant_flag, order_flag, seeds_flag, conv_flag,
      std_flag, backend_flag, checkpoint_flag, verbalizers_flag, out_flag, format_flag,
      mapping_flag;
  std::vector<std::string> train_flag, test_flag, langs_flag, extra_flag;
  std::optional<std::size_t> k_flag, epochs_flag, batch_flag, maxlen_flag, threads_flag, dim_flag,
      decode_flag;
  std::optional<double> lr_flag, wd_flag;
  std::optional<std::string> optimizer_flag;
  bool any_k_flag = false;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
    sub->add_option("--train", train_flag, "Train corpus file(s)");
    sub->add_option("--test", test_flag, "Test corpus file(s)");
    sub->add_option("--format", format_flag, "jsonl | tsv");
    sub->add_option("--mapping", mapping_flag, "Column mapping for tsv sources");
    sub->add_option("--extra-language", extra_flag, "Accept a language outside the 14");
    sub->add_option("--verbalizers", verbalizers_flag, "Directory of <lang>.json tables");
  };
  auto add_model = [&](CLI::App* sub) {
    sub->add_option("--variant", variant_flag, "null | cs | sp | il");
    sub->add_option("--word-order", order_flag, "svo | sov | both");
    sub->add_option("--backend", backend_flag, "toy | table");
    sub->add_option("--checkpoint", checkpoint_flag, "Backend checkpoint");
    sub->add_option("--dim", dim_flag, "Toy model width");
    sub->add_option("--decode-length", decode_flag, "Decode steps (0: longest target)");
  };
  auto add_training = [&](CLI::App* sub) {
    sub->add_option("--lr", lr_flag, "Learning rate");
    sub->add_option("--epochs", epochs_flag, "Epochs");
    sub->add_option("--batch-size", batch_flag, "Batch size");
    sub->add_option("--max-seq", maxlen_flag, "Maximum input length");
    sub->add_option("--optimizer", optimizer_flag, "adamw | adam");
    sub->add_option("--weight-decay", wd_flag, "AdamW weight decay");
  };

  auto* stats = app.add_subcommand("stats", "Language profiles and verbalization lengths");
  add_common(stats);

  auto* run = app.add_subcommand("run", "Run an experiment protocol");
  add_common(run);
  add_model(run);
  add_training(run);
  run->add_option("--protocol", protocol_flag,
                  "full | fewshot | zeroshot-incontext | zeroshot-transfer");
  run->add_option("--k", k_flag, "Shots per relation");
  run->add_flag("--allow-any-k", any_k_flag, "Permit k outside 8/16/32");
  run->add_option("--seeds", seeds_flag, "Comma-separated seeds");
  run->add_option("--languages", langs_flag, "Languages to evaluate");
  run->add_option("--f1", conv_flag, "all-classes | exclude-no-relation");
  run->add_option("--std", std_flag, "population | sample");
  run->add_option("--threads", threads_flag, "Evaluation workers");
  run->add_option("--out", out_flag, "Output directory");

  auto* train = app.add_subcommand("train", "Train a backend and save a checkpoint");
  add_common(train);
  add_model(train);
  add_training(train);
  std::string save_path;
  train->add_option("--save", save_path, "Checkpoint path")->required();

  auto* score = app.add_subcommand("score", "Score one example against a relation set");
  add_model(score);
  score->add_option("--verbalizers", verbalizers_flag, "Directory of <lang>.json tables");
  std::string sc_text, sc_head, sc_tail, sc_lang = "en";
  std::vector<std::string> sc_relations;
  score->add_option("--text", sc_text, "Sentence")->required();
  score->add_option("--head", sc_head, "Head span start,end (code points)")->required();
  score->add_option("--tail", sc_tail, "Tail span start,end (code points)")->required();
  score->add_option("--lang", sc_lang, "Language code");
  score->add_option("--relations", sc_relations, "Candidate relations")->delimiter(',');

  auto* synth = app.add_subcommand("synth", "Write a synthetic multilingual toy corpus");
  SyntheticConfig syn;
  std::string syn_out;
  synth->add_option("--out", syn_out, "Output directory")->required();
  synth->add_option("--languages", syn.languages, "Languages")->delimiter(',');
  synth->add_option("--relations", syn.relations, "Number of relations");
  synth->add_option("--train-per-relation", syn.train_per_relation, "Train examples per class");
  synth->add_option("--test-per-relation", syn.test_per_relation, "Test examples per class");
  synth->add_option("--seed", syn.seed, "Seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (ingest->parsed()) {
      return cmd_ingest(in_path, in_format, in_mapping, in_split, in_extra, in_out, json, out,
                        err);
    }
    if (synth->parsed()) return cmd_synth(syn, syn_out, out);

    try {
      // defaults < config file < flags
      nlohmann::json file_cfg = nlohmann::json::object();
      if (!config_path.empty()) file_cfg = read_json_file(config_path);
      Protocol protocol = Protocol::Full;
      if (file_cfg.contains("run") && file_cfg["run"].contains("protocol")) {
        protocol = parse_protocol(file_cfg["run"]["protocol"].get<std::string>());
      }
      if (!protocol_flag.empty()) protocol = parse_protocol(protocol_flag);
      cfg.spec = default_run_spec(protocol);
      apply_config_file(file_cfg, cfg);
      auto& spec = cfg.spec;
      spec.protocol = protocol;
      if (!variant_flag.empty()) spec.kind = parse_prompt_kind(variant_flag);
      if (!order_flag.empty()) {
        spec.word_orders = order_flag == "both"
                               ? std::vector<WordOrder>{WordOrder::SVO, WordOrder::SOV}
                               : std::vector<WordOrder>{parse_word_order(order_flag)};
      }
      if (k_flag) spec.k = *k_flag;
      if (any_k_flag) spec.allow_any_k = true;
      if (!seeds_flag.empty()) {
        spec.seeds.clear();
        for (const auto& s : split(seeds_flag, ',')) spec.seeds.push_back(std::stoull(trim(s)));
      }
      if (!langs_flag.empty()) spec.languages = langs_flag;
      if (!conv_flag.empty()) spec.convention = parse_f1_convention(conv_flag);
      if (!std_flag.empty()) spec.std_kind = parse_std_kind(std_flag);
      if (threads_flag) spec.threads = *threads_flag;
      if (decode_flag) spec.decode_length = *decode_flag;
      if (lr_flag) spec.train_config.learning_rate = *lr_flag;
      if (epochs_flag) spec.train_config.epochs = *epochs_flag;
      if (batch_flag) spec.train_config.batch_size = *batch_flag;
      if (maxlen_flag) spec.train_config.max_sequence_length = *maxlen_flag;
      if (optimizer_flag) spec.train_config.optimizer = *optimizer_flag;
      if (wd_flag) spec.train_config.weight_decay = *wd_flag;
      if (!train_flag.empty()) cfg.data.train = train_flag;
      if (!test_flag.empty()) cfg.data.test = test_flag;
      if (!format_flag.empty()) cfg.data.format = format_flag;
      if (!mapping_flag.empty()) cfg.data.mapping = mapping_flag;
      if (!extra_flag.empty()) cfg.data.extra_languages = extra_flag;
      if (!verbalizers_flag.empty()) cfg.verbalizers = verbalizers_flag;
      if (!backend_flag.empty()) cfg.backend.name = backend_flag;
      if (!checkpoint_flag.empty()) cfg.backend.checkpoint = checkpoint_flag;
      if (dim_flag) cfg.backend.toy.dim = *dim_flag;
      if (!out_flag.empty()) cfg.output_dir = out_flag;
      if (cfg.backend.name != "toy" && cfg.backend.name != "table") {
        throw ValidationFailure("unknown backend '" + cfg.backend.name + "'");
      }
    } catch (const ExperimentError& e) {
      throw ValidationFailure(e.what());
    }

    if (stats->parsed()) return cmd_stats(cfg, json, out, err);
    if (run->parsed()) return cmd_run(cfg, json, out, err);
    if (train->parsed()) return cmd_train(cfg, save_path, out);
    if (score->parsed()) {
      return cmd_score(cfg, sc_text, sc_head, sc_tail, sc_lang, sc_relations, out);
    }
  } catch (const ValidationFailure& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const CorpusError& e) {
    err << "error: " << e.what() << '\n';
    for (const auto& row : e.rows()) err << "  row " << row.row_id << ": " << row.message << '\n';
    return kExitValidation;
  } catch (const VerbalizerError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitRuntime;
}

}  // namespace polyrc
