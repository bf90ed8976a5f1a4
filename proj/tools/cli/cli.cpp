#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "pipeline_config.hpp"
#include "wikimrc/eval/metrics.hpp"
#include "wikimrc/eval/report.hpp"
#include "wikimrc/mrcgen/generator.hpp"
#include "wikimrc/mrcgen/stats.hpp"
#include "wikimrc/reader/tasks.hpp"
#include "wikimrc/reader/train.hpp"
#include "wikimrc/taskconv/convert.hpp"
#include "wikimrc/util/error.hpp"
#include "wikimrc/util/jsonl.hpp"
#include "wikimrc/util/log.hpp"
#include "wikimrc/wikicorpus/corpus.hpp"
#include "wikimrc/wikicorpus/entity_index.hpp"

namespace wikimrc::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

std::ofstream open_output(const std::string &path) {
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  return out;
}

void close_output(std::ofstream &out, const std::string &path) {
  out.close();
  if (!out) throw DataError("failed writing " + path);
}

std::pair<std::string, std::string> split_assignment(const std::string &s, const char *flag) {
  const auto eq = s.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == s.size()) {
    throw UsageError(std::string(flag) + " expects lang=value, got '" + s + "'");
  }
  return {s.substr(0, eq), s.substr(eq + 1)};
}

std::set<std::string> split_list(const std::string &s) {
  std::set<std::string> out;
  std::stringstream in(s);
  for (std::string item; std::getline(in, item, ',');) {
    if (!item.empty()) out.insert(item);
  }
  return out;
}

std::vector<wikicorpus::Article> read_articles(const std::string &path) {
  std::vector<wikicorpus::Article> articles;
  for_each_jsonl_file(path, [&](const json &j) {
    articles.push_back(wikicorpus::article_from_json(j));
    wikicorpus::validate_article(articles.back());
  });
  return articles;
}

wikicorpus::RedirectMap read_redirects(const std::string &path) {
  wikicorpus::RedirectMap redirects;
  for_each_jsonl_file(path, [&](const json &j) {
    try {
      redirects[{j.at("lang").get<std::string>(), j.at("title").get<std::string>()}] =
          j.at("target").get<std::string>();
    } catch (const json::exception &e) {
      throw DataError(std::string("bad redirect record: ") + e.what());
    }
  });
  return redirects;
}

// Options shared by every command.
struct Common {
  std::string config_path;
  std::optional<int> workers;
  std::string log_level = "info";

  void attach(CLI::App *cmd) {
    cmd->add_option("--config", config_path, "JSON file of dotted-key settings");
    cmd->add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
    cmd->add_option("--log-level", log_level, "trace, debug, info, warn, error or off")
        ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "off"}));
  }

  PipelineConfig load() const {
    logger()->set_level(spdlog::level::from_str(log_level));
    PipelineConfig c = config_path.empty() ? PipelineConfig{} : load_pipeline_config(config_path);
    if (workers) c.workers = *workers;
    return c;
  }
};

// Reader and optimizer flags; unset flags keep config-file values.
struct ReaderFlags {
  std::optional<std::size_t> hidden, layers, heads, max_span, max_seq_len, batch_size, steps;
  std::optional<double> threshold, learning_rate, weight_decay, grad_clip;
  std::optional<uint64_t> seed;

  void attach(CLI::App *cmd) {
    cmd->add_option("--hidden", hidden, "hidden width");
    cmd->add_option("--layers", layers, "encoder layers");
    cmd->add_option("--heads", heads, "attention heads");
    cmd->add_option("--max-span", max_span, "longest candidate span in tokens");
    cmd->add_option("--max-seq-len", max_seq_len, "longest assembled input");
    cmd->add_option("--threshold", threshold, "decision threshold on probabilities");
    cmd->add_option("--lr", learning_rate, "learning rate");
    cmd->add_option("--weight-decay", weight_decay, "decoupled weight decay");
    cmd->add_option("--grad-clip", grad_clip, "global gradient norm limit, 0 disables");
    cmd->add_option("--batch-size", batch_size, "inputs per step");
    cmd->add_option("--steps", steps, "optimizer steps");
    cmd->add_option("--seed", seed, "random seed");
  }

  void apply(reader::ReaderConfig &c) const {
    if (hidden) c.hidden = *hidden;
    if (layers) c.layers = *layers;
    if (heads) c.heads = *heads;
    if (max_span) c.max_span = *max_span;
    if (max_seq_len) c.max_seq_len = *max_seq_len;
    if (threshold) c.threshold = *threshold;
    if (learning_rate) c.learning_rate = *learning_rate;
    if (weight_decay) c.weight_decay = *weight_decay;
    if (grad_clip) c.grad_clip = *grad_clip;
    if (batch_size) c.batch_size = *batch_size;
    if (steps) c.steps = *steps;
    if (seed) c.seed = *seed;
  }
};

// ---------------------------------------------------------------- commands

struct BuildCorpus {
  Common common;
  std::vector<std::string> dumps;
  std::string out_dir;

  void attach(CLI::App *cmd) {
    common.attach(cmd);
    cmd->add_option("--dump", dumps, "lang=path of a MediaWiki XML export (repeatable)")->required();
    cmd->add_option("--out", out_dir, "output directory")->required();
  }

  void run(std::ostream &out) {
    const PipelineConfig config = common.load();
    std::vector<std::pair<std::string, std::string>> inputs;
    for (const auto &d : dumps) inputs.push_back(split_assignment(d, "--dump"));
    const std::string articles_path = (fs::path(out_dir) / "articles.jsonl").string();
    const std::string redirects_path = (fs::path(out_dir) / "redirects.jsonl").string();
    std::ofstream articles = open_output(articles_path);
    wikicorpus::RedirectMap redirects;
    int64_t next_id = 1;
    std::size_t total = 0;
    for (const auto &[lang, path] : inputs) {
      if (!config.languages.empty() && !config.languages.count(lang)) continue;
      std::ifstream dump(path, std::ios::binary);
      if (!dump) throw DataError("cannot open dump " + path);
      const auto counts = wikicorpus::build_corpus(
          dump, lang, TokenizerRegistry::global_default(), next_id, config.workers, redirects,
          [&](wikicorpus::Article &&a) { write_jsonl(articles, wikicorpus::article_to_json(a)); });
      logger()->info("{}: {} pages, {} articles, {} redirects, {} other namespaces", lang, counts.pages,
                     counts.articles, counts.redirects, counts.other_namespace);
      total += counts.articles;
    }
    close_output(articles, articles_path);
    std::ofstream red = open_output(redirects_path);
    for (const auto &[key, target] : redirects) {
      write_jsonl(red, ordered_json{{"lang", key.language}, {"title", key.title}, {"target", target}});
    }
    close_output(red, redirects_path);
    out << fmt::format("wrote {} articles and {} redirects to {}\n", total, redirects.size(), out_dir);
  }
};

struct Index {
  Common common;
  std::string articles_path, redirects_path, out_path;
  std::optional<std::size_t> min_default;
  std::vector<std::string> min_counts;

  void attach(CLI::App *cmd) {
    common.attach(cmd);
    cmd->add_option("--articles", articles_path, "articles.jsonl")->required();
    cmd->add_option("--redirects", redirects_path, "redirects.jsonl (default: next to the articles)");
    cmd->add_option("--out", out_path, "index.jsonl")->required();
    cmd->add_option("--min-count-default", min_default, "minimum mentions for unlisted languages");
    cmd->add_option("--min-count", min_counts, "lang=N minimum mentions (repeatable)");
  }

  void run(std::ostream &out) {
    PipelineConfig config = common.load();
    if (min_default) config.min_counts.default_count = *min_default;
    for (const auto &m : min_counts) {
      const auto [lang, value] = split_assignment(m, "--min-count");
      try {
        config.min_counts.per_language[lang] = std::stoul(value);
      } catch (const std::exception &) {
        throw UsageError("--min-count value '" + value + "' is not a count");
      }
    }
    if (redirects_path.empty()) {
      const fs::path sibling = fs::path(articles_path).parent_path() / "redirects.jsonl";
      if (fs::exists(sibling)) redirects_path = sibling.string();
    }
    const auto redirects = redirects_path.empty() ? wikicorpus::RedirectMap{} : read_redirects(redirects_path);
    wikicorpus::IndexBuilder builder;
    for_each_jsonl_file(articles_path, [&](const json &j) {
      const auto a = wikicorpus::article_from_json(j);
      if (config.languages.empty() || config.languages.count(a.language)) builder.add(a);
    });
    wikicorpus::IndexStats stats;
    const auto full = builder.finish(redirects, &stats);
    const auto filtered = wikicorpus::filter_entities(full, config.min_counts);
    std::ofstream file = open_output(out_path);
    for (const auto &[key, record] : filtered.entities()) write_jsonl(file, wikicorpus::entity_to_json(record));
    close_output(file, out_path);
    out << fmt::format("{} entities ({} before filtering, {} definition-less, {} redirect cycles)\n",
                       filtered.size(), full.size(), stats.definitionless, stats.redirect_cycles);
  }
};

struct GenPretrain {
  Common common;
  std::string index_path, articles_path, out_path, languages;
  std::optional<std::size_t> q, c;
  std::optional<uint64_t> seed;
  std::string caps;
  bool sorted = false;

  void attach(CLI::App *cmd) {
    common.attach(cmd);
    cmd->add_option("--index", index_path, "index.jsonl")->required();
    cmd->add_option("--articles", articles_path, "articles.jsonl")->required();
    cmd->add_option("--out", out_path, "mrc.jsonl")->required();
    cmd->add_option("--Q", q, "query length in words");
    cmd->add_option("--C", c, "context length in words");
    cmd->add_option("--seed", seed, "random seed");
    cmd->add_option("--caps", caps, "N or A,U examples per entity (answerable, unanswerable)");
    cmd->add_option("--languages", languages, "comma-separated language codes");
    cmd->add_flag("--sorted", sorted, "canonical (language, entity, ordinal) order");
  }

  void run(std::ostream &out) {
    PipelineConfig config = common.load();
    mrcgen::GenConfig gen = config.gen;
    if (q) gen.query_words = *q;
    if (c) gen.context_words = *c;
    if (seed) gen.seed = *seed;
    if (!caps.empty()) {
      const auto comma = caps.find(',');
      try {
        gen.answerable_cap = std::stoul(caps.substr(0, comma));
        gen.unanswerable_cap = comma == std::string::npos ? gen.answerable_cap : std::stoul(caps.substr(comma + 1));
      } catch (const std::exception &) {
        throw UsageError("--caps expects N or A,U");
      }
    }
    gen.languages = languages.empty() ? config.languages : split_list(languages);
    gen.validate();

    auto articles = read_articles(articles_path);
    wikicorpus::EntityIndex index;
    for_each_jsonl_file(index_path, [&](const json &j) { index.insert(wikicorpus::entity_from_json(j)); });
    index.rebuild_rosters(articles);
    const mrcgen::Corpus corpus(std::move(articles));
    std::ofstream file = open_output(out_path);
    const auto stats = mrcgen::generate_examples(
        index, corpus, gen, TokenizerRegistry::global_default(), config.workers,
        [&](mrcgen::MRCExample &&ex) { write_jsonl(file, mrcgen::example_to_json(ex)); });
    close_output(file, out_path);
    out << fmt::format("{} examples from {} entities ({} skipped, {} relaxed unanswerable draws)\n",
                       stats.examples, stats.entities - stats.skipped_entities, stats.skipped_entities,
                       stats.relaxed_unanswerable);
  }
};

struct ConvertTask {
  Common common;
  std::string task, scheme_path, input_path, out_path, mode = "classification";

  void attach(CLI::App *cmd) {
    common.attach(cmd);
    cmd->add_option("--task", task, "eqa, ner, absa or pair")->required();
    cmd->add_option("--scheme", scheme_path, "label scheme JSON (required except for eqa)");
    cmd->add_option("--input", input_path, "task instances, one JSON object per line")->required();
    cmd->add_option("--out", out_path, "converted mrc.jsonl")->required();
    cmd->add_option("--mode", mode, "pair mode: classification or rationale");
  }

  void run(std::ostream &out) {
    common.load();
    const auto kind = taskconv::parse_task_kind(task);
    const auto pair_mode = taskconv::parse_pair_mode(mode);
    std::optional<taskconv::Scheme> scheme;
    if (kind != taskconv::TaskKind::kEqa) {
      if (scheme_path.empty()) throw UsageError("--scheme is required for task " + task);
      scheme = taskconv::load_scheme(scheme_path);
      if (scheme->task != kind) throw UsageError("scheme " + scheme_path + " is not a " + task + " scheme");
    }
    const auto &tokenizers = TokenizerRegistry::global_default();
    std::ofstream file = open_output(out_path);
    std::size_t instances = 0, inputs = 0;
    for_each_jsonl_file(input_path, [&](const json &j) {
      std::vector<taskconv::UnifiedInput> converted;
      if (kind == taskconv::TaskKind::kEqa) {
        const auto x = taskconv::eqa_from_json(j, tokenizers);
        converted.push_back(taskconv::convert_eqa(x, tokenizers.for_language(x.language)));
      } else if (taskconv::is_tagging(kind)) {
        const auto x = taskconv::tagging_from_json(j, tokenizers);
        converted = taskconv::convert_tagging(x, *scheme, tokenizers.for_language(x.language));
      } else {
        const auto x = taskconv::pair_from_json(j, tokenizers);
        converted = taskconv::convert_pair(x, *scheme, pair_mode, tokenizers.for_language(x.language));
      }
      ++instances;
      for (const auto &in : converted) {
        write_jsonl(file, taskconv::unified_to_json(in));
        ++inputs;
      }
    });
    close_output(file, out_path);
    out << fmt::format("converted {} instances into {} inputs\n", instances, inputs);
  }
};

void truncate_query(taskconv::UnifiedInput &in, std::size_t limit) {
  if (in.query.size() <= limit) return;
  const auto gold = in.context_gold();
  const bool cls_only = in.answerable() && gold.empty();
  taskconv::UnifiedInput cut = taskconv::assemble(
      std::vector<std::string>(in.query.begin(), in.query.begin() + static_cast<std::ptrdiff_t>(limit)),
      std::move(in.context), gold, cls_only);
  cut.id = std::move(in.id);
  cut.language = std::move(in.language);
  cut.task = std::move(in.task);
  cut.source_id = std::move(in.source_id);
  cut.label = std::move(in.label);
  in = std::move(cut);
}

struct Train {
  Common common;
  ReaderFlags flags;
  reader::TrainMode mode;
  std::vector<std::string> data;
  std::string out_path, loss_path, init_path, task, profile;

  explicit Train(reader::TrainMode m) : mode(m) {}

  void attach(CLI::App *cmd) {
    common.attach(cmd);
    flags.attach(cmd);
    cmd->add_option("--data", data, "mrc.jsonl training file (repeatable)")->required();
    cmd->add_option("--out", out_path, "checkpoint to write")->required();
    cmd->add_option("--loss-csv", loss_path, "per-step loss trace (default: <out>.loss.csv)");
    auto *init = cmd->add_option("--init", init_path, "checkpoint to start from");
    if (mode == reader::TrainMode::kFinetune) {
      init->required();
      cmd->add_option("--task", task, "eqa, ner, absa or pair; sets the default input length");
      cmd->add_option("--profile", profile, "dataset preset for fine-tuning settings");
    }
  }

  void run(std::ostream &out) {
    PipelineConfig config = common.load();
    reader::ReaderConfig rc = config.reader;
    std::optional<TaskProfile> prof;
    std::vector<taskconv::UnifiedInput> inputs;
    for (const auto &path : data) {
      auto part = taskconv::read_unified_file(path);
      inputs.insert(inputs.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
    }
    if (mode == reader::TrainMode::kFinetune) {
      if (!task.empty()) {
        taskconv::parse_task_kind(task);
        rc.max_seq_len = default_input_length(task);
      }
      if (!profile.empty()) {
        auto it = config.profiles.find(profile);
        if (it == config.profiles.end()) throw UsageError("unknown profile " + profile);
        prof = it->second;
        rc.max_seq_len = prof->input_length;
        rc.batch_size = prof->batch_size;
        rc.learning_rate = prof->learning_rate;
        for (auto &in : inputs) truncate_query(in, prof->query_length);
      }
    }
    flags.apply(rc);
    if (prof && !flags.steps && !inputs.empty()) {
      rc.steps = static_cast<std::size_t>(
          std::ceil(prof->epochs * static_cast<double>(inputs.size()) / static_cast<double>(rc.batch_size)));
    }
    std::optional<reader::FloatReader> initial;
    if (!init_path.empty()) {
      initial = reader::load_checkpoint(init_path);
      const auto &arch = initial->config();
      rc.hidden = arch.hidden;
      rc.layers = arch.layers;
      rc.heads = arch.heads;
      rc.ffn_hidden = arch.ffn_width();
      rc.extractor_hidden = arch.extractor_width();
      if (!flags.max_seq_len && !prof && task.empty()) rc.max_seq_len = arch.max_seq_len;
      rc.max_seq_len = std::min(rc.max_seq_len, arch.max_seq_len);
      if (flags.hidden || flags.layers || flags.heads) {
        logger()->warn("architecture flags are ignored when starting from a checkpoint");
      }
    }
    const auto result = reader::train(inputs, rc, mode, initial ? &*initial : nullptr);
    reader::save_checkpoint(result.model, out_path);
    const std::string trace = loss_path.empty() ? out_path + ".loss.csv" : loss_path;
    reader::write_loss_csv(result.losses, trace);
    out << fmt::format("trained {} steps on {} inputs; final loss {}\n", result.losses.size(), inputs.size(),
                       result.losses.empty() ? std::string("n/a") : fmt::format("{:.6f}", result.losses.back()));
  }
};

struct Evaluate {
  Common common;
  std::string task, scheme_path, gold_path, pred_path, checkpoint_path, dataset, tsv_path, write_pred;
  std::optional<double> threshold;

  void attach(CLI::App *cmd) {
    common.attach(cmd);
    cmd->add_option("--task", task, "eqa, ner, absa or pair")->required();
    cmd->add_option("--scheme", scheme_path, "label scheme JSON (required except for eqa)");
    cmd->add_option("--gold", gold_path, "gold task instances")->required();
    auto *pred = cmd->add_option("--pred", pred_path, "predictions keyed by id");
    auto *ckpt = cmd->add_option("--checkpoint", checkpoint_path, "reader used to predict");
    pred->excludes(ckpt);
    cmd->add_option("--dataset", dataset, "dataset name in the report (default: task)");
    cmd->add_option("--tsv", tsv_path, "machine-readable report rows");
    cmd->add_option("--write-pred", write_pred, "store the reader's predictions");
    cmd->add_option("--threshold", threshold, "decision threshold override");
  }

  void run(std::ostream &out) {
    common.load();
    if (pred_path.empty() == checkpoint_path.empty()) throw UsageError("give exactly one of --pred or --checkpoint");
    const auto kind = taskconv::parse_task_kind(task);
    std::optional<taskconv::Scheme> scheme;
    if (kind != taskconv::TaskKind::kEqa) {
      if (scheme_path.empty()) throw UsageError("--scheme is required for task " + task);
      scheme = taskconv::load_scheme(scheme_path);
    }
    const auto &tokenizers = TokenizerRegistry::global_default();
    std::map<std::string, json> predictions;
    std::optional<reader::FloatReader> model;
    if (!pred_path.empty()) {
      for_each_jsonl_file(pred_path, [&](const json &j) {
        try {
          predictions[j.at("id").get<std::string>()] = j;
        } catch (const json::exception &e) {
          throw DataError(std::string("bad prediction record: ") + e.what());
        }
      });
    } else {
      model = reader::load_checkpoint(checkpoint_path);
      if (threshold) model->mutable_config().threshold = *threshold;
    }
    std::optional<std::ofstream> pred_out;
    if (!write_pred.empty()) pred_out = open_output(write_pred);
    const std::string name = dataset.empty() ? task : dataset;
    std::vector<eval::InstanceResult> results;
    auto lookup = [&](const std::string &id) -> const json & {
      auto it = predictions.find(id);
      if (it == predictions.end()) throw DataError("no prediction for " + id);
      return it->second;
    };
    for_each_jsonl_file(gold_path, [&](const json &j) {
      eval::InstanceResult r;
      r.dataset = name;
      if (kind == taskconv::TaskKind::kEqa) {
        const auto x = taskconv::eqa_from_json(j, tokenizers);
        std::string pred;
        if (model) {
          pred = reader::predict_eqa(*model, x);
        } else {
          const json &p = lookup(x.id);
          if (p.contains("prediction")) {
            pred = p["prediction"].get<std::string>();
          } else if (p.contains("answers") && !p["answers"].empty()) {
            pred = p["answers"][0].get<std::string>();
          }
        }
        if (pred_out) write_jsonl(*pred_out, ordered_json{{"id", x.id}, {"prediction", pred}});
        const std::vector<std::string> golds = x.answers.empty() ? std::vector<std::string>{""} : x.answers;
        const auto s = eval::squad_f1_em(pred, golds, x.language == "en");
        r.language = x.language;
        r.family = eval::MetricFamily::kSquad;
        r.f1 = s.f1;
        r.em = s.em;
      } else if (taskconv::is_tagging(kind)) {
        const auto x = taskconv::tagging_from_json(j, tokenizers);
        std::vector<taskconv::TypedSpan> pred;
        if (model) {
          pred = reader::predict_tagging(*model, x, *scheme, tokenizers.for_language(x.language));
        } else {
          const json &p = lookup(x.id);
          json copy = j;
          copy["spans"] = p.value("spans", json::array());
          pred = taskconv::tagging_from_json(copy, tokenizers).spans;
        }
        if (pred_out) {
          taskconv::TaggingInstance shown = x;
          shown.spans = pred;
          write_jsonl(*pred_out, taskconv::tagging_to_json(shown));
        }
        const std::set<taskconv::TypedSpan> ps(pred.begin(), pred.end()), gs(x.spans.begin(), x.spans.end());
        std::size_t matched = 0;
        for (const auto &s : ps) matched += gs.count(s);
        r.language = x.language;
        r.family = eval::MetricFamily::kSpan;
        r.matched = matched;
        r.predicted = ps.size();
        r.gold = gs.size();
      } else {
        const auto x = taskconv::pair_from_json(j, tokenizers);
        if (!x.label) throw DataError("gold pair " + x.id + " has no label");
        std::string pred;
        if (model) {
          pred = reader::predict_pair(*model, x, *scheme, tokenizers.for_language(x.language));
        } else {
          pred = lookup(x.id).value("label", std::string());
        }
        if (pred_out) write_jsonl(*pred_out, ordered_json{{"id", x.id}, {"label", pred}});
        r.language = x.language;
        r.family = eval::MetricFamily::kAccuracy;
        r.correct = pred == *x.label;
      }
      results.push_back(std::move(r));
    });
    if (results.empty()) throw DataError("gold file " + gold_path + " is empty");
    if (pred_out) close_output(*pred_out, write_pred);
    const auto report = eval::build_report(results);
    out << report.render_text();
    if (!tsv_path.empty()) {
      std::ofstream file = open_output(tsv_path);
      file << report.render_tsv();
      close_output(file, tsv_path);
    }
  }
};

struct RationaleCmd {
  Common common;
  std::string checkpoint_path, sen1, sen2, label, lang = "en";

  void attach(CLI::App *cmd) {
    common.attach(cmd);
    cmd->add_option("--checkpoint", checkpoint_path, "fine-tuned reader")->required();
    cmd->add_option("--sen1", sen1, "first sentence")->required();
    cmd->add_option("--sen2", sen2, "second sentence")->required();
    cmd->add_option("--label", label, "label to explain")->required();
    cmd->add_option("--lang", lang, "language of both sentences");
  }

  void run(std::ostream &out) {
    common.load();
    const auto model = reader::load_checkpoint(checkpoint_path);
    const Tokenizer &tok = TokenizerRegistry::global_default().for_language(lang);
    taskconv::PairInstance pair;
    pair.id = "rationale";
    pair.language = lang;
    pair.sentence1 = token_texts(tok.tokenize(sen1));
    pair.sentence2 = token_texts(tok.tokenize(sen2));
    pair.label = label;
    const auto r = reader::extract_rationale(
        pair, [&](const taskconv::UnifiedInput &in) { return model.score(in); }, tok);
    std::string text;
    for (const auto &t : r.tokens) text += (text.empty() ? "" : " ") + t;
    write_jsonl(out, ordered_json{{"sentence", r.sentence},
                                  {"span", {r.span.start, r.span.end}},
                                  {"text", text},
                                  {"probability", r.probability},
                                  {"pass", r.pass}});
  }
};

struct Stats {
  Common common;
  std::vector<std::string> inputs;
  std::string tsv_path;

  void attach(CLI::App *cmd) {
    common.attach(cmd);
    cmd->add_option("--input", inputs, "mrc.jsonl (repeatable)")->required();
    cmd->add_option("--tsv", tsv_path, "machine-readable rows");
  }

  void run(std::ostream &out) {
    common.load();
    mrcgen::CorpusStats stats;
    for (const auto &path : inputs) {
      for_each_jsonl_file(path, [&](const json &j) {
        try {
          stats.add(j.at("lang").get<std::string>(), j.at("entity").get<std::string>());
        } catch (const json::exception &e) {
          throw DataError(std::string("bad mrc record: ") + e.what());
        }
      });
    }
    out << stats.render_table();
    if (!tsv_path.empty()) {
      std::ofstream file = open_output(tsv_path);
      file << stats.render_tsv();
      close_output(file, tsv_path);
    }
  }
};

}  // namespace

int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  CLI::App app{"Wikipedia anchor reading-comprehension toolkit", "wikimrc"};
  app.require_subcommand(1, 1);
  app.set_help_all_flag("--help-all", "help for every command");

  BuildCorpus build_corpus;
  Index index;
  GenPretrain gen_pretrain;
  ConvertTask convert_task;
  Train pretrain(reader::TrainMode::kPretrain);
  Train finetune(reader::TrainMode::kFinetune);
  Evaluate evaluate;
  RationaleCmd rationale;
  Stats stats;

  std::vector<std::pair<CLI::App *, std::function<void()>>> commands;
  auto add = [&](const char *name, const char *help, auto &cmd) {
    CLI::App *sub = app.add_subcommand(name, help);
    cmd.attach(sub);
    commands.emplace_back(sub, [&cmd, &out] { cmd.run(out); });
  };
  add("build-corpus", "dumps to articles.jsonl and redirects.jsonl", build_corpus);
  add("index", "articles to a frequency-filtered index.jsonl", index);
  add("gen-pretrain", "index and articles to mrc.jsonl pre-training examples", gen_pretrain);
  add("convert-task", "task instances to the shared reading format", convert_task);
  add("pretrain", "train a reader from scratch on mrc.jsonl", pretrain);
  add("finetune", "continue training a checkpoint on task data", finetune);
  add("evaluate", "score predictions or a checkpoint against gold instances", evaluate);
  add("rationale", "explain a sentence-pair label with a span", rationale);
  add("stats", "per-language entity and example counts", stats);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp &e) {
    app.exit(e, out, err);
    return 0;
  } catch (const CLI::CallForAllHelp &e) {
    app.exit(e, out, err);
    return 0;
  } catch (const CLI::ParseError &e) {
    app.exit(e, err, err);
    return static_cast<int>(ExitCode::kUsage);
  }
  try {
    for (auto &[sub, run] : commands) {
      if (sub->parsed()) run();
    }
  } catch (const Error &e) {
    err << "error: " << e.what() << "\n";
    return static_cast<int>(e.code());
  } catch (const std::exception &e) {
    err << "error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::kData);
  }
  return 0;
}

}  // namespace wikimrc::cli
