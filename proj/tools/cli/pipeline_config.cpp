#include "pipeline_config.hpp"

#include <fstream>

#include "wikimrc/util/error.hpp"

namespace wikimrc::cli {
namespace {

template <typename T>
T as(const std::string &key, const nlohmann::json &value) {
  try {
    return value.get<T>();
  } catch (const nlohmann::json::exception &) {
    throw UsageError("config key " + key + " has a value of the wrong type");
  }
}

std::size_t as_count(const std::string &key, const nlohmann::json &value) {
  if (!value.is_number_integer() || value.get<int64_t>() < 0) {
    throw UsageError("config key " + key + " needs a non-negative integer");
  }
  return value.get<std::size_t>();
}

void flatten(const nlohmann::json &j, const std::string &prefix,
             std::vector<std::pair<std::string, nlohmann::json>> &out) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
    if (it->is_object()) {
      flatten(*it, key, out);
    } else {
      out.emplace_back(key, *it);
    }
  }
}

}  // namespace

std::map<std::string, TaskProfile> default_profiles() {
  return {
      {"xquad", {64, 384, 8, 3e-5, 3}},    {"mlqa", {64, 384, 8, 3e-5, 3}},
      {"tydiqa", {64, 384, 8, 2e-5, 10}},  {"wikiann", {32, 192, 16, 1e-5, 10}},
      {"conll", {32, 192, 16, 1e-5, 10}},  {"semeval16", {32, 192, 32, 2e-5, 20}},
      {"pawsx", {64, 192, 16, 5e-5, 10}},  {"xnli", {64, 192, 32, 3e-5, 3}},
  };
}

std::size_t default_input_length(const std::string &task) { return task == "eqa" ? 384 : 192; }

void apply_setting(PipelineConfig &c, const std::string &key, const nlohmann::json &v) {
  const auto dot = key.find('.');
  const std::string group = key.substr(0, dot);
  const std::string field = dot == std::string::npos ? "" : key.substr(dot + 1);
  if (key == "languages") {
    c.languages.clear();
    for (const auto &l : as<std::vector<std::string>>(key, v)) c.languages.insert(l);
  } else if (key == "workers") {
    c.workers = static_cast<int>(as_count(key, v));
  } else if (group == "gen") {
    if (field == "Q") c.gen.query_words = as_count(key, v);
    else if (field == "C") c.gen.context_words = as_count(key, v);
    else if (field == "answerable_cap") c.gen.answerable_cap = as_count(key, v);
    else if (field == "unanswerable_cap") c.gen.unanswerable_cap = as_count(key, v);
    else if (field == "seed") c.gen.seed = as<uint64_t>(key, v);
    else throw UsageError("unknown config key " + key);
  } else if (group == "index") {
    if (field == "min_count_default") {
      c.min_counts.default_count = as_count(key, v);
    } else if (field.starts_with("min_count.")) {
      c.min_counts.per_language[field.substr(10)] = as_count(key, v);
    } else {
      throw UsageError("unknown config key " + key);
    }
  } else if (group == "reader" || group == "train") {
    static const std::set<std::string> reader_fields = {"hidden", "layers", "heads", "ffn_hidden",
                                                        "extractor_hidden", "max_span", "threshold",
                                                        "max_seq_len"};
    static const std::set<std::string> train_fields = {"learning_rate", "weight_decay", "grad_clip",
                                                       "batch_size", "steps", "seed"};
    const auto &allowed = group == "reader" ? reader_fields : train_fields;
    if (!allowed.count(field)) throw UsageError("unknown config key " + key);
    if (!v.is_number()) throw UsageError("config key " + key + " needs a number");
    c.reader = reader::config_from_json(nlohmann::json{{field, v}}, c.reader);
  } else if (group == "finetune") {
    const auto dot2 = field.find('.');
    if (dot2 == std::string::npos) throw UsageError("unknown config key " + key);
    TaskProfile &p = c.profiles[field.substr(0, dot2)];
    const std::string f = field.substr(dot2 + 1);
    if (f == "query_length") p.query_length = as_count(key, v);
    else if (f == "input_length") p.input_length = as_count(key, v);
    else if (f == "batch_size") p.batch_size = as_count(key, v);
    else if (f == "learning_rate") p.learning_rate = as<double>(key, v);
    else if (f == "epochs") p.epochs = as<double>(key, v);
    else throw UsageError("unknown config key " + key);
  } else {
    throw UsageError("unknown config key " + key);
  }
}

PipelineConfig load_pipeline_config(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error &e) {
    throw UsageError("config " + path + ": " + e.what());
  }
  if (!j.is_object()) throw UsageError("config " + path + " must be a JSON object");
  std::vector<std::pair<std::string, nlohmann::json>> flat;
  flatten(j, "", flat);
  PipelineConfig c;
  for (const auto &[key, value] : flat) apply_setting(c, key, value);
  return c;
}

}  // namespace wikimrc::cli
