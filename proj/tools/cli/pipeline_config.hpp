#pragma once

#include <map>
#include <set>
#include <string>

#include <nlohmann/json.hpp>

#include "wikimrc/mrcgen/generator.hpp"
#include "wikimrc/reader/config.hpp"
#include "wikimrc/wikicorpus/entity_index.hpp"

namespace wikimrc::cli {

// Fine-tuning settings for one benchmark.
struct TaskProfile {
  std::size_t query_length = 64;
  std::size_t input_length = 192;
  std::size_t batch_size = 16;
  double learning_rate = 1e-5;
  double epochs = 10;
};

// Fine-tuning presets keyed by dataset name (xquad, mlqa, tydiqa,
// wikiann, conll, semeval16, pawsx, xnli).
std::map<std::string, TaskProfile> default_profiles();

// Default input length per task family: 384 for eqa, 192 otherwise.
std::size_t default_input_length(const std::string &task);

struct PipelineConfig {
  std::set<std::string> languages;  // empty: all
  int workers = 1;
  mrcgen::GenConfig gen;
  wikicorpus::MinCounts min_counts;
  reader::ReaderConfig reader;
  std::map<std::string, TaskProfile> profiles = default_profiles();
};

// Applies one dotted key, e.g. "gen.Q", "reader.hidden", "train.steps",
// "index.min_count.en", "finetune.conll.batch_size". Throws UsageError on
// unknown keys or mistyped values.
void apply_setting(PipelineConfig &config, const std::string &key, const nlohmann::json &value);

// Reads a JSON object of dotted keys. Nested objects are flattened with '.'.
PipelineConfig load_pipeline_config(const std::string &path);

}  // namespace wikimrc::cli
