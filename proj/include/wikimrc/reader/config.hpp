#pragma once

#include <cstddef>
#include <cstdint>

#include <nlohmann/json.hpp>

namespace wikimrc::reader {

struct ReaderConfig {
  std::size_t hidden = 128;
  std::size_t layers = 2;
  std::size_t heads = 4;
  std::size_t ffn_hidden = 0;        // 0: 4 * hidden
  std::size_t extractor_hidden = 0;  // 0: hidden
  std::size_t max_span = 30;
  double threshold = 0.5;
  std::size_t max_seq_len = 384;

  double learning_rate = 1e-3;
  double weight_decay = 0.0;
  double grad_clip = 1.0;  // global norm; 0 disables
  std::size_t batch_size = 8;
  std::size_t steps = 500;
  uint64_t seed = 0;

  std::size_t ffn_width() const { return ffn_hidden ? ffn_hidden : 4 * hidden; }
  std::size_t extractor_width() const { return extractor_hidden ? extractor_hidden : hidden; }

  // Throws UsageError on inconsistent values.
  void validate() const;

  // Architecture fields must match between a checkpoint and a fine-tuning run.
  bool same_architecture(const ReaderConfig &o) const;
};

nlohmann::ordered_json config_to_json(const ReaderConfig &config);
// Missing keys keep their defaults.
ReaderConfig config_from_json(const nlohmann::json &j, ReaderConfig base = {});

}  // namespace wikimrc::reader
