#include "wikimrc/reader/config.hpp"

#include "wikimrc/util/error.hpp"

namespace wikimrc::reader {

void ReaderConfig::validate() const {
  if (hidden == 0 || layers == 0 || heads == 0) throw UsageError("model sizes must be positive");
  if (hidden % heads != 0) throw UsageError("hidden width must be divisible by the head count");
  if (max_span == 0) throw UsageError("maximum span width must be at least 1");
  if (!(threshold > 0.0 && threshold < 1.0)) throw UsageError("threshold must lie in (0, 1)");
  if (max_seq_len < 8) throw UsageError("maximum sequence length must be at least 8");
  if (!(learning_rate > 0.0)) throw UsageError("learning rate must be positive");
  if (weight_decay < 0.0 || grad_clip < 0.0) throw UsageError("decay and clip must be non-negative");
  if (batch_size == 0) throw UsageError("batch size must be at least 1");
}

bool ReaderConfig::same_architecture(const ReaderConfig &o) const {
  return hidden == o.hidden && layers == o.layers && heads == o.heads &&
         ffn_width() == o.ffn_width() && extractor_width() == o.extractor_width();
}

nlohmann::ordered_json config_to_json(const ReaderConfig &c) {
  return {{"hidden", c.hidden},
          {"layers", c.layers},
          {"heads", c.heads},
          {"ffn_hidden", c.ffn_width()},
          {"extractor_hidden", c.extractor_width()},
          {"max_span", c.max_span},
          {"threshold", c.threshold},
          {"max_seq_len", c.max_seq_len},
          {"learning_rate", c.learning_rate},
          {"weight_decay", c.weight_decay},
          {"grad_clip", c.grad_clip},
          {"batch_size", c.batch_size},
          {"steps", c.steps},
          {"seed", c.seed}};
}

ReaderConfig config_from_json(const nlohmann::json &j, ReaderConfig c) {
  try {
    c.hidden = j.value("hidden", c.hidden);
    c.layers = j.value("layers", c.layers);
    c.heads = j.value("heads", c.heads);
    c.ffn_hidden = j.value("ffn_hidden", c.ffn_hidden);
    c.extractor_hidden = j.value("extractor_hidden", c.extractor_hidden);
    c.max_span = j.value("max_span", c.max_span);
    c.threshold = j.value("threshold", c.threshold);
    c.max_seq_len = j.value("max_seq_len", c.max_seq_len);
    c.learning_rate = j.value("learning_rate", c.learning_rate);
    c.weight_decay = j.value("weight_decay", c.weight_decay);
    c.grad_clip = j.value("grad_clip", c.grad_clip);
    c.batch_size = j.value("batch_size", c.batch_size);
    c.steps = j.value("steps", c.steps);
    c.seed = j.value("seed", c.seed);
  } catch (const nlohmann::json::exception &e) {
    throw DataError(std::string("bad reader config: ") + e.what());
  }
  return c;
}

}  // namespace wikimrc::reader
