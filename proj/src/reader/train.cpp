#include "wikimrc/reader/train.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

#include <fmt/format.h>

namespace wikimrc::reader {
namespace {

constexpr char kMagic[8] = {'W', 'I', 'K', 'I', 'M', 'R', 'C', '\0'};
constexpr uint32_t kVersion = 1;

class Adam {
 public:
  explicit Adam(const ParamSet<float> &params)
      : m_(params.zeros_like()), v_(params.zeros_like()) {}

  void step(ParamSet<float> &params, const ParamSet<float> &grads, double lr, double decay) {
    ++t_;
    const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(t_));
    const auto step = static_cast<float>(lr * std::sqrt(c2) / c1);
    for (std::size_t b = 0; b < params.size(); ++b) {
      auto &p = params[b];
      const auto &g = grads[b];
      auto &m = m_[b];
      auto &v = v_[b];
      m = kBeta1 * m + (1.0f - kBeta1) * g;
      v = kBeta2 * v + (1.0f - kBeta2) * g.cwiseProduct(g);
      if (decay > 0 && params.blocks()[b].name.ends_with(".weight")) {
        p *= static_cast<float>(1.0 - lr * decay);
      }
      p.array() -= step * m.array() / (v.array().sqrt() + kEps);
    }
  }

 private:
  static constexpr float kBeta1 = 0.9f;
  static constexpr float kBeta2 = 0.999f;
  static constexpr float kEps = 1e-8f;
  ParamSet<float> m_, v_;
  uint64_t t_ = 0;
};

double global_norm(const ParamSet<float> &grads) {
  double sq = 0;
  for (const auto &b : grads.blocks()) sq += static_cast<double>(b.value.squaredNorm());
  return std::sqrt(sq);
}

template <typename U>
void put(std::ostream &out, U value) {
  static_assert(std::is_trivially_copyable_v<U>);
  unsigned char bytes[sizeof(U)];
  std::memcpy(bytes, &value, sizeof(U));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(U));
  out.write(reinterpret_cast<const char *>(bytes), sizeof(U));
}

template <typename U>
U get(std::istream &in, const std::string &path) {
  unsigned char bytes[sizeof(U)];
  if (!in.read(reinterpret_cast<char *>(bytes), sizeof(U))) {
    throw DataError("checkpoint " + path + " is truncated");
  }
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(U));
  U value;
  std::memcpy(&value, bytes, sizeof(U));
  return value;
}

void put_string(std::ostream &out, const std::string &s) {
  put<uint32_t>(out, static_cast<uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string get_string(std::istream &in, const std::string &path) {
  const auto n = get<uint32_t>(in, path);
  if (n > (1u << 28)) throw DataError("checkpoint " + path + " has an implausible string length");
  std::string s(n, '\0');
  if (n > 0 && !in.read(s.data(), n)) throw DataError("checkpoint " + path + " is truncated");
  return s;
}

}  // namespace

TrainResult train(const std::vector<taskconv::UnifiedInput> &inputs, const ReaderConfig &config,
                  TrainMode mode, const FloatReader *initial, const TrainOptions &options) {
  config.validate();
  TrainResult result;
  if (mode == TrainMode::kFinetune && initial == nullptr) {
    throw UsageError("fine-tuning needs an initial model");
  }
  if (initial != nullptr) {
    if (!initial->config().same_architecture(config)) {
      throw UsageError("configured architecture differs from the initial model");
    }
    result.model = *initial;
    ReaderConfig &c = result.model.mutable_config();
    const ReaderConfig arch = c;
    c = config;
    c.ffn_hidden = arch.ffn_width();
    c.extractor_hidden = arch.extractor_width();
    if (c.max_seq_len > arch.max_seq_len) {
      throw UsageError("maximum sequence length cannot grow beyond the initial model's");
    }
    const std::size_t added =
        result.model.extend_vocab(inputs, stable_hash(config.seed, {"vocab-extension"}));
    if (added > 0) logger()->info("vocabulary extended by {} tokens", added);
  } else {
    Vocabulary vocab;
    vocab.add_from(inputs);
    result.model = FloatReader::initialize(config, std::move(vocab), stable_hash(config.seed, {"init"}));
  }
  if (config.steps == 0 || inputs.empty()) {
    if (inputs.empty() && config.steps > 0) logger()->warn("no training inputs; model left unchanged");
    return result;
  }

  FloatReader &model = result.model;
  std::vector<PreparedInput> prepared;
  prepared.reserve(inputs.size());
  for (const auto &in : inputs) prepared.push_back(model.prepare(in));

  Rng order_rng(stable_hash(config.seed, {"order"}));
  std::vector<std::size_t> order(prepared.size());
  std::size_t cursor = order.size();
  Adam adam(model.params());
  ParamSet<float> grads = model.params().zeros_like();
  const std::size_t batch = std::min(config.batch_size, prepared.size());
  result.losses.reserve(config.steps);
  for (std::size_t step = 1; step <= config.steps; ++step) {
    grads.set_zero();
    double batch_loss = 0;
    std::vector<std::size_t> members;
    for (std::size_t b = 0; b < batch; ++b) {
      if (cursor == order.size()) {
        std::iota(order.begin(), order.end(), 0);
        order_rng.shuffle(order);
        cursor = 0;
      }
      members.push_back(order[cursor++]);
    }
    const float weight = 1.0f / static_cast<float>(batch);
    for (std::size_t idx : members) {
      batch_loss += static_cast<double>(model.loss(prepared[idx], &grads, weight));
    }
    batch_loss /= static_cast<double>(batch);
    const double norm = global_norm(grads);
    if (!std::isfinite(batch_loss) || !std::isfinite(norm)) {
      std::string ids;
      for (std::size_t idx : members) ids += (ids.empty() ? "" : ",") + inputs[idx].id;
      throw NumericError(fmt::format("non-finite loss at step {} (batch {}: {})", step, step - 1, ids));
    }
    if (config.grad_clip > 0 && norm > config.grad_clip) {
      const auto s = static_cast<float>(config.grad_clip / norm);
      for (auto &b : grads.blocks()) b.value *= s;
    }
    adam.step(model.params(), grads, config.learning_rate, config.weight_decay);
    result.losses.push_back(batch_loss);
    if (options.on_step && !options.on_step(step, batch_loss)) break;
    if (options.inspect && options.inspect_every > 0 && step % options.inspect_every == 0 &&
        !options.inspect(step, model)) {
      break;
    }
  }
  return result;
}

double mean_loss(const FloatReader &model, const std::vector<taskconv::UnifiedInput> &inputs) {
  if (inputs.empty()) return 0.0;
  double total = 0;
  for (const auto &in : inputs) total += static_cast<double>(model.loss(model.prepare(in)));
  return total / static_cast<double>(inputs.size());
}

taskconv::InputPrediction predict(const FloatReader &model, const taskconv::UnifiedInput &input) {
  return to_prediction(model.score(input), model.config().threshold);
}

void save_checkpoint(const FloatReader &model, const std::string &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write checkpoint " + path);
  out.write(kMagic, sizeof(kMagic));
  put<uint32_t>(out, kVersion);
  put_string(out, config_to_json(model.config()).dump());
  put<uint32_t>(out, static_cast<uint32_t>(model.vocab().size()));
  for (const auto &t : model.vocab().tokens()) put_string(out, t);
  const auto &blocks = model.params().blocks();
  put<uint32_t>(out, static_cast<uint32_t>(blocks.size()));
  for (const auto &b : blocks) {
    put_string(out, b.name);
    put<uint32_t>(out, static_cast<uint32_t>(b.value.rows()));
    put<uint32_t>(out, static_cast<uint32_t>(b.value.cols()));
    for (Eigen::Index i = 0; i < b.value.size(); ++i) put<float>(out, b.value.data()[i]);
  }
  if (!out) throw DataError("failed writing checkpoint " + path);
}

FloatReader load_checkpoint(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint " + path);
  char magic[sizeof(kMagic)];
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw DataError(path + " is not a reader checkpoint");
  }
  const auto version = get<uint32_t>(in, path);
  if (version != kVersion) {
    throw DataError(fmt::format("checkpoint {} has version {}, expected {}", path, version, kVersion));
  }
  ReaderConfig config;
  try {
    config = config_from_json(nlohmann::json::parse(get_string(in, path)));
  } catch (const nlohmann::json::exception &e) {
    throw DataError("checkpoint " + path + " has a corrupt config: " + e.what());
  }
  const auto vocab_size = get<uint32_t>(in, path);
  std::vector<std::string> tokens;
  tokens.reserve(vocab_size);
  for (uint32_t i = 0; i < vocab_size; ++i) tokens.push_back(get_string(in, path));
  ParamSet<float> params;
  const auto blocks = get<uint32_t>(in, path);
  for (uint32_t b = 0; b < blocks; ++b) {
    const std::string name = get_string(in, path);
    const auto rows = get<uint32_t>(in, path);
    const auto cols = get<uint32_t>(in, path);
    if (static_cast<uint64_t>(rows) * cols > (1ull << 31)) {
      throw DataError("checkpoint " + path + " has an implausible block " + name);
    }
    const std::size_t i = params.add(name, rows, cols);
    for (Eigen::Index k = 0; k < params[i].size(); ++k) params[i].data()[k] = get<float>(in, path);
  }
  return FloatReader::from_parts(config, Vocabulary::from_tokens(std::move(tokens)), std::move(params));
}

void write_loss_csv(const std::vector<double> &losses, const std::string &path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  out << "step,loss\n";
  for (std::size_t i = 0; i < losses.size(); ++i) out << fmt::format("{},{:.9g}\n", i + 1, losses[i]);
}

}  // namespace wikimrc::reader
