#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "wikimrc/reader/model.hpp"

namespace wikimrc::reader {

using FloatReader = Reader<float>;

enum class TrainMode { kPretrain, kFinetune };

struct TrainOptions {
  // Called after every step with the 1-based step and the batch loss.
  // Returning false stops training.
  std::function<bool(std::size_t step, double loss)> on_step;
  // Called with the current model every `inspect_every` steps; returning
  // false stops training.
  std::size_t inspect_every = 0;
  std::function<bool(std::size_t step, const FloatReader &model)> inspect;
};

struct TrainResult {
  FloatReader model;
  std::vector<double> losses;  // one per step
};

// Adam on the span objective over shuffled minibatches. Pretraining starts
// from `initial` when given and from a fresh model otherwise; fine-tuning
// requires `initial` and extends its vocabulary with unseen tokens. All
// randomness derives from config.seed. Throws NumericError naming the step
// and batch when the loss stops being finite.
TrainResult train(const std::vector<taskconv::UnifiedInput> &inputs, const ReaderConfig &config,
                  TrainMode mode, const FloatReader *initial = nullptr,
                  const TrainOptions &options = {});

// Mean per-input loss.
double mean_loss(const FloatReader &model, const std::vector<taskconv::UnifiedInput> &inputs);

taskconv::InputPrediction predict(const FloatReader &model, const taskconv::UnifiedInput &input);

// Binary checkpoint: magic, version, config JSON, vocabulary, then named
// row-major little-endian float32 blocks.
void save_checkpoint(const FloatReader &model, const std::string &path);
FloatReader load_checkpoint(const std::string &path);

// "step,loss" CSV.
void write_loss_csv(const std::vector<double> &losses, const std::string &path);

}  // namespace wikimrc::reader
