#include "wikimrc/reader/tasks.hpp"

namespace wikimrc::reader {

std::string predict_eqa(const FloatReader &model, const taskconv::EqaInstance &instance) {
  taskconv::UnifiedInput input = taskconv::assemble(instance.question, instance.context, {});
  input.id = instance.id;
  input.language = instance.language;
  input.task = "eqa";
  return taskconv::decode_eqa(input, predict(model, input));
}

std::vector<taskconv::TypedSpan> predict_tagging(const FloatReader &model,
                                                 const taskconv::TaggingInstance &instance,
                                                 const taskconv::Scheme &scheme,
                                                 const Tokenizer &tokenizer) {
  taskconv::TaggingInstance bare = instance;
  bare.spans.clear();
  const auto inputs = taskconv::convert_tagging(bare, scheme, tokenizer);
  std::vector<taskconv::InputPrediction> predictions;
  predictions.reserve(inputs.size());
  for (const auto &in : inputs) predictions.push_back(predict(model, in));
  return taskconv::decode_tagging(inputs, predictions);
}

std::string predict_pair(const FloatReader &model, const taskconv::PairInstance &instance,
                         const taskconv::Scheme &scheme, const Tokenizer &tokenizer) {
  taskconv::PairInstance bare = instance;
  bare.label.reset();
  const auto inputs = taskconv::convert_pair(bare, scheme, taskconv::PairMode::kClassification, tokenizer);
  std::vector<taskconv::InputPrediction> predictions;
  predictions.reserve(inputs.size());
  for (const auto &in : inputs) predictions.push_back(predict(model, in));
  return taskconv::decode_pair(inputs, predictions);
}

}  // namespace wikimrc::reader
