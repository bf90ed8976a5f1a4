#pragma once

#include <string>
#include <vector>

#include "wikimrc/reader/train.hpp"
#include "wikimrc/taskconv/convert.hpp"

// Task-level inference: convert an instance, run the reader on every input
// and decode back to the task's native output.
namespace wikimrc::reader {

// Best extracted answer string; empty when the reader abstains.
std::string predict_eqa(const FloatReader &model, const taskconv::EqaInstance &instance);

std::vector<taskconv::TypedSpan> predict_tagging(const FloatReader &model,
                                                 const taskconv::TaggingInstance &instance,
                                                 const taskconv::Scheme &scheme,
                                                 const Tokenizer &tokenizer);

std::string predict_pair(const FloatReader &model, const taskconv::PairInstance &instance,
                         const taskconv::Scheme &scheme, const Tokenizer &tokenizer);

}  // namespace wikimrc::reader
