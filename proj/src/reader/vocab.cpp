#include "wikimrc/reader/vocab.hpp"

#include "wikimrc/util/error.hpp"

namespace wikimrc::reader {
namespace {
const char *const kReserved[] = {"[UNK]", "[CLS]", "[SEP]", "[MASK]"};
}  // namespace

Vocabulary::Vocabulary() {
  for (const char *t : kReserved) add(t);
}

int32_t Vocabulary::add(std::string_view token) {
  auto it = ids_.find(std::string(token));
  if (it != ids_.end()) return it->second;
  const auto id = static_cast<int32_t>(tokens_.size());
  tokens_.emplace_back(token);
  ids_.emplace(tokens_.back(), id);
  return id;
}

std::size_t Vocabulary::add_from(const std::vector<taskconv::UnifiedInput> &inputs) {
  const std::size_t before = size();
  for (const auto &in : inputs) {
    for (const auto &t : in.query) add(t);
    for (const auto &t : in.context) add(t);
  }
  return size() - before;
}

int32_t Vocabulary::id(std::string_view token) const {
  auto it = ids_.find(std::string(token));
  return it == ids_.end() ? kUnkId : it->second;
}

Vocabulary Vocabulary::from_tokens(std::vector<std::string> tokens) {
  if (tokens.size() < 4) throw DataError("vocabulary is missing reserved tokens");
  for (int i = 0; i < 4; ++i) {
    if (tokens[static_cast<std::size_t>(i)] != kReserved[i]) {
      throw DataError("vocabulary does not start with the reserved tokens");
    }
  }
  Vocabulary v;
  for (std::size_t i = 4; i < tokens.size(); ++i) {
    if (v.add(tokens[i]) != static_cast<int32_t>(i)) throw DataError("duplicate vocabulary entry " + tokens[i]);
  }
  return v;
}

}  // namespace wikimrc::reader
