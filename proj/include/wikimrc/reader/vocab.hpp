#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "wikimrc/taskconv/unified.hpp"

namespace wikimrc::reader {

inline constexpr int32_t kUnkId = 0;
inline constexpr int32_t kClsId = 1;
inline constexpr int32_t kSepId = 2;
inline constexpr int32_t kMaskId = 3;

// Token strings to embedding rows. Ids 0-3 are [UNK], [CLS], [SEP], [MASK].
class Vocabulary {
 public:
  Vocabulary();

  // Adds unseen tokens in first-seen order and returns how many were added.
  std::size_t add_from(const std::vector<taskconv::UnifiedInput> &inputs);
  int32_t add(std::string_view token);

  int32_t id(std::string_view token) const;  // kUnkId when absent
  const std::string &token(int32_t id) const { return tokens_.at(static_cast<std::size_t>(id)); }
  std::size_t size() const { return tokens_.size(); }
  const std::vector<std::string> &tokens() const { return tokens_; }

  // Rebuilds from a stored token list; the reserved tokens must lead it.
  static Vocabulary from_tokens(std::vector<std::string> tokens);

  bool operator==(const Vocabulary &o) const { return tokens_ == o.tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int32_t> ids_;
};

}  // namespace wikimrc::reader
