#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace wikimrc {

// A word token with its byte range [begin, end) in the source text.
struct Token {
  std::string text;
  std::size_t begin = 0;
  std::size_t end = 0;

  bool operator==(const Token &) const = default;
};

class Tokenizer {
 public:
  virtual ~Tokenizer() = default;
  virtual std::vector<Token> tokenize(std::string_view text) const = 0;
};

// Splits on Unicode whitespace, then peels leading and trailing punctuation
// off each chunk one code point at a time. Inner punctuation ("2-1", "U.S")
// stays attached.
class WhitespacePunctTokenizer : public Tokenizer {
 public:
  std::vector<Token> tokenize(std::string_view text) const override;
};

// One token per non-space code point. Intended for scripts written without
// spaces when no dedicated segmenter is registered.
class CharacterTokenizer : public Tokenizer {
 public:
  std::vector<Token> tokenize(std::string_view text) const override;
};

// Language-keyed tokenizer lookup with a default fallback.
class TokenizerRegistry {
 public:
  TokenizerRegistry();

  void register_language(const std::string &language, std::shared_ptr<const Tokenizer> tok);
  const Tokenizer &for_language(const std::string &language) const;

  static const TokenizerRegistry &global_default();

 private:
  std::shared_ptr<const Tokenizer> fallback_;
  std::map<std::string, std::shared_ptr<const Tokenizer>> by_language_;
};

std::vector<Token> tokenize(std::string_view text, const std::string &language = "en");

std::vector<std::string> token_texts(const std::vector<Token> &tokens);

// Maps a byte range to the inclusive index range of tokens overlapping it.
// Returns nullopt when no token overlaps.
std::optional<std::pair<std::size_t, std::size_t>> char_span_to_tokens(
    const std::vector<Token> &tokens, std::size_t begin, std::size_t end);

}  // namespace wikimrc
