#include "wikimrc/util/tokenizer.hpp"

#include <algorithm>

#include "wikimrc/util/text.hpp"

namespace wikimrc {
namespace {

struct CodePoint {
  char32_t cp;
  std::size_t begin;
  std::size_t end;
};

std::vector<CodePoint> decode(std::string_view s, std::size_t begin, std::size_t end) {
  std::vector<CodePoint> out;
  std::size_t pos = begin;
  while (pos < end) {
    const std::size_t start = pos;
    const char32_t cp = text::next_code_point(s, pos);
    out.push_back({cp, start, pos});
  }
  return out;
}

void emit(std::vector<Token> &out, std::string_view s, std::size_t begin, std::size_t end) {
  out.push_back(Token{std::string(s.substr(begin, end - begin)), begin, end});
}

}  // namespace

std::vector<Token> WhitespacePunctTokenizer::tokenize(std::string_view s) const {
  std::vector<Token> out;
  std::size_t pos = 0;
  while (pos < s.size()) {
    // Skip whitespace.
    std::size_t probe = pos;
    if (text::is_space(text::next_code_point(s, probe))) {
      pos = probe;
      continue;
    }
    std::size_t chunk_end = pos;
    while (chunk_end < s.size()) {
      std::size_t next = chunk_end;
      if (text::is_space(text::next_code_point(s, next))) break;
      chunk_end = next;
    }
    const auto cps = decode(s, pos, chunk_end);
    std::size_t lo = 0;
    std::size_t hi = cps.size();
    while (lo < hi && text::is_punct(cps[lo].cp)) {
      emit(out, s, cps[lo].begin, cps[lo].end);
      ++lo;
    }
    std::vector<Token> trailing;
    while (hi > lo && text::is_punct(cps[hi - 1].cp)) {
      trailing.push_back(Token{std::string(s.substr(cps[hi - 1].begin, cps[hi - 1].end - cps[hi - 1].begin)),
                               cps[hi - 1].begin, cps[hi - 1].end});
      --hi;
    }
    if (lo < hi) emit(out, s, cps[lo].begin, cps[hi - 1].end);
    out.insert(out.end(), trailing.rbegin(), trailing.rend());
    pos = chunk_end;
  }
  return out;
}

std::vector<Token> CharacterTokenizer::tokenize(std::string_view s) const {
  std::vector<Token> out;
  for (const auto &cp : decode(s, 0, s.size())) {
    if (!text::is_space(cp.cp)) emit(out, s, cp.begin, cp.end);
  }
  return out;
}

TokenizerRegistry::TokenizerRegistry()
    : fallback_(std::make_shared<WhitespacePunctTokenizer>()) {}

void TokenizerRegistry::register_language(const std::string &language,
                                          std::shared_ptr<const Tokenizer> tok) {
  by_language_[language] = std::move(tok);
}

const Tokenizer &TokenizerRegistry::for_language(const std::string &language) const {
  auto it = by_language_.find(language);
  return it == by_language_.end() ? *fallback_ : *it->second;
}

const TokenizerRegistry &TokenizerRegistry::global_default() {
  static const TokenizerRegistry registry;
  return registry;
}

std::vector<Token> tokenize(std::string_view text, const std::string &language) {
  return TokenizerRegistry::global_default().for_language(language).tokenize(text);
}

std::vector<std::string> token_texts(const std::vector<Token> &tokens) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto &t : tokens) out.push_back(t.text);
  return out;
}

std::optional<std::pair<std::size_t, std::size_t>> char_span_to_tokens(
    const std::vector<Token> &tokens, std::size_t begin, std::size_t end) {
  // First token ending after `begin`.
  auto first = std::partition_point(tokens.begin(), tokens.end(),
                                    [begin](const Token &t) { return t.end <= begin; });
  if (first == tokens.end() || first->begin >= end) return std::nullopt;
  auto last = first;
  while (last + 1 != tokens.end() && (last + 1)->begin < end) ++last;
  return std::make_pair(static_cast<std::size_t>(first - tokens.begin()),
                        static_cast<std::size_t>(last - tokens.begin()));
}

}  // namespace wikimrc
