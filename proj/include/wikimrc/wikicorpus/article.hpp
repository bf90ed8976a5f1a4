#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "wikimrc/util/tokenizer.hpp"
#include "wikimrc/wikicorpus/dump_reader.hpp"

namespace wikimrc::wikicorpus {

// An anchor over article tokens [start, end], inclusive on both ends.
struct AnchorMention {
  std::string target;  // normalized title, before redirect resolution
  std::size_t start = 0;
  std::size_t end = 0;
  std::vector<std::string> surface;

  std::size_t width() const { return end - start + 1; }
  bool operator==(const AnchorMention &) const = default;
};

struct Article {
  int64_t article_id = 0;
  std::string language;
  std::string title;
  std::vector<std::string> tokens;
  std::vector<AnchorMention> anchors;

  bool operator==(const Article &) const = default;
};

// Underscores become spaces, whitespace runs collapse, the first code point
// is uppercased. No other case folding.
std::string normalize_title(std::string_view title);

// Strips, tokenizes and maps anchors onto token ranges. Anchors whose
// character range covers no token are dropped; an anchor whose token range
// overlaps the previous kept anchor is dropped.
Article make_article(const RawPage &page, int64_t article_id, const Tokenizer &tokenizer);

// Throws DataError when an article breaks the ordering, bounds or surface
// invariants.
void validate_article(const Article &article);

// articles.jsonl record: {id, lang, title, tokens, anchors:[{target,start,end}]}.
nlohmann::ordered_json article_to_json(const Article &article);
Article article_from_json(const nlohmann::json &j);

}  // namespace wikimrc::wikicorpus
