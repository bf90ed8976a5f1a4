#pragma once

#include <cstdint>
#include <functional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "wikimrc/util/random.hpp"
#include "wikimrc/util/span.hpp"
#include "wikimrc/util/tokenizer.hpp"
#include "wikimrc/wikicorpus/article.hpp"
#include "wikimrc/wikicorpus/entity_index.hpp"

namespace wikimrc::mrcgen {

inline constexpr std::string_view kMaskToken = "[MASK]";

struct GenConfig {
  std::size_t query_words = 50;
  std::size_t context_words = 200;
  std::size_t answerable_cap = 10;
  std::size_t unanswerable_cap = 10;
  uint64_t seed = 0;
  std::set<std::string> languages;  // empty: all

  // Throws UsageError on a zero length or cap.
  void validate() const;
};

struct Provenance {
  int64_t definition_article = 0;
  int64_t context_article = 0;

  bool operator==(const Provenance &) const = default;
};

struct MRCExample {
  std::string id;
  std::string language;
  std::string entity;
  uint32_t ordinal = 0;
  std::vector<std::string> query;
  std::vector<std::string> context;
  std::vector<TokenSpan> answers;  // context coordinates, sorted
  bool answerable = false;
  Provenance provenance;

  bool operator==(const MRCExample &) const = default;
};

// Read-only article lookup by id.
class Corpus {
 public:
  Corpus() = default;
  explicit Corpus(std::vector<wikicorpus::Article> articles);

  const wikicorpus::Article *find(int64_t id) const;
  const wikicorpus::Article &get(int64_t id) const;  // throws DataError
  const std::vector<wikicorpus::Article> &articles() const { return articles_; }

 private:
  std::vector<wikicorpus::Article> articles_;
  std::unordered_map<int64_t, std::size_t> by_id_;
};

// First `query_words` words of the definition article with every
// case-insensitive occurrence of the title (and of the title without a
// trailing parenthetical qualifier) replaced by one [MASK] token. Masking
// runs before truncation. Throws DataError on an empty definition.
std::vector<std::string> make_query(const wikicorpus::Article &definition,
                                    std::string_view entity_title, std::size_t query_words,
                                    const Tokenizer &tokenizer);

struct ContextWindow {
  std::vector<std::string> tokens;
  TokenSpan answer;      // primary answer span in window coordinates
  std::size_t xi = 0;    // requested words before the anchor
};

// Window with min(xi, available) words before the anchor, the anchor, and
// min(C - xi, available) words after it.
ContextWindow make_context_at(const wikicorpus::Article &mention,
                              const wikicorpus::AnchorMention &anchor, std::size_t context_words,
                              std::size_t xi);

// Same, with xi drawn uniformly from {0, ..., C}.
ContextWindow make_context(const wikicorpus::Article &mention,
                           const wikicorpus::AnchorMention &anchor, std::size_t context_words,
                           Rng &rng);

// Every exact token-level occurrence of `surface`, leftmost-greedy and
// non-overlapping. `surface` must be non-empty.
std::vector<TokenSpan> find_identical_spans(std::span<const std::string> context,
                                            std::span<const std::string> surface);

struct UnanswerableDraw {
  std::vector<std::string> tokens;
  int64_t article_id = 0;
  bool relaxed = false;
};

// Draws a C-word window from a same-language article with no anchor to the
// entity and, for up to 64 attempts, no exact occurrence of the title
// tokens; after that the title condition is dropped. Throws DataError when
// no article qualifies.
UnanswerableDraw sample_unanswerable(const wikicorpus::EntityRecord &entity,
                                     const wikicorpus::EntityIndex &index, const Corpus &corpus,
                                     std::size_t context_words, Rng &rng,
                                     const Tokenizer &tokenizer);

struct GenerationStats {
  std::size_t entities = 0;
  std::size_t skipped_entities = 0;
  std::size_t unanswerable_failures = 0;
  std::size_t relaxed_unanswerable = 0;
  std::size_t examples = 0;

  void merge(const GenerationStats &o);
};

// All examples for one entity. Randomness comes from a generator keyed by
// (seed, language, title), so the result does not depend on which entities
// were processed before it.
std::vector<MRCExample> generate_for_entity(const wikicorpus::EntityRecord &entity,
                                            const wikicorpus::EntityIndex &index,
                                            const Corpus &corpus, const GenConfig &config,
                                            const TokenizerRegistry &tokenizers,
                                            GenerationStats &stats);

// Runs generate_for_entity over the index on `workers` threads and hands
// examples to `sink` in canonical (language, entity, ordinal) order.
// Per-entity failures are counted and skipped.
GenerationStats generate_examples(const wikicorpus::EntityIndex &index, const Corpus &corpus,
                                  const GenConfig &config, const TokenizerRegistry &tokenizers,
                                  int workers, const std::function<void(MRCExample &&)> &sink);

std::string example_id(uint64_t seed, const std::string &language, const std::string &entity,
                       uint32_t ordinal);

// mrc.jsonl: {id, lang, entity, query, context, answers, answerable}.
nlohmann::ordered_json example_to_json(const MRCExample &example);
MRCExample example_from_json(const nlohmann::json &j);

}  // namespace wikimrc::mrcgen
