#include "wikimrc/mrcgen/generator.hpp"

#include <algorithm>
#include <cstdio>
#include <thread>
#include <unordered_set>

#include "wikimrc/util/error.hpp"
#include "wikimrc/util/log.hpp"
#include "wikimrc/util/text.hpp"

namespace wikimrc::mrcgen {

using wikicorpus::AnchorMention;
using wikicorpus::Article;
using wikicorpus::EntityIndex;
using wikicorpus::EntityRecord;

namespace {

constexpr int kStrictAttempts = 64;
constexpr std::size_t kEntitiesPerBatch = 64;

// Title token sequences to mask: the full title and, when the title ends in
// a parenthetical qualifier ("Mercury (planet)"), the bare name.
std::vector<std::vector<std::string>> mask_patterns(std::string_view title,
                                                    const Tokenizer &tokenizer) {
  std::vector<std::vector<std::string>> patterns;
  auto add = [&](std::string_view s) {
    auto toks = token_texts(tokenizer.tokenize(s));
    for (auto &t : toks) t = text::lowercase(t);
    if (!toks.empty() &&
        std::find(patterns.begin(), patterns.end(), toks) == patterns.end()) {
      patterns.push_back(std::move(toks));
    }
  };
  add(title);
  std::string_view trimmed = text::trim(title);
  if (trimmed.ends_with(")")) {
    const auto open = trimmed.rfind(" (");
    if (open != std::string_view::npos && open > 0) add(trimmed.substr(0, open));
  }
  // Longest pattern first so the full title wins over its prefix.
  std::stable_sort(patterns.begin(), patterns.end(),
                   [](const auto &a, const auto &b) { return a.size() > b.size(); });
  return patterns;
}

bool contains_sequence(std::span<const std::string> haystack, std::span<const std::string> needle) {
  if (needle.empty() || needle.size() > haystack.size()) return false;
  return std::search(haystack.begin(), haystack.end(), needle.begin(), needle.end()) !=
         haystack.end();
}

}  // namespace

void GenConfig::validate() const {
  if (query_words == 0) throw UsageError("query length must be at least 1");
  if (context_words == 0) throw UsageError("context length must be at least 1");
  if (answerable_cap == 0 || unanswerable_cap == 0) throw UsageError("caps must be at least 1");
}

Corpus::Corpus(std::vector<Article> articles) : articles_(std::move(articles)) {
  by_id_.reserve(articles_.size());
  for (std::size_t i = 0; i < articles_.size(); ++i) {
    if (!by_id_.emplace(articles_[i].article_id, i).second) {
      throw DataError("duplicate article id " + std::to_string(articles_[i].article_id));
    }
  }
}

const Article *Corpus::find(int64_t id) const {
  auto it = by_id_.find(id);
  return it == by_id_.end() ? nullptr : &articles_[it->second];
}

const Article &Corpus::get(int64_t id) const {
  const Article *a = find(id);
  if (a == nullptr) throw DataError("unknown article id " + std::to_string(id));
  return *a;
}

std::vector<std::string> make_query(const Article &definition, std::string_view entity_title,
                                    std::size_t query_words, const Tokenizer &tokenizer) {
  if (definition.tokens.empty()) {
    throw DataError("definition article '" + definition.title + "' is empty");
  }
  const auto patterns = mask_patterns(entity_title, tokenizer);
  const auto &tokens = definition.tokens;
  std::vector<std::string> lowered;
  lowered.reserve(tokens.size());
  std::vector<std::string> query;
  std::size_t i = 0;
  auto lowered_at = [&](std::size_t k) -> const std::string & {
    while (lowered.size() <= k) lowered.push_back(text::lowercase(tokens[lowered.size()]));
    return lowered[k];
  };
  while (i < tokens.size() && query.size() < query_words) {
    std::size_t matched = 0;
    for (const auto &p : patterns) {
      if (i + p.size() > tokens.size()) continue;
      bool ok = true;
      for (std::size_t k = 0; k < p.size() && ok; ++k) ok = lowered_at(i + k) == p[k];
      if (ok) {
        matched = p.size();
        break;
      }
    }
    if (matched > 0) {
      query.emplace_back(kMaskToken);
      i += matched;
    } else {
      query.push_back(tokens[i]);
      ++i;
    }
  }
  return query;
}

ContextWindow make_context_at(const Article &mention, const AnchorMention &anchor,
                              std::size_t context_words, std::size_t xi) {
  const std::size_t n = mention.tokens.size();
  const std::size_t left = std::min(xi, anchor.start);
  const std::size_t right = std::min(context_words - std::min(xi, context_words), n - 1 - anchor.end);
  ContextWindow w;
  w.xi = xi;
  w.tokens.assign(mention.tokens.begin() + static_cast<std::ptrdiff_t>(anchor.start - left),
                  mention.tokens.begin() + static_cast<std::ptrdiff_t>(anchor.end + right + 1));
  w.answer = TokenSpan{left, left + anchor.width() - 1};
  return w;
}

ContextWindow make_context(const Article &mention, const AnchorMention &anchor,
                           std::size_t context_words, Rng &rng) {
  const auto xi = static_cast<std::size_t>(rng.uniform_int(0, static_cast<int64_t>(context_words)));
  return make_context_at(mention, anchor, context_words, xi);
}

std::vector<TokenSpan> find_identical_spans(std::span<const std::string> context,
                                            std::span<const std::string> surface) {
  std::vector<TokenSpan> spans;
  if (surface.empty()) return spans;
  std::size_t i = 0;
  while (i + surface.size() <= context.size()) {
    if (std::equal(surface.begin(), surface.end(), context.begin() + static_cast<std::ptrdiff_t>(i))) {
      spans.push_back(TokenSpan{i, i + surface.size() - 1});
      i += surface.size();
    } else {
      ++i;
    }
  }
  return spans;
}

UnanswerableDraw sample_unanswerable(const EntityRecord &entity, const EntityIndex &index,
                                     const Corpus &corpus, std::size_t context_words, Rng &rng,
                                     const Tokenizer &tokenizer) {
  std::unordered_set<int64_t> linked;
  for (const auto &m : entity.mentions) linked.insert(m.article_id);
  std::vector<int64_t> candidates;
  for (int64_t id : index.roster(entity.key.language)) {
    if (linked.count(id)) continue;
    const Article *a = corpus.find(id);
    if (a != nullptr && !a->tokens.empty()) candidates.push_back(id);
  }
  if (candidates.empty()) {
    throw DataError("no anchor-free article for entity '" + entity.key.title + "'");
  }
  const auto title_tokens = token_texts(tokenizer.tokenize(entity.key.title));
  auto draw = [&]() {
    const Article &a = corpus.get(candidates[rng.below(candidates.size())]);
    const std::size_t n = a.tokens.size();
    const std::size_t start = n > context_words ? rng.below(n - context_words + 1) : 0;
    const std::size_t stop = std::min(n, start + context_words);
    UnanswerableDraw d;
    d.article_id = a.article_id;
    d.tokens.assign(a.tokens.begin() + static_cast<std::ptrdiff_t>(start),
                    a.tokens.begin() + static_cast<std::ptrdiff_t>(stop));
    return d;
  };
  for (int attempt = 0; attempt < kStrictAttempts; ++attempt) {
    UnanswerableDraw d = draw();
    if (!contains_sequence(d.tokens, title_tokens)) return d;
  }
  UnanswerableDraw d = draw();
  d.relaxed = true;
  return d;
}

void GenerationStats::merge(const GenerationStats &o) {
  entities += o.entities;
  skipped_entities += o.skipped_entities;
  unanswerable_failures += o.unanswerable_failures;
  relaxed_unanswerable += o.relaxed_unanswerable;
  examples += o.examples;
}

std::string example_id(uint64_t seed, const std::string &language, const std::string &entity,
                       uint32_t ordinal) {
  const uint64_t h = stable_hash(seed, {language, entity, std::to_string(ordinal)});
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::vector<MRCExample> generate_for_entity(const EntityRecord &entity, const EntityIndex &index,
                                            const Corpus &corpus, const GenConfig &config,
                                            const TokenizerRegistry &tokenizers,
                                            GenerationStats &stats) {
  std::vector<MRCExample> out;
  ++stats.entities;
  const Article *definition = entity.definition ? corpus.find(*entity.definition) : nullptr;
  if (definition == nullptr || entity.mentions.empty()) {
    ++stats.skipped_entities;
    return out;
  }
  const Tokenizer &tokenizer = tokenizers.for_language(entity.key.language);
  std::vector<std::string> query;
  try {
    query = make_query(*definition, entity.key.title, config.query_words, tokenizer);
  } catch (const DataError &e) {
    logger()->debug("skipping entity: {}", e.what());
    ++stats.skipped_entities;
    return out;
  }
  Rng rng(stable_hash(config.seed, {entity.key.language, entity.key.title}));
  auto make_example = [&](uint32_t ordinal) {
    MRCExample ex;
    ex.id = example_id(config.seed, entity.key.language, entity.key.title, ordinal);
    ex.language = entity.key.language;
    ex.entity = entity.key.title;
    ex.ordinal = ordinal;
    ex.query = query;
    ex.provenance.definition_article = definition->article_id;
    return ex;
  };

  const std::size_t k = std::min(config.answerable_cap, entity.mention_count());
  uint32_t ordinal = 0;
  for (std::size_t pick : rng.sample_without_replacement(entity.mention_count(), k)) {
    const auto &ref = entity.mentions[pick];
    const Article &mention = corpus.get(ref.article_id);
    if (ref.anchor_ordinal >= mention.anchors.size()) {
      throw DataError("mention ordinal out of range in article " + std::to_string(ref.article_id));
    }
    const AnchorMention &anchor = mention.anchors[ref.anchor_ordinal];
    ContextWindow window = make_context(mention, anchor, config.context_words, rng);
    MRCExample ex = make_example(ordinal++);
    ex.answers = find_identical_spans(window.tokens, anchor.surface);
    ex.context = std::move(window.tokens);
    ex.answerable = true;
    ex.provenance.context_article = mention.article_id;
    out.push_back(std::move(ex));
  }

  const std::size_t u = std::min(config.unanswerable_cap, k);
  for (std::size_t j = 0; j < u; ++j) {
    UnanswerableDraw draw;
    try {
      draw = sample_unanswerable(entity, index, corpus, config.context_words, rng, tokenizer);
    } catch (const DataError &e) {
      logger()->debug("no unanswerable side: {}", e.what());
      ++stats.unanswerable_failures;
      break;
    }
    if (draw.relaxed) ++stats.relaxed_unanswerable;
    MRCExample ex = make_example(ordinal++);
    ex.context = std::move(draw.tokens);
    ex.answerable = false;
    ex.provenance.context_article = draw.article_id;
    out.push_back(std::move(ex));
  }
  stats.examples += out.size();
  return out;
}

GenerationStats generate_examples(const EntityIndex &index, const Corpus &corpus,
                                  const GenConfig &config, const TokenizerRegistry &tokenizers,
                                  int workers, const std::function<void(MRCExample &&)> &sink) {
  config.validate();
  std::vector<const EntityRecord *> entities;
  for (const auto &[key, record] : index.entities()) {
    if (config.languages.empty() || config.languages.count(key.language)) entities.push_back(&record);
  }
  GenerationStats total;
  const std::size_t n_workers = std::max(1, workers);
  for (std::size_t base = 0; base < entities.size(); base += kEntitiesPerBatch) {
    const std::size_t count = std::min(kEntitiesPerBatch, entities.size() - base);
    std::vector<std::vector<MRCExample>> results(count);
    std::vector<GenerationStats> partial(n_workers);
    auto work = [&](std::size_t w) {
      for (std::size_t i = w; i < count; i += n_workers) {
        results[i] = generate_for_entity(*entities[base + i], index, corpus, config, tokenizers,
                                         partial[w]);
      }
    };
    if (n_workers == 1) {
      work(0);
    } else {
      std::vector<std::jthread> threads;
      for (std::size_t w = 0; w < n_workers; ++w) threads.emplace_back(work, w);
    }
    for (const auto &p : partial) total.merge(p);
    for (auto &group : results) {
      for (auto &ex : group) sink(std::move(ex));
    }
  }
  if (total.skipped_entities > 0 || total.unanswerable_failures > 0) {
    logger()->info("generation skipped {} entities; {} entities lacked an unanswerable side",
                   total.skipped_entities, total.unanswerable_failures);
  }
  return total;
}

nlohmann::ordered_json example_to_json(const MRCExample &example) {
  nlohmann::ordered_json j;
  j["id"] = example.id;
  j["lang"] = example.language;
  j["entity"] = example.entity;
  j["query"] = example.query;
  j["context"] = example.context;
  auto answers = nlohmann::ordered_json::array();
  for (const auto &s : example.answers) answers.push_back({s.start, s.end});
  j["answers"] = std::move(answers);
  j["answerable"] = example.answerable;
  return j;
}

MRCExample example_from_json(const nlohmann::json &j) {
  try {
    MRCExample ex;
    ex.id = j.at("id").get<std::string>();
    ex.language = j.value("lang", std::string());
    ex.entity = j.value("entity", std::string());
    ex.query = j.at("query").get<std::vector<std::string>>();
    ex.context = j.at("context").get<std::vector<std::string>>();
    for (const auto &a : j.at("answers")) {
      TokenSpan s{a.at(0).get<std::size_t>(), a.at(1).get<std::size_t>()};
      if (s.start > s.end || s.end >= ex.context.size()) {
        throw DataError("example " + ex.id + ": answer span out of range");
      }
      ex.answers.push_back(s);
    }
    ex.answerable = j.at("answerable").get<bool>();
    return ex;
  } catch (const nlohmann::json::exception &e) {
    throw DataError(std::string("bad mrc record: ") + e.what());
  }
}

}  // namespace wikimrc::mrcgen
