#include <gtest/gtest.h>

#include <sstream>

#include <fmt/format.h>

#include "wikimrc/mrcgen/generator.hpp"
#include "wikimrc/mrcgen/stats.hpp"

namespace wikimrc::mrcgen {
namespace {

using wikicorpus::AnchorMention;
using wikicorpus::Article;
using wikicorpus::EntityIndex;
using wikicorpus::EntityRecord;

std::vector<std::string> words(const std::string &s) { return token_texts(tokenize(s)); }

Article article(int64_t id, const std::string &title, const std::string &text, const std::string &lang = "en") {
  Article a;
  a.article_id = id;
  a.language = lang;
  a.title = title;
  a.tokens = words(text);
  return a;
}

void link(Article &a, std::size_t start, std::size_t end, const std::string &target) {
  AnchorMention m;
  m.target = target;
  m.start = start;
  m.end = end;
  m.surface.assign(a.tokens.begin() + static_cast<std::ptrdiff_t>(start),
                   a.tokens.begin() + static_cast<std::ptrdiff_t>(end) + 1);
  a.anchors.push_back(m);
}

Article filler(int64_t id, std::size_t n, const std::string &word = "w") {
  std::string text;
  for (std::size_t i = 0; i < n; ++i) text += fmt::format("{}{} ", word, i);
  return article(id, fmt::format("Filler {}", id), text);
}

TEST(MakeQuery, MasksTitle) {
  const auto def = article(1, "Japan", "Japan is an island country . JAPAN has many islands .");
  const auto q = make_query(def, "Japan", 50, WhitespacePunctTokenizer());
  EXPECT_EQ(q, (std::vector<std::string>{"[MASK]", "is", "an", "island", "country", ".", "[MASK]", "has", "many",
                                        "islands", "."}));
}

TEST(MakeQuery, MultiWordTitleBecomesOneMask) {
  const auto def = article(1, "New Tarrin", "New Tarrin is a city . new tarrin grew .");
  const auto q = make_query(def, "New Tarrin", 4, WhitespacePunctTokenizer());
  EXPECT_EQ(q, (std::vector<std::string>{"[MASK]", "is", "a", "city"}));
}

TEST(MakeQuery, QualifierStrippedTitleIsMasked) {
  const auto def = article(1, "Mercury (planet)", "Mercury is the smallest planet .");
  EXPECT_EQ(make_query(def, "Mercury (planet)", 50, WhitespacePunctTokenizer())[0], "[MASK]");
}

TEST(MakeQuery, NoTitleNoMask) {
  const auto def = article(1, "Japan", "An island country in Asia .");
  const auto q = make_query(def, "Japan", 50, WhitespacePunctTokenizer());
  EXPECT_EQ(std::count(q.begin(), q.end(), "[MASK]"), 0);
}

TEST(MakeQuery, ShortDefinitionReturnedWhole) {
  const auto def = filler(1, 30);
  EXPECT_EQ(make_query(def, "Zzz", 50, WhitespacePunctTokenizer()).size(), 30u);
}

TEST(MakeQuery, EmptyDefinitionThrows) {
  EXPECT_THROW(make_query(article(1, "X", ""), "X", 50, WhitespacePunctTokenizer()), DataError);
}

Article long_mention(std::size_t before, std::size_t after, std::size_t anchor_width = 2) {
  Article a = filler(9, before + anchor_width + after);
  for (std::size_t k = 0; k < anchor_width; ++k) a.tokens[before + k] = fmt::format("Anchor{}", k);
  link(a, before, before + anchor_width - 1, "Target");
  return a;
}

TEST(MakeContext, XiZeroStartsWithAnchor) {
  const auto a = long_mention(300, 300);
  const auto w = make_context_at(a, a.anchors[0], 200, 0);
  EXPECT_EQ(w.answer, (TokenSpan{0, 1}));
  EXPECT_EQ(w.tokens[0], "Anchor0");
  EXPECT_EQ(w.tokens.size(), 202u);
}

TEST(MakeContext, XiEqualsCPutsAnchorLast) {
  const auto a = long_mention(300, 300);
  const auto w = make_context_at(a, a.anchors[0], 200, 200);
  EXPECT_EQ(w.answer, (TokenSpan{200, 201}));
  EXPECT_EQ(w.tokens.size(), 202u);
  EXPECT_EQ(w.tokens.back(), "Anchor1");
}

TEST(MakeContext, ClipsAtArticleStart) {
  const auto a = long_mention(3, 300);
  const auto w = make_context_at(a, a.anchors[0], 200, 80);
  EXPECT_EQ(w.answer.start, 3u);
  EXPECT_EQ(w.tokens.size(), 3u + 2u + 120u);
}

TEST(MakeContext, RandomXiWithinBounds) {
  const auto a = long_mention(300, 300);
  Rng rng(1);
  for (int i = 0; i < 200; ++i) {
    const auto w = make_context(a, a.anchors[0], 50, rng);
    ASSERT_LE(w.xi, 50u);
    ASSERT_EQ(w.answer.start, w.xi);
    ASSERT_LE(w.tokens.size(), 52u);
  }
}

TEST(FindIdenticalSpans, RepeatedSingleToken) {
  const auto ctx = words("x Japan y Japan z");
  const std::vector<std::string> s{"Japan"};
  EXPECT_EQ(find_identical_spans(ctx, s), (std::vector<TokenSpan>{{1, 1}, {3, 3}}));
}

TEST(FindIdenticalSpans, MultiToken) {
  const auto ctx = words("an Asian Cup victory");
  const std::vector<std::string> s{"Asian", "Cup"};
  EXPECT_EQ(find_identical_spans(ctx, s), (std::vector<TokenSpan>{{1, 2}}));
}

TEST(FindIdenticalSpans, SelfOverlapIsLeftmostGreedy) {
  const std::vector<std::string> ctx{"a", "a", "a"};
  const std::vector<std::string> s{"a", "a"};
  EXPECT_EQ(find_identical_spans(ctx, s), (std::vector<TokenSpan>{{0, 1}}));
}

TEST(FindIdenticalSpans, CaseSensitive) {
  const auto ctx = words("japan Japan");
  const std::vector<std::string> s{"Japan"};
  EXPECT_EQ(find_identical_spans(ctx, s).size(), 1u);
}

struct World {
  std::vector<Article> articles;
  EntityIndex index;
};

// Entity "Japan" with a definition article, `mentions` mention articles and
// `others` unrelated articles.
World japan_world(std::size_t mentions, std::size_t others, std::size_t other_len = 40) {
  World w;
  w.articles.push_back(article(1, "Japan", "Japan is an island country in East Asia ."));
  int64_t id = 2;
  EntityRecord rec;
  rec.key = {"en", "Japan"};
  rec.definition = 1;
  for (std::size_t i = 0; i < mentions; ++i, ++id) {
    Article a = article(id, fmt::format("M{}", i), fmt::format("Teams from Japan met {} times . Japan won .", i));
    link(a, 2, 2, "Japan");
    w.articles.push_back(a);
    rec.mentions.push_back({id, 0});
  }
  for (std::size_t i = 0; i < others; ++i, ++id) w.articles.push_back(filler(id, other_len));
  w.index.insert(rec);
  w.index.rebuild_rosters(w.articles);
  return w;
}

TEST(SampleUnanswerable, DrawsFromTheOnlyCleanArticle) {
  auto w = japan_world(1, 1);
  const Corpus corpus(w.articles);
  const auto &rec = w.index.entities().begin()->second;
  Rng rng(4);
  for (int i = 0; i < 20; ++i) {
    const auto d = sample_unanswerable(rec, w.index, corpus, 200, rng, WhitespacePunctTokenizer());
    EXPECT_EQ(d.article_id, 3);
    EXPECT_EQ(d.tokens.size(), 40u);
    EXPECT_FALSE(d.relaxed);
  }
}

TEST(SampleUnanswerable, RelaxesTitleConditionWhenEveryWindowHasIt) {
  auto w = japan_world(1, 0);
  w.articles[0] = article(1, "Japan", "Japan Japan Japan");
  w.articles.push_back(article(50, "Other", "Japan Japan Japan"));
  w.index.rebuild_rosters(w.articles);
  const Corpus corpus(w.articles);
  Rng rng(4);
  const auto d = sample_unanswerable(w.index.entities().begin()->second, w.index, corpus, 2, rng,
                                     WhitespacePunctTokenizer());
  EXPECT_TRUE(d.relaxed);
  EXPECT_TRUE(d.article_id == 1 || d.article_id == 50) << d.article_id;
}

TEST(SampleUnanswerable, NoCandidateThrows) {
  auto w = japan_world(1, 0);
  w.articles.erase(w.articles.begin());
  const Corpus corpus(w.articles);
  Rng rng(4);
  EXPECT_THROW(sample_unanswerable(w.index.entities().begin()->second, w.index, corpus, 10, rng,
                                   WhitespacePunctTokenizer()),
               DataError);
}

TEST(Generate, CapArithmetic) {
  auto w = japan_world(12, 3);
  const Corpus corpus(w.articles);
  GenConfig cfg;
  GenerationStats stats;
  const auto ex = generate_for_entity(w.index.entities().begin()->second, w.index, corpus, cfg,
                                      TokenizerRegistry::global_default(), stats);
  ASSERT_EQ(ex.size(), 20u);
  std::size_t answerable = 0;
  for (const auto &e : ex) answerable += e.answerable;
  EXPECT_EQ(answerable, 10u);
  for (const auto &e : ex) {
    EXPECT_EQ(e.answerable, !e.answers.empty());
    for (const auto &s : e.answers) EXPECT_EQ(e.context[s.start], "Japan");
    EXPECT_LE(e.query.size(), 50u);
    EXPECT_EQ(std::count(e.query.begin(), e.query.end(), "Japan"), 0);
  }
}

TEST(Generate, FewerMentionsFewerExamples) {
  auto w = japan_world(4, 3);
  const Corpus corpus(w.articles);
  GenerationStats stats;
  const auto ex = generate_for_entity(w.index.entities().begin()->second, w.index, corpus, GenConfig{},
                                      TokenizerRegistry::global_default(), stats);
  EXPECT_EQ(ex.size(), 8u);
}

TEST(Generate, FilteredEntityYieldsNothing) {
  auto w = japan_world(4, 3);
  for (auto &a : w.articles) a.language = "de";
  EntityIndex de;
  auto rec = w.index.entities().begin()->second;
  rec.key.language = "de";
  de.insert(rec);
  de.rebuild_rosters(w.articles);
  const auto filtered = wikicorpus::filter_entities(de, {});
  const Corpus corpus(w.articles);
  std::size_t n = 0;
  generate_examples(filtered, corpus, GenConfig{}, TokenizerRegistry::global_default(), 1,
                    [&](MRCExample &&) { ++n; });
  EXPECT_EQ(n, 0u);
}

std::string run_generation(const World &w, int workers, uint64_t seed) {
  const Corpus corpus(w.articles);
  GenConfig cfg;
  cfg.seed = seed;
  std::ostringstream out;
  generate_examples(w.index, corpus, cfg, TokenizerRegistry::global_default(), workers,
                    [&](MRCExample &&e) { out << example_to_json(e).dump() << "\n"; });
  return out.str();
}

TEST(Generate, IndependentOfWorkerCount) {
  auto w = japan_world(15, 5);
  for (int e = 0; e < 70; ++e) {
    EntityRecord r;
    r.key = {"en", fmt::format("Filler {}", 100 + e)};
    r.definition = w.articles[1 + 15 + (e % 5)].article_id;
    r.mentions = {{2, 0}};
    w.index.insert(r);
  }
  const auto one = run_generation(w, 1, 7);
  EXPECT_EQ(one, run_generation(w, 4, 7));
  EXPECT_NE(one, run_generation(w, 1, 8));
}

TEST(Generate, IdsAreDeterministicHex) {
  const auto id = example_id(7, "en", "Japan", 3);
  EXPECT_EQ(id.size(), 16u);
  EXPECT_EQ(id, example_id(7, "en", "Japan", 3));
  EXPECT_NE(id, example_id(7, "en", "Japan", 4));
}

TEST(Generate, JsonRoundTrip) {
  MRCExample e;
  e.id = "x";
  e.language = "en";
  e.entity = "Japan";
  e.query = {"[MASK]", "is"};
  e.context = {"a", "Japan"};
  e.answers = {{1, 1}};
  e.answerable = true;
  const auto back = example_from_json(nlohmann::json::parse(example_to_json(e).dump()));
  EXPECT_EQ(back.query, e.query);
  EXPECT_EQ(back.answers, e.answers);
  EXPECT_TRUE(back.answerable);
}

TEST(GenConfig, RejectsZeroes) {
  GenConfig c;
  c.query_words = 0;
  EXPECT_THROW(c.validate(), UsageError);
}

TEST(Stats, EmptyStreamHasZeroTotal) {
  CorpusStats s;
  EXPECT_EQ(s.total().entities, 0u);
  EXPECT_EQ(s.total().examples, 0u);
  EXPECT_NE(s.render_table().find("Total"), std::string::npos);
}

TEST(Stats, ThreeEntitiesFullCaps) {
  CorpusStats s;
  for (const char *e : {"A", "B", "C"}) {
    for (int i = 0; i < 20; ++i) s.add("en", e);
  }
  EXPECT_EQ(s.total().entities, 3u);
  EXPECT_EQ(s.total().examples, 60u);
  EXPECT_EQ(s.render_tsv(), "lang\tentities\texamples\nen\t3\t60\ntotal\t3\t60\n");
}

TEST(Stats, ThousandsSeparators) {
  EXPECT_EQ(group_thousands(19303940), "19,303,940");
  EXPECT_EQ(group_thousands(966197), "966,197");
  EXPECT_EQ(group_thousands(0), "0");
}

}  // namespace
}  // namespace wikimrc::mrcgen
