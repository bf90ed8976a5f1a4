#include <gtest/gtest.h>

#include <cmath>

#include "wikimrc/eval/metrics.hpp"
#include "wikimrc/eval/report.hpp"

namespace wikimrc::eval {
namespace {

using taskconv::TypedSpan;

TEST(Squad, ExactMatch) {
  const auto s = squad_f1_em("Pittsburgh Steelers", {"Pittsburgh Steelers"}, true);
  EXPECT_DOUBLE_EQ(s.f1, 1.0);
  EXPECT_DOUBLE_EQ(s.em, 1.0);
}

TEST(Squad, ArticleKeptOutsideEnglish) {
  const auto s = squad_f1_em("the Pittsburgh Steelers", {"Pittsburgh Steelers"}, false);
  EXPECT_NEAR(s.f1, 0.8, 1e-12);
  EXPECT_DOUBLE_EQ(s.em, 0.0);
  const auto en = squad_f1_em("the Pittsburgh Steelers", {"Pittsburgh Steelers"}, true);
  EXPECT_DOUBLE_EQ(en.em, 1.0);
}

TEST(Squad, EmptyPrediction) {
  const auto s = squad_f1_em("", {"Pittsburgh Steelers"}, true);
  EXPECT_DOUBLE_EQ(s.f1, 0.0);
  EXPECT_DOUBLE_EQ(s.em, 0.0);
}

TEST(Squad, MaxOverGoldsAndNormalization) {
  const auto s = squad_f1_em("steelers!", {"Broncos", "The Steelers"}, true);
  EXPECT_DOUBLE_EQ(s.em, 1.0);
  EXPECT_EQ(normalize_answer("  The  Quick, brown  FOX. ", true), "quick brown fox");
  EXPECT_THROW(squad_f1_em("x", {}, true), DataError);
}

TEST(Squad, IdempotentOnAnyText) {
  for (const char *x : {"a", "Zürich «Hbf»", "東京", "the the", "2-1"}) {
    const auto s = squad_f1_em(x, {x}, true);
    EXPECT_DOUBLE_EQ(s.f1, 1.0) << x;
    EXPECT_DOUBLE_EQ(s.em, 1.0) << x;
  }
}

std::set<TypedSpan> gold3() { return {{"LOC", 9, 9}, {"LOC", 17, 17}, {"MISC", 13, 14}}; }

TEST(SpanF1, Equal) {
  const auto r = span_set_f1(gold3(), gold3());
  EXPECT_DOUBLE_EQ(r.f1, 1.0);
}

TEST(SpanF1, OneSpurious) {
  auto pred = gold3();
  pred.insert({"ORG", 0, 1});
  const auto r = span_set_f1(pred, gold3());
  EXPECT_NEAR(r.precision, 0.75, 1e-9);
  EXPECT_NEAR(r.recall, 1.0, 1e-9);
  EXPECT_NEAR(r.f1, 6.0 / 7.0, 1e-9);
}

TEST(SpanF1, DisjointAndEmpty) {
  const auto d = span_set_f1({{"PER", 0, 0}}, gold3());
  EXPECT_DOUBLE_EQ(d.f1, 0.0);
  const auto e = span_set_f1({}, {});
  EXPECT_DOUBLE_EQ(e.precision, 1.0);
  EXPECT_DOUBLE_EQ(e.recall, 1.0);
  EXPECT_DOUBLE_EQ(e.f1, 1.0);
  const auto miss = span_set_f1({}, gold3());
  EXPECT_DOUBLE_EQ(miss.f1, 0.0);
  EXPECT_DOUBLE_EQ(miss.recall, 0.0);
}

TEST(SpanF1, LabelMustMatch) {
  EXPECT_DOUBLE_EQ(span_set_f1({{"PER", 9, 9}}, {{"LOC", 9, 9}}).f1, 0.0);
}

TEST(Accuracy, Basics) {
  EXPECT_DOUBLE_EQ(accuracy({"a", "b"}, {"a", "b"}), 1.0);
  EXPECT_DOUBLE_EQ(accuracy({"a", "b", "c", "d"}, {"a", "b", "c", "x"}), 0.75);
  EXPECT_THROW(accuracy({}, {}), DataError);
  EXPECT_THROW(accuracy({"a"}, {"a", "b"}), DataError);
}

InstanceResult squad(const std::string &ds, const std::string &lang, double f1, double em) {
  InstanceResult r;
  r.dataset = ds;
  r.language = lang;
  r.family = MetricFamily::kSquad;
  r.f1 = f1;
  r.em = em;
  return r;
}

InstanceResult span(const std::string &ds, const std::string &lang, std::size_t m, std::size_t p, std::size_t g) {
  InstanceResult r;
  r.dataset = ds;
  r.language = lang;
  r.family = MetricFamily::kSpan;
  r.matched = m;
  r.predicted = p;
  r.gold = g;
  return r;
}

InstanceResult acc(const std::string &ds, const std::string &lang, bool ok) {
  InstanceResult r;
  r.dataset = ds;
  r.language = lang;
  r.family = MetricFamily::kAccuracy;
  r.correct = ok;
  return r;
}

TEST(Report, SingleCellIsItsOwnAverage) {
  const auto rep = build_report({span("conll", "en", 3, 4, 3)});
  const auto &b = rep.datasets.at("conll");
  EXPECT_NEAR(b.average.metrics.at("F1"), 100.0 * 6.0 / 7.0, 1e-9);
  EXPECT_NEAR(rep.overall, 100.0 * 6.0 / 7.0, 1e-9);
}

TEST(Report, LanguageMeanIsUnweighted) {
  std::vector<InstanceResult> rs{squad("xquad", "en", 0.8, 1), squad("xquad", "de", 0.6, 0),
                                 squad("xquad", "de", 0.6, 0)};
  const auto rep = build_report(rs);
  EXPECT_NEAR(rep.datasets.at("xquad").average.metrics.at("F1"), 70.0, 1e-9);
  EXPECT_NEAR(rep.datasets.at("xquad").average.metrics.at("EM"), 50.0, 1e-9);
}

TEST(Report, SevenLanguageRowAverages) {
  const std::vector<std::pair<std::string, std::pair<double, double>>> row{
      {"en", {84.0, 71.4}}, {"ar", {66.4, 47.0}}, {"de", {70.3, 56.2}}, {"es", {74.5, 57.1}},
      {"hi", {71.4, 54.1}}, {"vi", {74.7, 54.4}}, {"zh", {70.5, 47.3}}};
  std::vector<InstanceResult> rs;
  for (const auto &[lang, v] : row) rs.push_back(squad("MLQA", lang, v.first / 100, v.second / 100));
  const auto rep = build_report(rs);
  const auto &avg = rep.datasets.at("MLQA").average.metrics;
  EXPECT_NEAR(std::round(avg.at("F1") * 10) / 10, 73.1, 1e-9);
  EXPECT_NEAR(std::round(avg.at("EM") * 10) / 10, 55.4, 1e-9);
  const auto text = rep.render_text();
  EXPECT_NE(text.find("MLQA results (F1 / EM) for each language"), std::string::npos) << text;
  const auto header = text.find("en");
  EXPECT_LT(header, text.find("zh"));
  EXPECT_LT(text.find("zh"), text.find("Avg."));
}

TEST(Report, OverallIsMeanOfPrimaryMetrics) {
  // Eight datasets whose primary metrics average to 77.1625.
  std::vector<InstanceResult> rs{squad("xquad", "en", 0.792, 0.644), squad("mlqa", "en", 0.731, 0.554),
                                 squad("tydiqa", "en", 0.747, 0.583), span("wikiann", "en", 707, 1000, 1000),
                                 span("conll", "en", 841, 1000, 1000), span("semeval16", "en", 682, 1000, 1000)};
  for (int i = 0; i < 1000; ++i) rs.push_back(acc("pawsx", "en", i < 880));
  for (int i = 0; i < 1000; ++i) rs.push_back(acc("xnli", "en", i < 793));
  const auto rep = build_report(rs);
  EXPECT_NEAR(rep.overall, 77.1625, 1e-9);
  EXPECT_NEAR(std::round(rep.overall * 10) / 10, 77.2, 1e-9);
}

TEST(Report, TsvRows) {
  const auto rep = build_report({acc("pawsx", "en", true), acc("pawsx", "de", false)});
  const auto tsv = rep.render_tsv();
  EXPECT_NE(tsv.find("pawsx\ten\tAcc.\t100"), std::string::npos) << tsv;
  EXPECT_NE(tsv.find("pawsx\tAvg.\tAcc.\t50"), std::string::npos) << tsv;
  EXPECT_NE(tsv.find("overall"), std::string::npos);
}

TEST(Report, MixedFamiliesRejected) {
  EXPECT_THROW(build_report({acc("x", "en", true), squad("x", "en", 1, 1)}), DataError);
}

TEST(Report, PermutationInvariant) {
  std::vector<InstanceResult> rs{span("n", "en", 1, 2, 3), span("n", "en", 2, 2, 2), span("n", "de", 0, 1, 1)};
  const auto a = build_report(rs);
  std::reverse(rs.begin(), rs.end());
  EXPECT_EQ(a.render_tsv(), build_report(rs).render_tsv());
}

}  // namespace
}  // namespace wikimrc::eval
