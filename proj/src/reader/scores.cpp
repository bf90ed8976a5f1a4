#include "wikimrc/reader/scores.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "wikimrc/util/error.hpp"

namespace wikimrc::reader {

std::vector<TokenSpan> candidate_spans(std::size_t context_offset, std::size_t context_length,
                                       std::size_t max_span) {
  std::vector<TokenSpan> out;
  out.reserve(candidate_count(context_length, max_span));
  out.push_back(TokenSpan{0, 0});
  for (std::size_t i = 0; i < context_length; ++i) {
    const std::size_t last = std::min(context_length, i + max_span);
    for (std::size_t j = i; j < last; ++j) {
      out.push_back(TokenSpan{context_offset + i, context_offset + j});
    }
  }
  return out;
}

std::size_t candidate_count(std::size_t context_length, std::size_t max_span) {
  std::size_t n = 1;
  for (std::size_t i = 0; i < context_length; ++i) n += std::min(max_span, context_length - i);
  return n;
}

double logistic(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double SpanScores::probability(std::size_t k) const { return logistic(logits.at(k)); }

std::vector<taskconv::ScoredSpan> decode_extraction(const SpanScores &scores, double threshold) {
  std::vector<taskconv::ScoredSpan> kept;
  if (scores.logits.empty() || scores.cls_probability() <= threshold) return kept;
  std::vector<taskconv::ScoredSpan> above;
  for (std::size_t k = 1; k < scores.candidates.size(); ++k) {
    const double p = scores.probability(k);
    if (p > threshold) above.push_back({scores.candidates[k], p});
  }
  std::sort(above.begin(), above.end(), [](const auto &a, const auto &b) {
    if (a.probability != b.probability) return a.probability > b.probability;
    if (a.span.start != b.span.start) return a.span.start < b.span.start;
    return a.span.end < b.span.end;
  });
  for (const auto &c : above) {
    const bool clash = std::any_of(kept.begin(), kept.end(),
                                   [&](const auto &k) { return k.span.overlaps(c.span); });
    if (!clash) kept.push_back(c);
  }
  return kept;
}

std::size_t decode_classification(const std::vector<SpanScores> &per_label) {
  if (per_label.empty()) throw DataError("classification needs at least one label");
  std::size_t best = 0;
  for (std::size_t k = 1; k < per_label.size(); ++k) {
    if (per_label[k].cls_probability() > per_label[best].cls_probability()) best = k;
  }
  return best;
}

taskconv::InputPrediction to_prediction(const SpanScores &scores, double threshold) {
  taskconv::InputPrediction p;
  p.cls_probability = scores.logits.empty() ? 0.0 : scores.cls_probability();
  p.spans = decode_extraction(scores, threshold);
  return p;
}

Rationale extract_rationale(const taskconv::PairInstance &pair, const SpanScorer &scorer,
                            const Tokenizer &tokenizer) {
  if (!pair.label) throw UsageError("rationale extraction needs a label");
  taskconv::Scheme scheme;
  scheme.task = taskconv::TaskKind::kPair;
  scheme.labels.push_back({*pair.label, *pair.label});
  const auto inputs = taskconv::convert_pair(pair, scheme, taskconv::PairMode::kRationale, tokenizer);
  Rationale best;
  bool found = false;
  for (int pass = 0; pass < 2; ++pass) {
    const auto &input = inputs[static_cast<std::size_t>(pass)];
    const SpanScores scores = scorer(input);
    for (std::size_t k = 1; k < scores.candidates.size(); ++k) {
      const double p = scores.probability(k);
      const TokenSpan local{scores.candidates[k].start - scores.context_offset,
                            scores.candidates[k].end - scores.context_offset};
      // Strictly greater keeps the earlier pass and the earlier, shorter span.
      if (!found || p > best.probability) {
        found = true;
        best.probability = p;
        best.pass = pass + 1;
        best.sentence = pass == 0 ? 2 : 1;
        best.span = local;
      }
    }
  }
  if (!found) throw DataError("pair " + pair.id + " has no context tokens to explain");
  const auto &sentence = best.sentence == 1 ? pair.sentence1 : pair.sentence2;
  best.tokens.assign(sentence.begin() + static_cast<std::ptrdiff_t>(best.span.start),
                     sentence.begin() + static_cast<std::ptrdiff_t>(best.span.end + 1));
  return best;
}

}  // namespace wikimrc::reader
