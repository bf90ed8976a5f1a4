#pragma once

#include <functional>
#include <string>
#include <vector>

#include "wikimrc/taskconv/convert.hpp"
#include "wikimrc/util/span.hpp"

namespace wikimrc::reader {

// Candidate spans of one assembled sequence: the [CLS] slot (0,0) first,
// then every context span (i, j) with j - i < max_span, ordered by (i, j).
std::vector<TokenSpan> candidate_spans(std::size_t context_offset, std::size_t context_length,
                                       std::size_t max_span);
// 1 + sum over context positions of min(max_span, tokens remaining).
std::size_t candidate_count(std::size_t context_length, std::size_t max_span);

// Extractor logits aligned with candidate_spans.
struct SpanScores {
  std::size_t context_offset = 0;
  std::size_t context_length = 0;
  std::vector<TokenSpan> candidates;
  std::vector<double> logits;

  double probability(std::size_t k) const;
  double cls_probability() const { return probability(0); }
};

double logistic(double x);

// Empty when p(0,0) <= threshold. Otherwise context candidates with
// p > threshold, kept greedily by descending probability (earlier start,
// then shorter span, on ties) while skipping overlaps. Returned in kept order.
std::vector<taskconv::ScoredSpan> decode_extraction(const SpanScores &scores, double threshold);

// Index of the label input with the highest p(0,0); the first wins ties.
// Throws DataError on an empty list.
std::size_t decode_classification(const std::vector<SpanScores> &per_label);

taskconv::InputPrediction to_prediction(const SpanScores &scores, double threshold);

using SpanScorer = std::function<SpanScores(const taskconv::UnifiedInput &)>;

struct Rationale {
  int sentence = 1;  // sentence holding the span, 1 or 2
  TokenSpan span;    // sentence coordinates
  std::vector<std::string> tokens;
  double probability = 0.0;
  int pass = 1;
};

// Scores both rationale inputs (label + sentence 1 | sentence 2, then
// label + sentence 2 | sentence 1) and returns the most probable context
// span over both passes, never the [CLS] slot. Ties go to pass 1, then to
// the earlier and shorter span.
Rationale extract_rationale(const taskconv::PairInstance &pair, const SpanScorer &scorer,
                            const Tokenizer &tokenizer);

}  // namespace wikimrc::reader
