#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "wikimrc/taskconv/convert.hpp"

namespace wikimrc::eval {

// Lowercase, drop punctuation, collapse whitespace; with `english` the
// articles a/an/the are removed as whole words.
std::string normalize_answer(std::string_view text, bool english);

struct SquadScore {
  double f1 = 0.0;
  double em = 0.0;
};

// Token-overlap F1 and exact match against each gold string, maximized over
// golds. Throws DataError when `golds` is empty.
SquadScore squad_f1_em(std::string_view prediction, const std::vector<std::string> &golds,
                       bool english);

struct PRF {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Exact-tuple matching over (label, start, end). Empty against empty scores 1.
PRF span_set_f1(const std::set<taskconv::TypedSpan> &predicted,
                const std::set<taskconv::TypedSpan> &gold);

// P/R/F1 from raw counts with the same empty-set conventions.
PRF prf_from_counts(std::size_t matched, std::size_t predicted, std::size_t gold);

// Fraction of exact matches. Throws DataError on empty or unequal lists.
double accuracy(const std::vector<std::string> &predicted, const std::vector<std::string> &gold);

}  // namespace wikimrc::eval
