#include "wikimrc/eval/metrics.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "wikimrc/util/error.hpp"
#include "wikimrc/util/text.hpp"

namespace wikimrc::eval {
namespace {

std::vector<std::string> split_words(const std::string &s) {
  std::vector<std::string> words;
  std::string cur;
  std::size_t pos = 0;
  while (pos < s.size()) {
    const std::size_t begin = pos;
    const char32_t cp = text::next_code_point(s, pos);
    if (text::is_space(cp)) {
      if (!cur.empty()) words.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.append(s, begin, pos - begin);
    }
  }
  if (!cur.empty()) words.push_back(std::move(cur));
  return words;
}

}  // namespace

std::string normalize_answer(std::string_view input, bool english) {
  const std::string lowered = text::lowercase(input);
  std::string stripped;
  std::size_t pos = 0;
  while (pos < lowered.size()) {
    const std::size_t begin = pos;
    const char32_t cp = text::next_code_point(lowered, pos);
    if (!text::is_punct(cp)) stripped.append(lowered, begin, pos - begin);
  }
  std::string out;
  for (const auto &w : split_words(stripped)) {
    if (english && (w == "a" || w == "an" || w == "the")) continue;
    if (!out.empty()) out.push_back(' ');
    out += w;
  }
  return out;
}

SquadScore squad_f1_em(std::string_view prediction, const std::vector<std::string> &golds,
                       bool english) {
  if (golds.empty()) throw DataError("squad_f1_em needs at least one gold answer");
  const std::string pred_norm = normalize_answer(prediction, english);
  const auto pred_words = split_words(pred_norm);
  SquadScore best;
  for (const auto &gold : golds) {
    const std::string gold_norm = normalize_answer(gold, english);
    const auto gold_words = split_words(gold_norm);
    SquadScore s;
    s.em = pred_norm == gold_norm ? 1.0 : 0.0;
    if (pred_words.empty() || gold_words.empty()) {
      s.f1 = pred_words.empty() && gold_words.empty() ? 1.0 : 0.0;
    } else {
      std::map<std::string, int> counts;
      for (const auto &w : gold_words) ++counts[w];
      std::size_t common = 0;
      for (const auto &w : pred_words) {
        auto it = counts.find(w);
        if (it != counts.end() && it->second > 0) {
          --it->second;
          ++common;
        }
      }
      if (common > 0) {
        const double p = static_cast<double>(common) / static_cast<double>(pred_words.size());
        const double r = static_cast<double>(common) / static_cast<double>(gold_words.size());
        s.f1 = 2 * p * r / (p + r);
      }
    }
    best.f1 = std::max(best.f1, s.f1);
    best.em = std::max(best.em, s.em);
  }
  return best;
}

PRF prf_from_counts(std::size_t matched, std::size_t predicted, std::size_t gold) {
  if (predicted == 0 && gold == 0) return PRF{1.0, 1.0, 1.0};
  PRF r;
  r.precision = predicted == 0 ? 0.0 : static_cast<double>(matched) / static_cast<double>(predicted);
  r.recall = gold == 0 ? 0.0 : static_cast<double>(matched) / static_cast<double>(gold);
  if (r.precision + r.recall > 0) r.f1 = 2 * r.precision * r.recall / (r.precision + r.recall);
  return r;
}

PRF span_set_f1(const std::set<taskconv::TypedSpan> &predicted,
                const std::set<taskconv::TypedSpan> &gold) {
  std::size_t matched = 0;
  for (const auto &s : predicted) matched += gold.count(s);
  return prf_from_counts(matched, predicted.size(), gold.size());
}

double accuracy(const std::vector<std::string> &predicted, const std::vector<std::string> &gold) {
  if (predicted.size() != gold.size()) {
    throw DataError("accuracy over " + std::to_string(predicted.size()) + " predictions and " +
                    std::to_string(gold.size()) + " gold labels");
  }
  if (gold.empty()) throw DataError("accuracy of an empty list is undefined");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) correct += predicted[i] == gold[i];
  return static_cast<double>(correct) / static_cast<double>(gold.size());
}

}  // namespace wikimrc::eval
