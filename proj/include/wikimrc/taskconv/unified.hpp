#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "wikimrc/mrcgen/generator.hpp"
#include "wikimrc/util/span.hpp"

namespace wikimrc::taskconv {

inline constexpr std::string_view kClsToken = "[CLS]";
inline constexpr std::string_view kSepToken = "[SEP]";

// One query/context pair in the shared reading format. Gold spans index the
// assembled sequence [CLS] query [SEP] [SEP] context [SEP]; (0,0) is the
// [CLS] slot and appears only when it is the sole answer.
struct UnifiedInput {
  std::string id;
  std::string language;
  std::string task;       // "pretrain", "eqa", "ner", "absa", "pair", "rationale"
  std::string source_id;  // instance this input was derived from
  std::string label;      // label whose query produced this input
  std::vector<std::string> query;
  std::vector<std::string> context;
  std::vector<TokenSpan> gold;

  // Offset of context token 0 in the assembled sequence.
  std::size_t context_offset() const { return query.size() + 3; }
  std::size_t assembled_length() const { return query.size() + context.size() + 4; }
  std::vector<std::string> assembled() const;
  bool answerable() const { return !gold.empty(); }
  // Gold spans that lie on the context side, in context coordinates.
  std::vector<TokenSpan> context_gold() const;

  bool operator==(const UnifiedInput &) const = default;
};

// Builds the assembled form, shifting context-local spans by |query| + 3.
// With `cls_gold` the [CLS] slot (0,0) is added as a gold answer. Throws
// DataError naming the first span outside the context.
UnifiedInput assemble(std::vector<std::string> query, std::vector<std::string> context,
                      const std::vector<TokenSpan> &context_spans, bool cls_gold = false);

UnifiedInput from_mrc_example(const mrcgen::MRCExample &example);

// mrc.jsonl record with context-local answers, plus {task, source_id, label}.
// A [CLS]-only answer is written as answerable with an empty answer list.
nlohmann::ordered_json unified_to_json(const UnifiedInput &input);
// Reads both generated pre-training records and converted task records.
UnifiedInput unified_from_json(const nlohmann::json &j);

std::vector<UnifiedInput> read_unified_file(const std::string &path);

}  // namespace wikimrc::taskconv
