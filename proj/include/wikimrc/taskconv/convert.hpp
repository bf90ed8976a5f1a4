#pragma once

#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "wikimrc/taskconv/unified.hpp"
#include "wikimrc/util/tokenizer.hpp"

namespace wikimrc::taskconv {

struct LabelDef {
  std::string name;
  std::string definition;

  bool operator==(const LabelDef &) const = default;
};

enum class TaskKind { kEqa, kNer, kAbsa, kPair };

TaskKind parse_task_kind(const std::string &name);  // throws UsageError
std::string task_kind_name(TaskKind kind);
bool is_tagging(TaskKind kind);

// Label inventory plus the query template. Template pieces are separated by
// whitespace; the piece "{definition}" expands to the tokenized definition
// and any other piece becomes one token with "{name}" substituted.
struct Scheme {
  TaskKind task = TaskKind::kNer;
  std::vector<LabelDef> labels;
  std::string query_template;

  const LabelDef *find(const std::string &name) const;
  std::vector<std::string> query_for(const LabelDef &label, const Tokenizer &tokenizer) const;
};

std::string default_query_template(TaskKind kind);

// {task, labels:[{name, definition}], templates:{query}}.
Scheme scheme_from_json(const nlohmann::json &j);
nlohmann::ordered_json scheme_to_json(const Scheme &scheme);
Scheme load_scheme(const std::string &path);

struct EqaInstance {
  std::string id;
  std::string language = "en";
  std::vector<std::string> question;
  std::vector<std::string> context;
  std::vector<std::string> answers;  // surface strings; empty: unanswerable

  bool operator==(const EqaInstance &) const = default;
};

struct TypedSpan {
  std::string label;
  std::size_t start = 0;
  std::size_t end = 0;

  bool operator==(const TypedSpan &) const = default;
  auto operator<=>(const TypedSpan &o) const {
    return std::tie(start, end, label) <=> std::tie(o.start, o.end, o.label);
  }
};

struct TaggingInstance {
  std::string id;
  std::string language = "en";
  std::vector<std::string> tokens;
  std::vector<TypedSpan> spans;  // sorted

  bool operator==(const TaggingInstance &) const = default;
};

struct PairInstance {
  std::string id;
  std::string language = "en";
  std::vector<std::string> sentence1;  // hypothesis
  std::vector<std::string> sentence2;  // premise
  std::optional<std::string> label;    // absent at inference

  bool operator==(const PairInstance &) const = default;
};

enum class PairMode { kClassification, kRationale };
PairMode parse_pair_mode(const std::string &name);  // throws UsageError

// Query = question; gold = every exact token occurrence of every answer.
// Throws DataError listing an answer that does not occur in the context.
UnifiedInput convert_eqa(const EqaInstance &instance, const Tokenizer &tokenizer);

// One input per scheme label, in scheme order.
std::vector<UnifiedInput> convert_tagging(const TaggingInstance &instance, const Scheme &scheme,
                                          const Tokenizer &tokenizer);

// Classification: one input per label over "Hypothesis : s1 Premise : s2",
// gold (0,0) on the gold label's input. Rationale: two inputs, query = label
// tokens + one sentence, context = the other sentence, no gold.
std::vector<UnifiedInput> convert_pair(const PairInstance &instance, const Scheme &scheme,
                                       PairMode mode, const Tokenizer &tokenizer);

struct ScoredSpan {
  TokenSpan span;  // assembled coordinates
  double probability = 0.0;

  bool operator==(const ScoredSpan &) const = default;
};

// Reader output for one UnifiedInput.
struct InputPrediction {
  double cls_probability = 0.0;
  std::vector<ScoredSpan> spans;  // extracted context spans

  bool operator==(const InputPrediction &) const = default;
};

// Treats gold spans as certain predictions.
InputPrediction gold_as_prediction(const UnifiedInput &input);

// Highest-probability span as space-joined tokens; earliest span wins ties.
// Empty when nothing was extracted.
std::string decode_eqa(const UnifiedInput &input, const InputPrediction &prediction);
// Distinct surface strings of all extracted spans, in context order.
std::vector<std::string> decode_eqa_all(const UnifiedInput &input,
                                        const InputPrediction &prediction);

// Union over label inputs of extracted spans mapped to sentence coordinates.
// Spans that leave the context are dropped with a warning.
std::vector<TypedSpan> decode_tagging(const std::vector<UnifiedInput> &inputs,
                                      const std::vector<InputPrediction> &predictions);

// Label of the input with the highest [CLS] probability; first wins ties.
std::string decode_pair(const std::vector<UnifiedInput> &inputs,
                        const std::vector<InputPrediction> &predictions);

// Task files. String fields are tokenized with the language's tokenizer,
// arrays are taken as tokens.
//   eqa:      {id, lang, question, context, answers:[...]}
//   ner/absa: {id, lang, tokens, spans:[[label, start, end], ...]}
//   pair:     {id, lang, sentence1, sentence2, label?}
EqaInstance eqa_from_json(const nlohmann::json &j, const TokenizerRegistry &tokenizers);
TaggingInstance tagging_from_json(const nlohmann::json &j, const TokenizerRegistry &tokenizers);
PairInstance pair_from_json(const nlohmann::json &j, const TokenizerRegistry &tokenizers);
nlohmann::ordered_json eqa_to_json(const EqaInstance &instance);
nlohmann::ordered_json tagging_to_json(const TaggingInstance &instance);
nlohmann::ordered_json pair_to_json(const PairInstance &instance);

std::string join_tokens(const std::vector<std::string> &tokens, std::size_t start, std::size_t end);

}  // namespace wikimrc::taskconv
