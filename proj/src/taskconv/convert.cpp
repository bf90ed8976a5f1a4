#include "wikimrc/taskconv/convert.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "wikimrc/mrcgen/generator.hpp"
#include "wikimrc/util/error.hpp"
#include "wikimrc/util/log.hpp"

namespace wikimrc::taskconv {
namespace {

std::vector<std::string> split_whitespace(const std::string &s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string piece; in >> piece;) out.push_back(piece);
  return out;
}

void replace_all(std::string &s, std::string_view from, std::string_view to) {
  for (std::size_t pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size())) {
    s.replace(pos, from.size(), to);
  }
}

std::vector<std::string> tokens_field(const nlohmann::json &j, const char *key,
                                      const Tokenizer &tokenizer) {
  const auto &v = j.at(key);
  if (v.is_string()) return token_texts(tokenizer.tokenize(v.get<std::string>()));
  return v.get<std::vector<std::string>>();
}

template <typename Fn>
auto guarded(const char *what, Fn fn) {
  try {
    return fn();
  } catch (const nlohmann::json::exception &e) {
    throw DataError(std::string("bad ") + what + " record: " + e.what());
  }
}

void check_predictions(const std::vector<UnifiedInput> &inputs,
                       const std::vector<InputPrediction> &predictions) {
  if (inputs.size() != predictions.size()) {
    throw DataError("got " + std::to_string(predictions.size()) + " predictions for " +
                    std::to_string(inputs.size()) + " inputs");
  }
}

}  // namespace

TaskKind parse_task_kind(const std::string &name) {
  if (name == "eqa") return TaskKind::kEqa;
  if (name == "ner") return TaskKind::kNer;
  if (name == "absa") return TaskKind::kAbsa;
  if (name == "pair") return TaskKind::kPair;
  throw UsageError("unknown task '" + name + "' (expected eqa, ner, absa or pair)");
}

std::string task_kind_name(TaskKind kind) {
  switch (kind) {
    case TaskKind::kEqa: return "eqa";
    case TaskKind::kNer: return "ner";
    case TaskKind::kAbsa: return "absa";
    case TaskKind::kPair: return "pair";
  }
  return "?";
}

bool is_tagging(TaskKind kind) { return kind == TaskKind::kNer || kind == TaskKind::kAbsa; }

PairMode parse_pair_mode(const std::string &name) {
  if (name == "classification") return PairMode::kClassification;
  if (name == "rationale") return PairMode::kRationale;
  throw UsageError("unknown pair mode '" + name + "' (expected classification or rationale)");
}

const LabelDef *Scheme::find(const std::string &name) const {
  for (const auto &l : labels) {
    if (l.name == name) return &l;
  }
  return nullptr;
}

std::vector<std::string> Scheme::query_for(const LabelDef &label, const Tokenizer &tokenizer) const {
  std::vector<std::string> query;
  for (std::string piece : split_whitespace(query_template)) {
    if (piece == "{definition}") {
      for (auto &t : token_texts(tokenizer.tokenize(label.definition))) query.push_back(std::move(t));
    } else {
      replace_all(piece, "{name}", label.name);
      query.push_back(std::move(piece));
    }
  }
  return query;
}

std::string default_query_template(TaskKind kind) {
  return kind == TaskKind::kPair ? "{name} . {definition}" : "\"{name}\" . {definition}";
}

Scheme scheme_from_json(const nlohmann::json &j) {
  return guarded("scheme", [&] {
    Scheme s;
    s.task = parse_task_kind(j.at("task").get<std::string>());
    std::set<std::string> seen;
    for (const auto &l : j.at("labels")) {
      LabelDef d{l.at("name").get<std::string>(), l.value("definition", std::string())};
      if (d.name.empty()) throw DataError("scheme label with empty name");
      if (!seen.insert(d.name).second) throw DataError("duplicate scheme label " + d.name);
      if (s.task != TaskKind::kEqa && d.definition.empty()) {
        throw DataError("scheme label " + d.name + " lacks a definition");
      }
      s.labels.push_back(std::move(d));
    }
    if (s.task != TaskKind::kEqa && s.labels.empty()) throw DataError("scheme has no labels");
    s.query_template = default_query_template(s.task);
    if (j.contains("templates") && j["templates"].contains("query")) {
      s.query_template = j["templates"]["query"].get<std::string>();
    }
    return s;
  });
}

nlohmann::ordered_json scheme_to_json(const Scheme &scheme) {
  nlohmann::ordered_json j;
  j["task"] = task_kind_name(scheme.task);
  auto labels = nlohmann::ordered_json::array();
  for (const auto &l : scheme.labels) labels.push_back({{"name", l.name}, {"definition", l.definition}});
  j["labels"] = std::move(labels);
  j["templates"] = {{"query", scheme.query_template}};
  return j;
}

Scheme load_scheme(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open scheme " + path);
  try {
    return scheme_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error &e) {
    throw DataError("scheme " + path + ": " + e.what());
  }
}

UnifiedInput convert_eqa(const EqaInstance &instance, const Tokenizer &tokenizer) {
  std::vector<TokenSpan> spans;
  for (const auto &answer : instance.answers) {
    const auto surface = token_texts(tokenizer.tokenize(answer));
    auto found = surface.empty() ? std::vector<TokenSpan>{}
                                 : mrcgen::find_identical_spans(instance.context, surface);
    if (found.empty()) {
      throw DataError("question " + instance.id + ": answer \"" + answer +
                      "\" does not occur in the tokenized context");
    }
    spans.insert(spans.end(), found.begin(), found.end());
  }
  UnifiedInput in = assemble(instance.question, instance.context, spans);
  in.id = instance.id;
  in.language = instance.language;
  in.task = "eqa";
  in.source_id = instance.id;
  return in;
}

std::vector<UnifiedInput> convert_tagging(const TaggingInstance &instance, const Scheme &scheme,
                                          const Tokenizer &tokenizer) {
  std::map<std::string, std::vector<TokenSpan>> by_label;
  for (const auto &s : instance.spans) {
    if (scheme.find(s.label) == nullptr) {
      throw DataError("sentence " + instance.id + ": label " + s.label + " is not in the scheme");
    }
    by_label[s.label].push_back(TokenSpan{s.start, s.end});
  }
  std::vector<UnifiedInput> out;
  out.reserve(scheme.labels.size());
  for (const auto &label : scheme.labels) {
    UnifiedInput in = assemble(scheme.query_for(label, tokenizer), instance.tokens, by_label[label.name]);
    in.id = instance.id + ":" + label.name;
    in.language = instance.language;
    in.task = task_kind_name(scheme.task);
    in.source_id = instance.id;
    in.label = label.name;
    out.push_back(std::move(in));
  }
  return out;
}

std::vector<UnifiedInput> convert_pair(const PairInstance &instance, const Scheme &scheme,
                                       PairMode mode, const Tokenizer &tokenizer) {
  if (instance.label && scheme.find(*instance.label) == nullptr) {
    throw DataError("pair " + instance.id + ": label " + *instance.label + " is not in the scheme");
  }
  std::vector<UnifiedInput> out;
  if (mode == PairMode::kClassification) {
    std::vector<std::string> context{"Hypothesis", ":"};
    context.insert(context.end(), instance.sentence1.begin(), instance.sentence1.end());
    context.insert(context.end(), {"Premise", ":"});
    context.insert(context.end(), instance.sentence2.begin(), instance.sentence2.end());
    for (const auto &label : scheme.labels) {
      const bool gold = instance.label && *instance.label == label.name;
      UnifiedInput in = assemble(scheme.query_for(label, tokenizer), context, {}, gold);
      in.id = instance.id + ":" + label.name;
      in.language = instance.language;
      in.task = "pair";
      in.source_id = instance.id;
      in.label = label.name;
      out.push_back(std::move(in));
    }
    return out;
  }
  if (!instance.label) throw UsageError("rationale mode needs a label for pair " + instance.id);
  const auto label_tokens = token_texts(tokenizer.tokenize(*instance.label));
  const std::vector<std::string> *sentences[2] = {&instance.sentence1, &instance.sentence2};
  for (int pass = 0; pass < 2; ++pass) {
    std::vector<std::string> query = label_tokens;
    query.insert(query.end(), sentences[pass]->begin(), sentences[pass]->end());
    UnifiedInput in = assemble(std::move(query), *sentences[1 - pass], {});
    in.id = instance.id + ":pass" + std::to_string(pass + 1);
    in.language = instance.language;
    in.task = "rationale";
    in.source_id = instance.id;
    in.label = *instance.label;
    out.push_back(std::move(in));
  }
  return out;
}

InputPrediction gold_as_prediction(const UnifiedInput &input) {
  InputPrediction p;
  p.cls_probability = input.answerable() ? 1.0 : 0.0;
  for (const auto &g : input.gold) {
    if (g != TokenSpan{0, 0}) p.spans.push_back(ScoredSpan{g, 1.0});
  }
  return p;
}

std::string join_tokens(const std::vector<std::string> &tokens, std::size_t start, std::size_t end) {
  std::string out;
  for (std::size_t i = start; i <= end && i < tokens.size(); ++i) {
    if (i > start) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

std::string decode_eqa(const UnifiedInput &input, const InputPrediction &prediction) {
  const ScoredSpan *best = nullptr;
  const std::size_t off = input.context_offset();
  for (const auto &s : prediction.spans) {
    if (s.span.start < off || s.span.end >= off + input.context.size()) continue;
    if (best == nullptr || s.probability > best->probability ||
        (s.probability == best->probability && s.span < best->span)) {
      best = &s;
    }
  }
  if (best == nullptr) return {};
  return join_tokens(input.context, best->span.start - off, best->span.end - off);
}

std::vector<std::string> decode_eqa_all(const UnifiedInput &input,
                                        const InputPrediction &prediction) {
  std::vector<TokenSpan> spans;
  const std::size_t off = input.context_offset();
  for (const auto &s : prediction.spans) {
    if (s.span.start >= off && s.span.end < off + input.context.size()) spans.push_back(s.span);
  }
  std::sort(spans.begin(), spans.end());
  std::vector<std::string> out;
  for (const auto &s : spans) {
    std::string text = join_tokens(input.context, s.start - off, s.end - off);
    if (std::find(out.begin(), out.end(), text) == out.end()) out.push_back(std::move(text));
  }
  return out;
}

std::vector<TypedSpan> decode_tagging(const std::vector<UnifiedInput> &inputs,
                                      const std::vector<InputPrediction> &predictions) {
  check_predictions(inputs, predictions);
  std::set<TypedSpan> out;
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    const std::size_t off = inputs[k].context_offset();
    const std::size_t n = inputs[k].context.size();
    for (const auto &s : predictions[k].spans) {
      if (s.span.start < off || s.span.end >= off + n || s.span.start > s.span.end) {
        logger()->warn("input {}: dropping span ({},{}) outside the context", inputs[k].id,
                       s.span.start, s.span.end);
        continue;
      }
      out.insert(TypedSpan{inputs[k].label, s.span.start - off, s.span.end - off});
    }
  }
  std::vector<TypedSpan> sorted(out.begin(), out.end());
  std::sort(sorted.begin(), sorted.end(), [](const TypedSpan &a, const TypedSpan &b) {
    return std::tie(a.start, a.end, a.label) < std::tie(b.start, b.end, b.label);
  });
  return sorted;
}

std::string decode_pair(const std::vector<UnifiedInput> &inputs,
                        const std::vector<InputPrediction> &predictions) {
  check_predictions(inputs, predictions);
  if (inputs.empty()) throw DataError("no label inputs to decode");
  std::size_t best = 0;
  for (std::size_t k = 1; k < inputs.size(); ++k) {
    if (predictions[k].cls_probability > predictions[best].cls_probability) best = k;
  }
  return inputs[best].label;
}

EqaInstance eqa_from_json(const nlohmann::json &j, const TokenizerRegistry &tokenizers) {
  return guarded("eqa", [&] {
    EqaInstance x;
    x.id = j.at("id").get<std::string>();
    x.language = j.value("lang", std::string("en"));
    const Tokenizer &tok = tokenizers.for_language(x.language);
    x.question = tokens_field(j, "question", tok);
    x.context = tokens_field(j, "context", tok);
    if (j.contains("answers")) x.answers = j["answers"].get<std::vector<std::string>>();
    return x;
  });
}

TaggingInstance tagging_from_json(const nlohmann::json &j, const TokenizerRegistry &tokenizers) {
  return guarded("tagging", [&] {
    TaggingInstance x;
    x.id = j.at("id").get<std::string>();
    x.language = j.value("lang", std::string("en"));
    x.tokens = tokens_field(j, "tokens", tokenizers.for_language(x.language));
    if (j.contains("spans")) {
      for (const auto &s : j["spans"]) {
        TypedSpan t{s.at(0).get<std::string>(), s.at(1).get<std::size_t>(), s.at(2).get<std::size_t>()};
        if (t.start > t.end || t.end >= x.tokens.size()) {
          throw DataError("sentence " + x.id + ": span out of range");
        }
        x.spans.push_back(std::move(t));
      }
    }
    std::sort(x.spans.begin(), x.spans.end(), [](const TypedSpan &a, const TypedSpan &b) {
      return std::tie(a.start, a.end, a.label) < std::tie(b.start, b.end, b.label);
    });
    return x;
  });
}

PairInstance pair_from_json(const nlohmann::json &j, const TokenizerRegistry &tokenizers) {
  return guarded("pair", [&] {
    PairInstance x;
    x.id = j.at("id").get<std::string>();
    x.language = j.value("lang", std::string("en"));
    const Tokenizer &tok = tokenizers.for_language(x.language);
    x.sentence1 = tokens_field(j, "sentence1", tok);
    x.sentence2 = tokens_field(j, "sentence2", tok);
    if (j.contains("label") && !j["label"].is_null()) x.label = j["label"].get<std::string>();
    return x;
  });
}

nlohmann::ordered_json eqa_to_json(const EqaInstance &x) {
  return {{"id", x.id}, {"lang", x.language}, {"question", x.question}, {"context", x.context},
          {"answers", x.answers}};
}

nlohmann::ordered_json tagging_to_json(const TaggingInstance &x) {
  auto spans = nlohmann::ordered_json::array();
  for (const auto &s : x.spans) spans.push_back({s.label, s.start, s.end});
  return {{"id", x.id}, {"lang", x.language}, {"tokens", x.tokens}, {"spans", spans}};
}

nlohmann::ordered_json pair_to_json(const PairInstance &x) {
  nlohmann::ordered_json j{{"id", x.id}, {"lang", x.language}, {"sentence1", x.sentence1},
                           {"sentence2", x.sentence2}};
  if (x.label) j["label"] = *x.label;
  return j;
}

}  // namespace wikimrc::taskconv
