#include "wikimrc/taskconv/unified.hpp"

#include <algorithm>

#include "wikimrc/util/error.hpp"
#include "wikimrc/util/jsonl.hpp"

namespace wikimrc::taskconv {

std::vector<std::string> UnifiedInput::assembled() const {
  std::vector<std::string> seq;
  seq.reserve(assembled_length());
  seq.emplace_back(kClsToken);
  seq.insert(seq.end(), query.begin(), query.end());
  seq.emplace_back(kSepToken);
  seq.emplace_back(kSepToken);
  seq.insert(seq.end(), context.begin(), context.end());
  seq.emplace_back(kSepToken);
  return seq;
}

std::vector<TokenSpan> UnifiedInput::context_gold() const {
  std::vector<TokenSpan> out;
  const std::size_t off = context_offset();
  for (const auto &g : gold) {
    if (g.start >= off && g.end < off + context.size()) out.push_back({g.start - off, g.end - off});
  }
  return out;
}

UnifiedInput assemble(std::vector<std::string> query, std::vector<std::string> context,
                      const std::vector<TokenSpan> &context_spans, bool cls_gold) {
  UnifiedInput in;
  in.query = std::move(query);
  in.context = std::move(context);
  const std::size_t off = in.context_offset();
  if (cls_gold) in.gold.push_back(TokenSpan{0, 0});
  for (const auto &s : context_spans) {
    if (s.start > s.end || s.end >= in.context.size()) {
      throw DataError("span [" + std::to_string(s.start) + "," + std::to_string(s.end) +
                      "] lies outside a context of " + std::to_string(in.context.size()) +
                      " tokens");
    }
    in.gold.push_back(TokenSpan{s.start + off, s.end + off});
  }
  std::sort(in.gold.begin(), in.gold.end());
  in.gold.erase(std::unique(in.gold.begin(), in.gold.end()), in.gold.end());
  return in;
}

UnifiedInput from_mrc_example(const mrcgen::MRCExample &example) {
  if (example.answerable && example.answers.empty()) {
    throw DataError("example " + example.id + " is answerable but has no answer span");
  }
  if (!example.answerable && !example.answers.empty()) {
    throw DataError("example " + example.id + " is unanswerable but has answer spans");
  }
  UnifiedInput in = assemble(example.query, example.context, example.answers);
  in.id = example.id;
  in.language = example.language;
  in.task = "pretrain";
  in.source_id = example.entity;
  return in;
}

nlohmann::ordered_json unified_to_json(const UnifiedInput &input) {
  nlohmann::ordered_json j;
  j["id"] = input.id;
  j["lang"] = input.language;
  j["query"] = input.query;
  j["context"] = input.context;
  auto answers = nlohmann::ordered_json::array();
  for (const auto &s : input.context_gold()) answers.push_back({s.start, s.end});
  j["answers"] = std::move(answers);
  j["answerable"] = input.answerable();
  j["task"] = input.task;
  j["source_id"] = input.source_id;
  j["label"] = input.label;
  return j;
}

UnifiedInput unified_from_json(const nlohmann::json &j) {
  try {
    const bool answerable = j.at("answerable").get<bool>();
    std::vector<TokenSpan> spans;
    for (const auto &a : j.at("answers")) {
      spans.push_back(TokenSpan{a.at(0).get<std::size_t>(), a.at(1).get<std::size_t>()});
    }
    const std::string id = j.at("id").get<std::string>();
    if (!answerable && !spans.empty()) {
      throw DataError("record " + id + " is unanswerable but lists answers");
    }
    UnifiedInput in = assemble(j.at("query").get<std::vector<std::string>>(),
                               j.at("context").get<std::vector<std::string>>(), spans,
                               answerable && spans.empty());
    in.id = id;
    in.language = j.value("lang", std::string());
    in.task = j.value("task", std::string("pretrain"));
    in.source_id = j.value("source_id", j.value("entity", id));
    in.label = j.value("label", std::string());
    return in;
  } catch (const nlohmann::json::exception &e) {
    throw DataError(std::string("bad mrc record: ") + e.what());
  }
}

std::vector<UnifiedInput> read_unified_file(const std::string &path) {
  std::vector<UnifiedInput> out;
  for_each_jsonl_file(path, [&](const nlohmann::json &j) { out.push_back(unified_from_json(j)); });
  return out;
}

}  // namespace wikimrc::taskconv
