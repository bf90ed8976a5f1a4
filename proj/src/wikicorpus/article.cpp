#include "wikimrc/wikicorpus/article.hpp"

#include "wikimrc/util/error.hpp"
#include "wikimrc/util/text.hpp"
#include "wikimrc/wikicorpus/wikitext.hpp"

namespace wikimrc::wikicorpus {

std::string normalize_title(std::string_view title) {
  std::string spaced;
  spaced.reserve(title.size());
  bool pending_space = false;
  std::size_t pos = 0;
  while (pos < title.size()) {
    const std::size_t start = pos;
    const char32_t cp = text::next_code_point(title, pos);
    if (cp == '_' || text::is_space(cp)) {
      pending_space = true;
      continue;
    }
    if (pending_space && !spaced.empty()) spaced.push_back(' ');
    pending_space = false;
    spaced.append(title.substr(start, pos - start));
  }
  return text::uppercase_first(spaced);
}

Article make_article(const RawPage &page, int64_t article_id, const Tokenizer &tokenizer) {
  const StrippedText stripped = strip_wikitext(page.wikitext);
  const std::vector<Token> tokens = tokenizer.tokenize(stripped.text);

  Article article;
  article.article_id = article_id;
  article.language = page.language;
  article.title = normalize_title(page.title);
  article.tokens = token_texts(tokens);
  for (const auto &anchor : stripped.anchors) {
    auto span = char_span_to_tokens(tokens, anchor.begin, anchor.end);
    if (!span) continue;
    if (!article.anchors.empty() && span->first <= article.anchors.back().end) continue;
    const std::string target = normalize_title(anchor.target);
    if (target.empty()) continue;
    AnchorMention mention;
    mention.target = target;
    mention.start = span->first;
    mention.end = span->second;
    mention.surface.assign(article.tokens.begin() + static_cast<std::ptrdiff_t>(span->first),
                           article.tokens.begin() + static_cast<std::ptrdiff_t>(span->second) + 1);
    article.anchors.push_back(std::move(mention));
  }
  return article;
}

void validate_article(const Article &article) {
  const std::string where = "article " + std::to_string(article.article_id);
  for (const auto &token : article.tokens) {
    if (token.empty()) throw DataError(where + ": empty token");
  }
  std::size_t next_free = 0;
  for (const auto &anchor : article.anchors) {
    if (anchor.start > anchor.end || anchor.end >= article.tokens.size()) {
      throw DataError(where + ": anchor out of range");
    }
    if (anchor.start < next_free) throw DataError(where + ": anchors unsorted or overlapping");
    next_free = anchor.end + 1;
    for (std::size_t k = anchor.start; k <= anchor.end; ++k) {
      if (anchor.surface.size() != anchor.width() ||
          anchor.surface[k - anchor.start] != article.tokens[k]) {
        throw DataError(where + ": anchor surface does not match tokens");
      }
    }
  }
}

nlohmann::ordered_json article_to_json(const Article &article) {
  nlohmann::ordered_json j;
  j["id"] = article.article_id;
  j["lang"] = article.language;
  j["title"] = article.title;
  j["tokens"] = article.tokens;
  auto anchors = nlohmann::ordered_json::array();
  for (const auto &a : article.anchors) {
    nlohmann::ordered_json aj;
    aj["target"] = a.target;
    aj["start"] = a.start;
    aj["end"] = a.end;
    anchors.push_back(std::move(aj));
  }
  j["anchors"] = std::move(anchors);
  return j;
}

Article article_from_json(const nlohmann::json &j) {
  try {
    Article article;
    article.article_id = j.at("id").get<int64_t>();
    article.language = j.at("lang").get<std::string>();
    article.title = j.at("title").get<std::string>();
    article.tokens = j.at("tokens").get<std::vector<std::string>>();
    for (const auto &aj : j.at("anchors")) {
      AnchorMention a;
      a.target = aj.at("target").get<std::string>();
      a.start = aj.at("start").get<std::size_t>();
      a.end = aj.at("end").get<std::size_t>();
      if (a.start > a.end || a.end >= article.tokens.size()) {
        throw DataError("article " + std::to_string(article.article_id) + ": anchor out of range");
      }
      a.surface.assign(article.tokens.begin() + static_cast<std::ptrdiff_t>(a.start),
                       article.tokens.begin() + static_cast<std::ptrdiff_t>(a.end) + 1);
      article.anchors.push_back(std::move(a));
    }
    validate_article(article);
    return article;
  } catch (const nlohmann::json::exception &e) {
    throw DataError(std::string("bad article record: ") + e.what());
  }
}

}  // namespace wikimrc::wikicorpus
