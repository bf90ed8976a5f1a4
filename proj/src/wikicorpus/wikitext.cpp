#include "wikimrc/wikicorpus/wikitext.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <optional>

#include "wikimrc/util/text.hpp"

namespace wikimrc::wikicorpus {
namespace {

using Range = std::pair<std::size_t, std::size_t>;

// Copies `s` minus the given (possibly overlapping, unsorted) ranges.
std::string erase_ranges(std::string_view s, std::vector<Range> ranges) {
  std::sort(ranges.begin(), ranges.end());
  std::string out;
  out.reserve(s.size());
  std::size_t pos = 0;
  for (const auto &[b, e] : ranges) {
    if (e <= pos) continue;
    if (b > pos) out.append(s.substr(pos, b - pos));
    pos = std::max(pos, e);
  }
  if (pos < s.size()) out.append(s.substr(pos));
  return out;
}

bool starts_with_at(std::string_view s, std::size_t i, std::string_view prefix) {
  return s.size() >= i + prefix.size() && s.compare(i, prefix.size(), prefix) == 0;
}

bool istarts_with_at(std::string_view s, std::size_t i, std::string_view prefix) {
  return s.size() >= i + prefix.size() && text::iequals_ascii(s.substr(i, prefix.size()), prefix);
}

std::string remove_comments(std::string_view s) {
  std::vector<Range> cut;
  std::size_t pos = 0;
  while ((pos = s.find("<!--", pos)) != std::string_view::npos) {
    const auto close = s.find("-->", pos + 4);
    if (close == std::string_view::npos) {
      cut.emplace_back(pos, pos + 4);
      pos += 4;
    } else {
      cut.emplace_back(pos, close + 3);
      pos = close + 3;
    }
  }
  return erase_ranges(s, std::move(cut));
}

// Tags whose content is not prose and is removed along with the tag.
constexpr std::array<std::string_view, 14> kDropContentTags = {
    "ref",   "references", "math",  "gallery", "timeline", "score", "syntaxhighlight",
    "source", "imagemap",  "graph", "chem",    "ce",       "templatedata", "mapframe"};

struct TagInfo {
  std::string name;  // lowercased
  bool closing = false;
  bool self_closing = false;
  std::size_t end = 0;  // one past '>'
};

std::optional<TagInfo> parse_tag(std::string_view s, std::size_t i) {
  TagInfo tag;
  std::size_t p = i + 1;
  if (p < s.size() && s[p] == '/') {
    tag.closing = true;
    ++p;
  }
  if (p >= s.size() || !std::isalpha(static_cast<unsigned char>(s[p]))) return std::nullopt;
  const std::size_t name_begin = p;
  while (p < s.size() && (std::isalnum(static_cast<unsigned char>(s[p])) || s[p] == '-')) ++p;
  tag.name = text::lowercase(s.substr(name_begin, p - name_begin));
  if (p < s.size() && s[p] != '>' && s[p] != '/' && !std::isspace(static_cast<unsigned char>(s[p]))) {
    return std::nullopt;
  }
  const std::size_t limit = std::min(s.size(), i + 2048);
  const auto close = s.substr(0, limit).find('>', p);
  if (close == std::string_view::npos) return std::nullopt;
  const auto stray = s.substr(0, close).find('<', p);
  if (stray != std::string_view::npos) return std::nullopt;
  tag.self_closing = close > i && s[close - 1] == '/';
  tag.end = close + 1;
  return tag;
}

std::string remove_tags(std::string_view s) {
  std::vector<Range> cut;
  std::size_t pos = 0;
  while ((pos = s.find('<', pos)) != std::string_view::npos) {
    auto tag = parse_tag(s, pos);
    if (!tag) {
      ++pos;
      continue;
    }
    const bool drop_content =
        std::find(kDropContentTags.begin(), kDropContentTags.end(), tag->name) != kDropContentTags.end();
    if (drop_content && !tag->closing && !tag->self_closing) {
      // Find the matching close tag, case-insensitively.
      std::size_t search = tag->end;
      std::optional<std::size_t> block_end;
      while ((search = s.find("</", search)) != std::string_view::npos) {
        auto closer = parse_tag(s, search);
        if (closer && closer->closing && closer->name == tag->name) {
          block_end = closer->end;
          break;
        }
        search += 2;
      }
      if (block_end) {
        cut.emplace_back(pos, *block_end);
        pos = *block_end;
        continue;
      }
    }
    cut.emplace_back(pos, tag->end);
    pos = tag->end;
  }
  return erase_ranges(s, std::move(cut));
}

bool at_line_start(std::string_view s, std::size_t i) {
  while (i > 0) {
    const char c = s[i - 1];
    if (c == '\n') return true;
    if (c != ' ' && c != '\t') return false;
    --i;
  }
  return true;
}

// Templates {{...}} and tables {|...|} in one stack pass, since they nest
// inside each other. Matched pairs remove their whole extent; unmatched
// markers remove only themselves.
std::string remove_templates_and_tables(std::string_view s) {
  enum class Kind { kTemplate, kTable };
  std::vector<std::pair<Kind, std::size_t>> stack;
  std::vector<Range> cut;
  auto close_kind = [&](Kind kind, std::size_t i) {
    auto it = std::find_if(stack.rbegin(), stack.rend(),
                           [kind](const auto &entry) { return entry.first == kind; });
    if (it == stack.rend()) {
      cut.emplace_back(i, i + 2);
      return;
    }
    const std::size_t open = it->second;
    stack.erase(std::next(it).base(), stack.end());
    cut.emplace_back(open, i + 2);
  };
  std::size_t i = 0;
  while (i + 1 < s.size()) {
    if (s[i] == '{' && s[i + 1] == '{') {
      stack.emplace_back(Kind::kTemplate, i);
      i += 2;
    } else if (s[i] == '}' && s[i + 1] == '}') {
      close_kind(Kind::kTemplate, i);
      i += 2;
    } else if (s[i] == '{' && s[i + 1] == '|' && at_line_start(s, i)) {
      stack.emplace_back(Kind::kTable, i);
      i += 2;
    } else if (s[i] == '|' && s[i + 1] == '}' && at_line_start(s, i)) {
      close_kind(Kind::kTable, i);
      i += 2;
    } else {
      ++i;
    }
  }
  for (const auto &entry : stack) cut.emplace_back(entry.second, entry.second + 2);
  return erase_ranges(s, std::move(cut));
}

std::optional<char32_t> decode_entity(std::string_view name) {
  static const std::pair<std::string_view, char32_t> kNamed[] = {
      {"nbsp", U' '},    {"amp", U'&'},     {"lt", U'<'},     {"gt", U'>'},
      {"quot", U'"'},    {"apos", U'\''},   {"ndash", 0x2013}, {"mdash", 0x2014},
      {"hellip", 0x2026}, {"minus", 0x2212}, {"times", 0xD7},  {"thinsp", U' '},
      {"ensp", U' '},    {"emsp", U' '},    {"laquo", 0xAB},  {"raquo", 0xBB}};
  for (const auto &[n, cp] : kNamed) {
    if (name == n) return cp;
  }
  if (name.size() > 1 && name[0] == '#') {
    char32_t cp = 0;
    const bool hex = name[1] == 'x' || name[1] == 'X';
    for (std::size_t k = hex ? 2 : 1; k < name.size(); ++k) {
      const char c = name[k];
      int digit;
      if (std::isdigit(static_cast<unsigned char>(c))) {
        digit = c - '0';
      } else if (hex && std::isxdigit(static_cast<unsigned char>(c))) {
        digit = std::tolower(static_cast<unsigned char>(c)) - 'a' + 10;
      } else {
        return std::nullopt;
      }
      cp = cp * (hex ? 16 : 10) + static_cast<char32_t>(digit);
      if (cp > 0x10FFFF) return std::nullopt;
    }
    // Link syntax characters stay encoded so they cannot form markup.
    if (cp == '[' || cp == ']' || cp == '|' || cp == 0) return std::nullopt;
    return cp;
  }
  return std::nullopt;
}

std::string clean_inline(std::string_view line) {
  std::string out;
  out.reserve(line.size());
  std::size_t i = 0;
  while (i < line.size()) {
    const char c = line[i];
    if (c == '\'' && i + 1 < line.size() && line[i + 1] == '\'') {
      while (i < line.size() && line[i] == '\'') ++i;
      continue;
    }
    if (c == '_' && starts_with_at(line, i, "__")) {
      std::size_t j = i + 2;
      while (j < line.size() && std::isupper(static_cast<unsigned char>(line[j]))) ++j;
      if (j > i + 2 && starts_with_at(line, j, "__")) {
        i = j + 2;
        continue;
      }
    }
    if (c == '&') {
      const auto semi = line.find(';', i + 1);
      if (semi != std::string_view::npos && semi - i <= 10) {
        if (auto cp = decode_entity(line.substr(i + 1, semi - i - 1))) {
          text::append_utf8(out, *cp);
          i = semi + 1;
          continue;
        }
      }
    }
    out.push_back(c);
    ++i;
  }
  return out;
}

// Headings, list markers, rules, quote runs, magic words, entities.
std::string clean_lines(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t pos = 0;
  while (pos <= s.size()) {
    auto nl = s.find('\n', pos);
    if (nl == std::string_view::npos) nl = s.size();
    std::string_view line = s.substr(pos, nl - pos);
    std::string_view body = line;
    if (!body.empty() && body.front() == '=') {
      std::size_t lead = 0;
      while (lead < body.size() && body[lead] == '=') ++lead;
      std::string_view rest = text::trim(body.substr(lead));
      while (!rest.empty() && rest.back() == '=') rest.remove_suffix(1);
      body = text::trim(rest);
    } else if (body.starts_with("----")) {
      body = {};
    } else {
      std::size_t lead = 0;
      while (lead < body.size() && (body[lead] == '*' || body[lead] == '#' || body[lead] == ':' ||
                                    body[lead] == ';')) {
        ++lead;
      }
      if (lead > 0) body = text::trim(body.substr(lead));
    }
    out += clean_inline(body);
    if (nl < s.size()) out.push_back('\n');
    pos = nl + 1;
  }
  return out;
}

bool in_list(std::string_view value, std::initializer_list<std::string_view> names) {
  for (std::string_view n : names) {
    if (text::iequals_ascii(value, n)) return true;
  }
  return false;
}

bool is_media_namespace(std::string_view prefix) {
  return in_list(prefix, {"file", "image", "media", "category", "datei", "bild", "kategorie",
                          "fichier", "catégorie", "archivo", "imagen", "categoría", "categoria",
                          "bestand", "afbeelding", "categorie", "ficheiro", "файл", "категория",
                          "kategori", "berkas", "dosya"});
}

bool is_other_namespace(std::string_view prefix) {
  return in_list(prefix, {"wikipedia", "wp", "help", "template", "portal", "user", "talk",
                          "special", "wiktionary", "wikt", "project", "module", "draft",
                          "mediawiki", "vorlage", "hilfe", "benutzer", "modèle", "aide"});
}

bool looks_like_language_code(std::string_view prefix) {
  if (prefix == "simple") return true;
  const auto dash = prefix.find('-');
  const std::string_view head = prefix.substr(0, dash);
  if (head.size() < 2 || head.size() > 3) return false;
  return std::all_of(prefix.begin(), prefix.end(), [](char c) {
    return std::islower(static_cast<unsigned char>(c)) || c == '-';
  });
}

// Index of the "]]" matching the "[[" at `open`, honoring nesting.
std::optional<std::size_t> match_link(std::string_view s, std::size_t open) {
  int depth = 0;
  std::size_t i = open;
  while (i + 1 < s.size()) {
    if (s[i] == '[' && s[i + 1] == '[') {
      ++depth;
      i += 2;
    } else if (s[i] == ']' && s[i + 1] == ']') {
      if (--depth == 0) return i;
      i += 2;
    } else {
      ++i;
    }
  }
  return std::nullopt;
}

std::size_t top_level_pipe(std::string_view content) {
  int depth = 0;
  for (std::size_t i = 0; i < content.size(); ++i) {
    if (starts_with_at(content, i, "[[")) {
      ++depth;
      ++i;
    } else if (starts_with_at(content, i, "]]")) {
      --depth;
      ++i;
    } else if (content[i] == '|' && depth == 0) {
      return i;
    }
  }
  return std::string_view::npos;
}

bool is_external_link_start(std::string_view s, std::size_t i) {
  return istarts_with_at(s, i + 1, "http://") || istarts_with_at(s, i + 1, "https://") ||
         istarts_with_at(s, i + 1, "ftp://") || istarts_with_at(s, i + 1, "//") ||
         istarts_with_at(s, i + 1, "mailto:");
}

void resolve_links(std::string_view s, std::string &out, std::vector<TextAnchor> *anchors) {
  std::size_t i = 0;
  while (i < s.size()) {
    if (starts_with_at(s, i, "[[")) {
      auto close = match_link(s, i);
      if (!close) {
        i += 2;
        continue;
      }
      const std::string_view content = s.substr(i + 2, *close - i - 2);
      i = *close + 2;
      const std::size_t pipe = top_level_pipe(content);
      std::string_view target = text::trim(content.substr(0, pipe));
      const bool leading_colon = !target.empty() && target.front() == ':';
      if (leading_colon) target = text::trim(target.substr(1));
      const auto colon = target.find(':');
      const std::string_view prefix =
          colon == std::string_view::npos ? std::string_view() : text::trim(target.substr(0, colon));
      if (!leading_colon && !prefix.empty() &&
          (is_media_namespace(prefix) || looks_like_language_code(prefix))) {
        continue;
      }
      std::string_view surface_raw = target;
      if (pipe != std::string_view::npos && !text::trim(content.substr(pipe + 1)).empty()) {
        surface_raw = content.substr(pipe + 1);
      }
      const std::size_t begin = out.size();
      resolve_links(surface_raw, out, nullptr);
      const std::size_t end = out.size();
      const bool article_link = prefix.empty() || !(is_other_namespace(prefix) || leading_colon ||
                                                    is_media_namespace(prefix));
      std::string_view anchor_target = target.substr(0, target.find('#'));
      anchor_target = text::trim(anchor_target);
      if (anchors != nullptr && article_link && !anchor_target.empty() &&
          !text::trim(std::string_view(out).substr(begin, end - begin)).empty()) {
        anchors->push_back(TextAnchor{std::string(anchor_target), begin, end});
      }
    } else if (starts_with_at(s, i, "]]")) {
      i += 2;
    } else if (s[i] == '[' && is_external_link_start(s, i)) {
      const auto close = s.find(']', i + 1);
      const auto line_end = s.find('\n', i + 1);
      if (close == std::string_view::npos || (line_end != std::string_view::npos && line_end < close)) {
        ++i;
        continue;
      }
      const std::string_view content = s.substr(i + 1, close - i - 1);
      const auto space = content.find(' ');
      if (space != std::string_view::npos) {
        resolve_links(text::trim(content.substr(space + 1)), out, nullptr);
      }
      i = close + 1;
    } else {
      out.push_back(s[i]);
      ++i;
    }
  }
}

}  // namespace

StrippedText strip_wikitext(std::string_view wikitext) {
  std::string s = remove_comments(wikitext);
  s = remove_tags(s);
  s = remove_templates_and_tables(s);
  s = clean_lines(s);
  StrippedText result;
  result.text.reserve(s.size());
  resolve_links(s, result.text, &result.anchors);
  return result;
}

}  // namespace wikimrc::wikicorpus
