#include "wikimrc/wikicorpus/dump_reader.hpp"

#include <cstring>
#include <expat.h>

#include "wikimrc/util/log.hpp"
#include "wikimrc/util/text.hpp"

namespace wikimrc::wikicorpus {
namespace {

// "#REDIRECT [[Target]]" fallback for exports that omit the <redirect> tag.
std::optional<std::string> redirect_from_wikitext(const std::string &wikitext) {
  std::string_view s = text::trim(wikitext);
  static const char *kMagic[] = {"#REDIRECT", "#WEITERLEITUNG", "#REDIRECTION"};
  for (const char *magic : kMagic) {
    const std::size_t n = std::strlen(magic);
    if (s.size() >= n && text::iequals_ascii(s.substr(0, n), magic)) {
      const auto open = s.find("[[", n);
      const auto close = s.find("]]", n);
      if (open == std::string_view::npos || close == std::string_view::npos || close < open) {
        return std::nullopt;
      }
      std::string_view target = s.substr(open + 2, close - open - 2);
      target = target.substr(0, target.find('|'));
      target = text::trim(target);
      if (target.empty()) return std::nullopt;
      return std::string(target);
    }
  }
  return std::nullopt;
}

}  // namespace

DumpError::DumpError(const std::string &message, uint64_t byte_offset, uint64_t pages_completed)
    : DataError("malformed dump at byte " + std::to_string(byte_offset) + " after " +
                std::to_string(pages_completed) + " complete pages: " + message),
      byte_offset_(byte_offset),
      pages_completed_(pages_completed) {}

struct DumpReader::Impl {
  enum class Field { kNone, kTitle, kNamespace, kId, kText };

  DumpReader *owner;
  XML_Parser parser;
  int depth = 0;
  int page_depth = -1;
  bool in_revision = false;
  bool seen_id = false;
  Field field = Field::kNone;
  RawPage current;
  std::string buffer;
  std::size_t queued_bytes = 0;

  explicit Impl(DumpReader *o) : owner(o), parser(XML_ParserCreate("UTF-8")) {
    XML_SetUserData(parser, this);
    XML_SetElementHandler(parser, &Impl::on_start, &Impl::on_end);
    XML_SetCharacterDataHandler(parser, &Impl::on_text);
  }
  ~Impl() { XML_ParserFree(parser); }

  void track() {
    const std::size_t held =
        buffer.size() + current.title.size() + current.wikitext.size() + queued_bytes;
    if (held > owner->peak_buffered_) owner->peak_buffered_ = held;
  }

  static void on_start(void *user, const XML_Char *name, const XML_Char **attrs) {
    auto *self = static_cast<Impl *>(user);
    ++self->depth;
    if (self->page_depth < 0) {
      if (std::strcmp(name, "page") == 0) {
        self->page_depth = self->depth;
        self->current = RawPage{};
        self->in_revision = false;
        self->seen_id = false;
      }
      return;
    }
    const int rel = self->depth - self->page_depth;
    if (rel == 1) {
      if (std::strcmp(name, "title") == 0) {
        self->field = Field::kTitle;
      } else if (std::strcmp(name, "ns") == 0) {
        self->field = Field::kNamespace;
      } else if (std::strcmp(name, "id") == 0 && !self->seen_id) {
        self->field = Field::kId;
      } else if (std::strcmp(name, "redirect") == 0) {
        for (int i = 0; attrs[i] != nullptr; i += 2) {
          if (std::strcmp(attrs[i], "title") == 0) self->current.redirect_target = attrs[i + 1];
        }
        if (!self->current.redirect_target) self->current.redirect_target = std::string();
      } else if (std::strcmp(name, "revision") == 0) {
        self->in_revision = true;
      }
    } else if (rel == 2 && self->in_revision && std::strcmp(name, "text") == 0) {
      self->field = Field::kText;
    }
    self->buffer.clear();
  }

  static void on_text(void *user, const XML_Char *s, int len) {
    auto *self = static_cast<Impl *>(user);
    if (self->field == Field::kNone) return;
    self->buffer.append(s, static_cast<std::size_t>(len));
    self->track();
  }

  static void on_end(void *user, const XML_Char *name) {
    auto *self = static_cast<Impl *>(user);
    if (self->page_depth >= 0) {
      const int rel = self->depth - self->page_depth;
      if (self->field != Field::kNone) {
        self->commit_field();
      } else if (rel == 1 && std::strcmp(name, "revision") == 0) {
        self->in_revision = false;
      } else if (rel == 0) {
        self->finish_page();
      }
    }
    --self->depth;
  }

  void commit_field() {
    switch (field) {
      case Field::kTitle:
        current.title = std::string(text::trim(buffer));
        break;
      case Field::kNamespace:
        current.namespace_id = std::atoi(buffer.c_str());
        break;
      case Field::kId:
        current.page_id = std::atoll(buffer.c_str());
        seen_id = true;
        break;
      case Field::kText:
        current.wikitext = std::move(buffer);
        break;
      case Field::kNone:
        break;
    }
    buffer.clear();
    field = Field::kNone;
  }

  void finish_page() {
    page_depth = -1;
    ++owner->pages_completed_;
    if (current.title.empty()) {
      ++owner->pages_skipped_;
      logger()->warn("skipping page without title (page #{}, byte {})", owner->pages_completed_,
                     XML_GetCurrentByteIndex(parser));
      current = RawPage{};
      return;
    }
    if (current.redirect_target && current.redirect_target->empty()) {
      if (auto target = redirect_from_wikitext(current.wikitext)) current.redirect_target = target;
    } else if (!current.redirect_target) {
      current.redirect_target = redirect_from_wikitext(current.wikitext);
    }
    current.language = owner->language_;
    queued_bytes += current.title.size() + current.wikitext.size();
    owner->ready_.push_back(std::move(current));
    current = RawPage{};
  }
};

DumpReader::DumpReader(std::istream &in, std::string language, std::size_t chunk_size)
    : in_(in),
      language_(std::move(language)),
      chunk_size_(chunk_size),
      impl_(std::make_unique<Impl>(this)) {}

DumpReader::~DumpReader() = default;

void DumpReader::feed_chunk() {
  std::vector<char> chunk(chunk_size_);
  in_.read(chunk.data(), static_cast<std::streamsize>(chunk.size()));
  const auto got = in_.gcount();
  const bool final = got < static_cast<std::streamsize>(chunk.size()) || in_.eof();
  if (XML_Parse(impl_->parser, chunk.data(), static_cast<int>(got), final ? 1 : 0) ==
      XML_STATUS_ERROR) {
    throw DumpError(XML_ErrorString(XML_GetErrorCode(impl_->parser)),
                    static_cast<uint64_t>(XML_GetCurrentByteIndex(impl_->parser)),
                    pages_completed_);
  }
  if (final) finished_ = true;
}

std::optional<RawPage> DumpReader::next() {
  while (ready_.empty() && !finished_) feed_chunk();
  if (ready_.empty()) return std::nullopt;
  RawPage page = std::move(ready_.front());
  ready_.pop_front();
  impl_->queued_bytes -= page.title.size() + page.wikitext.size();
  return page;
}

std::vector<RawPage> read_all_pages(std::istream &in, const std::string &language) {
  DumpReader reader(in, language);
  std::vector<RawPage> pages;
  while (auto page = reader.next()) pages.push_back(std::move(*page));
  return pages;
}

}  // namespace wikimrc::wikicorpus
