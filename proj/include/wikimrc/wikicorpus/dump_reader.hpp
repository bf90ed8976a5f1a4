#pragma once

#include <cstdint>
#include <deque>
#include <istream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "wikimrc/util/error.hpp"

namespace wikimrc::wikicorpus {

struct RawPage {
  std::string title;
  int namespace_id = 0;
  int64_t page_id = 0;
  std::optional<std::string> redirect_target;
  std::string wikitext;
  std::string language;

  bool is_redirect() const { return redirect_target.has_value(); }
  bool is_content() const { return namespace_id == 0 && !is_redirect(); }
};

// Raised on malformed or truncated XML. Carries the byte offset reported by
// the XML parser and the number of pages completed before the failure.
class DumpError : public DataError {
 public:
  DumpError(const std::string &message, uint64_t byte_offset, uint64_t pages_completed);

  uint64_t byte_offset() const { return byte_offset_; }
  uint64_t pages_completed() const { return pages_completed_; }

 private:
  uint64_t byte_offset_;
  uint64_t pages_completed_;
};

// Pull-style streaming reader over a MediaWiki XML export. Reads the input
// in fixed-size chunks; only the page under construction and pages already
// parsed but not yet pulled are held in memory.
//
//   DumpReader reader(in, "en");
//   while (auto page = reader.next()) { ... }
class DumpReader {
 public:
  DumpReader(std::istream &in, std::string language, std::size_t chunk_size = 1 << 16);
  ~DumpReader();

  DumpReader(const DumpReader &) = delete;
  DumpReader &operator=(const DumpReader &) = delete;

  // Next page in document order, or nullopt at the end of the dump.
  std::optional<RawPage> next();

  uint64_t pages_completed() const { return pages_completed_; }
  uint64_t pages_skipped() const { return pages_skipped_; }

  // High-water mark of bytes held in page buffers (page under construction
  // plus queued pages). Excludes the fixed-size read chunk.
  std::size_t peak_buffered_bytes() const { return peak_buffered_; }

 private:
  struct Impl;
  friend struct Impl;

  void feed_chunk();

  std::istream &in_;
  std::string language_;
  std::size_t chunk_size_;
  std::unique_ptr<Impl> impl_;
  std::deque<RawPage> ready_;
  bool finished_ = false;
  uint64_t pages_completed_ = 0;
  uint64_t pages_skipped_ = 0;
  std::size_t peak_buffered_ = 0;
};

// Convenience: reads the whole stream. Not streaming; intended for tests and
// small inputs.
std::vector<RawPage> read_all_pages(std::istream &in, const std::string &language);

}  // namespace wikimrc::wikicorpus
