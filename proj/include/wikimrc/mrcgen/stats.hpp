#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "wikimrc/mrcgen/generator.hpp"

namespace wikimrc::mrcgen {

struct LanguageCounts {
  std::size_t entities = 0;
  std::size_t examples = 0;
};

// Streaming per-language entity and example counter.
class CorpusStats {
 public:
  void add(const MRCExample &example);
  void add(const std::string &language, const std::string &entity);

  // Rows in language order.
  std::map<std::string, LanguageCounts> rows() const;
  LanguageCounts total() const;

  // Aligned text table: Language / #Entity / #Example, then a Total row.
  std::string render_table() const;
  // Tab-separated rows: lang, entities, examples. The last row is "total".
  std::string render_tsv() const;

 private:
  std::map<std::string, std::set<std::string>> entities_;
  std::map<std::string, std::size_t> examples_;
};

// Thousands separators: 19303940 -> "19,303,940".
std::string group_thousands(std::size_t n);

}  // namespace wikimrc::mrcgen
