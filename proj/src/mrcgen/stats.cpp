#include "wikimrc/mrcgen/stats.hpp"

#include <algorithm>
#include <sstream>

#include <fmt/format.h>

namespace wikimrc::mrcgen {

void CorpusStats::add(const MRCExample &example) { add(example.language, example.entity); }

void CorpusStats::add(const std::string &language, const std::string &entity) {
  entities_[language].insert(entity);
  ++examples_[language];
}

std::map<std::string, LanguageCounts> CorpusStats::rows() const {
  std::map<std::string, LanguageCounts> out;
  for (const auto &[lang, names] : entities_) {
    out[lang] = LanguageCounts{names.size(), examples_.at(lang)};
  }
  return out;
}

LanguageCounts CorpusStats::total() const {
  LanguageCounts t;
  for (const auto &[lang, c] : rows()) {
    t.entities += c.entities;
    t.examples += c.examples;
  }
  return t;
}

std::string group_thousands(std::size_t n) {
  std::string digits = std::to_string(n);
  std::string out;
  const std::size_t lead = digits.size() % 3;
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (i > 0 && (i % 3) == lead % 3) out.push_back(',');
    out.push_back(digits[i]);
  }
  return out;
}

std::string CorpusStats::render_table() const {
  std::vector<std::vector<std::string>> cells;
  cells.push_back({"Language", "#Entity", "#Example"});
  for (const auto &[lang, c] : rows()) {
    cells.push_back({lang, group_thousands(c.entities), group_thousands(c.examples)});
  }
  const LanguageCounts t = total();
  cells.push_back({"Total", group_thousands(t.entities), group_thousands(t.examples)});
  std::size_t widths[3] = {0, 0, 0};
  for (const auto &row : cells) {
    for (int c = 0; c < 3; ++c) widths[c] = std::max(widths[c], row[c].size());
  }
  std::ostringstream out;
  for (std::size_t r = 0; r < cells.size(); ++r) {
    if (r == cells.size() - 1) {
      out << std::string(widths[0] + widths[1] + widths[2] + 4, '-') << '\n';
    }
    out << fmt::format("{:<{}}  {:>{}}  {:>{}}\n", cells[r][0], widths[0], cells[r][1], widths[1],
                       cells[r][2], widths[2]);
  }
  return out.str();
}

std::string CorpusStats::render_tsv() const {
  std::ostringstream out;
  out << "lang\tentities\texamples\n";
  for (const auto &[lang, c] : rows()) out << lang << '\t' << c.entities << '\t' << c.examples << '\n';
  const LanguageCounts t = total();
  out << "total\t" << t.entities << '\t' << t.examples << '\n';
  return out.str();
}

}  // namespace wikimrc::mrcgen
