#pragma once

#include <map>
#include <string>
#include <vector>

namespace wikimrc::eval {

enum class MetricFamily {
  kSquad,     // F1 / EM, averaged over questions
  kSpan,      // micro F1 over typed spans
  kAccuracy,  // Acc.
};

// Score of one evaluated instance, tagged with where it belongs.
struct InstanceResult {
  std::string dataset;
  std::string language;
  MetricFamily family = MetricFamily::kSquad;
  double f1 = 0.0;         // kSquad
  double em = 0.0;         // kSquad
  std::size_t matched = 0;    // kSpan
  std::size_t predicted = 0;  // kSpan
  std::size_t gold = 0;       // kSpan
  bool correct = false;       // kAccuracy
};

// Metric values in percent.
struct Cell {
  std::map<std::string, double> metrics;  // "F1", "EM", "Acc."
};

struct DatasetBlock {
  MetricFamily family = MetricFamily::kSquad;
  std::map<std::string, Cell> languages;
  Cell average;  // unweighted mean over languages
  std::string primary_metric() const;
  std::vector<std::string> metric_names() const;
};

struct EvalReport {
  std::map<std::string, DatasetBlock> datasets;
  double overall = 0.0;  // mean of each dataset's primary-metric average

  // One per-language table per dataset (languages then Avg.), followed by a
  // summary row of dataset averages and the overall average.
  std::string render_text() const;
  // dataset \t language \t metric \t value; averages use language "Avg."
  // and the overall score uses dataset "overall".
  std::string render_tsv() const;
};

// Throws DataError when one dataset mixes metric families.
EvalReport build_report(const std::vector<InstanceResult> &results);

}  // namespace wikimrc::eval
