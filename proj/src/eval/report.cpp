#include "wikimrc/eval/report.hpp"

#include <algorithm>
#include <sstream>

#include <fmt/format.h>

#include "wikimrc/eval/metrics.hpp"
#include "wikimrc/util/error.hpp"

namespace wikimrc::eval {
namespace {

struct Accumulator {
  MetricFamily family = MetricFamily::kSquad;
  std::size_t n = 0;
  double f1 = 0, em = 0;
  std::size_t matched = 0, predicted = 0, gold = 0, correct = 0;

  Cell cell() const {
    Cell c;
    switch (family) {
      case MetricFamily::kSquad:
        c.metrics["F1"] = n ? 100.0 * f1 / static_cast<double>(n) : 0.0;
        c.metrics["EM"] = n ? 100.0 * em / static_cast<double>(n) : 0.0;
        break;
      case MetricFamily::kSpan:
        c.metrics["F1"] = 100.0 * prf_from_counts(matched, predicted, gold).f1;
        break;
      case MetricFamily::kAccuracy:
        c.metrics["Acc."] = n ? 100.0 * static_cast<double>(correct) / static_cast<double>(n) : 0.0;
        break;
    }
    return c;
  }
};

std::string format_cell(const DatasetBlock &block, const Cell &cell) {
  std::string out;
  for (const auto &m : block.metric_names()) {
    if (!out.empty()) out += " / ";
    out += fmt::format("{:.1f}", cell.metrics.at(m));
  }
  return out;
}

std::string render_rows(const std::vector<std::vector<std::string>> &rows) {
  std::vector<std::size_t> widths;
  for (const auto &r : rows) {
    widths.resize(std::max(widths.size(), r.size()), 0);
    for (std::size_t c = 0; c < r.size(); ++c) widths[c] = std::max(widths[c], r[c].size());
  }
  std::ostringstream out;
  for (const auto &r : rows) {
    std::string line;
    for (std::size_t c = 0; c < r.size(); ++c) {
      if (c > 0) line += "  ";
      line += c == 0 ? fmt::format("{:<{}}", r[c], widths[c]) : fmt::format("{:>{}}", r[c], widths[c]);
    }
    out << line << '\n';
  }
  return out.str();
}

}  // namespace

std::string DatasetBlock::primary_metric() const {
  return family == MetricFamily::kAccuracy ? "Acc." : "F1";
}

std::vector<std::string> DatasetBlock::metric_names() const {
  switch (family) {
    case MetricFamily::kSquad: return {"F1", "EM"};
    case MetricFamily::kSpan: return {"F1"};
    case MetricFamily::kAccuracy: return {"Acc."};
  }
  return {};
}

EvalReport build_report(const std::vector<InstanceResult> &results) {
  std::map<std::string, std::map<std::string, Accumulator>> acc;
  std::map<std::string, MetricFamily> families;
  for (const auto &r : results) {
    auto [it, inserted] = families.emplace(r.dataset, r.family);
    if (!inserted && it->second != r.family) {
      throw DataError("dataset " + r.dataset + " mixes metric families");
    }
    Accumulator &a = acc[r.dataset][r.language];
    a.family = r.family;
    ++a.n;
    a.f1 += r.f1;
    a.em += r.em;
    a.matched += r.matched;
    a.predicted += r.predicted;
    a.gold += r.gold;
    a.correct += r.correct ? 1 : 0;
  }
  EvalReport report;
  double primary_sum = 0;
  for (const auto &[dataset, langs] : acc) {
    DatasetBlock &block = report.datasets[dataset];
    block.family = families.at(dataset);
    for (const auto &[lang, a] : langs) block.languages[lang] = a.cell();
    for (const auto &m : block.metric_names()) {
      double sum = 0;
      for (const auto &[lang, cell] : block.languages) sum += cell.metrics.at(m);
      block.average.metrics[m] = sum / static_cast<double>(block.languages.size());
    }
    primary_sum += block.average.metrics.at(block.primary_metric());
  }
  if (!report.datasets.empty()) report.overall = primary_sum / static_cast<double>(report.datasets.size());
  return report;
}

std::string EvalReport::render_text() const {
  std::ostringstream out;
  for (const auto &[dataset, block] : datasets) {
    std::string metrics;
    for (const auto &m : block.metric_names()) metrics += (metrics.empty() ? "" : " / ") + m;
    out << dataset << " results (" << metrics << ") for each language\n";
    std::vector<std::string> header{"Dataset"}, values{dataset};
    for (const auto &[lang, cell] : block.languages) {
      header.push_back(lang);
      values.push_back(format_cell(block, cell));
    }
    header.push_back("Avg.");
    values.push_back(format_cell(block, block.average));
    out << render_rows({header, values}) << '\n';
  }
  std::vector<std::string> header{"Summary"}, metric_row{"Metrics"}, values{"Score"};
  for (const auto &[dataset, block] : datasets) {
    header.push_back(dataset);
    std::string metrics;
    for (const auto &m : block.metric_names()) metrics += (metrics.empty() ? "" : " / ") + m;
    metric_row.push_back(metrics);
    values.push_back(format_cell(block, block.average));
  }
  header.push_back("Avg.");
  metric_row.push_back("");
  values.push_back(fmt::format("{:.1f}", overall));
  out << render_rows({header, metric_row, values});
  return out.str();
}

std::string EvalReport::render_tsv() const {
  std::ostringstream out;
  out << "dataset\tlanguage\tmetric\tvalue\n";
  for (const auto &[dataset, block] : datasets) {
    for (const auto &[lang, cell] : block.languages) {
      for (const auto &m : block.metric_names()) {
        out << fmt::format("{}\t{}\t{}\t{:.4f}\n", dataset, lang, m, cell.metrics.at(m));
      }
    }
    for (const auto &m : block.metric_names()) {
      out << fmt::format("{}\tAvg.\t{}\t{:.4f}\n", dataset, m, block.average.metrics.at(m));
    }
  }
  out << fmt::format("overall\tAvg.\tscore\t{:.4f}\n", overall);
  return out.str();
}

}  // namespace wikimrc::eval
