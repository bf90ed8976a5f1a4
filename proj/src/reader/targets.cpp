#include <algorithm>

#include "wikimrc/reader/model.hpp"

namespace wikimrc::reader {

std::vector<uint8_t> wae_targets(const std::vector<TokenSpan> &candidates,
                                 const std::vector<TokenSpan> &gold, bool answerable) {
  std::vector<uint8_t> targets(candidates.size(), 0);
  if (!answerable) return targets;
  if (gold.empty()) throw DataError("answerable input without gold spans");
  if (candidates.empty() || candidates.front() != TokenSpan{0, 0}) {
    throw DataError("candidate list must start with the [CLS] slot");
  }
  targets[0] = 1;
  for (const auto &g : gold) {
    if (g == TokenSpan{0, 0}) continue;
    // Context candidates are sorted by (start, end).
    auto it = std::lower_bound(candidates.begin() + 1, candidates.end(), g);
    if (it == candidates.end() || *it != g) {
      logger()->warn("gold span ({},{}) is not a candidate and is ignored", g.start, g.end);
      continue;
    }
    targets[static_cast<std::size_t>(it - candidates.begin())] = 1;
  }
  return targets;
}

}  // namespace wikimrc::reader
