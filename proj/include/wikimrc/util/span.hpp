#pragma once

#include <compare>
#include <cstddef>

namespace wikimrc {

// Inclusive token range [start, end].
struct TokenSpan {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t width() const { return end - start + 1; }
  bool overlaps(const TokenSpan &o) const { return start <= o.end && o.start <= end; }

  auto operator<=>(const TokenSpan &) const = default;
};

}  // namespace wikimrc
