#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace wikimrc::wikicorpus {

// An internal link found while stripping: `target` is the raw link target
// (section fragment removed, not yet normalized) and [begin, end) is the
// byte range of its surface text in the cleaned output.
struct TextAnchor {
  std::string target;
  std::size_t begin = 0;
  std::size_t end = 0;

  bool operator==(const TextAnchor &) const = default;
};

struct StrippedText {
  std::string text;
  std::vector<TextAnchor> anchors;
};

// Reduces wikitext to plain text plus anchors.
//
// Removed: comments, <ref> and similar content-bearing tags, templates
// {{...}}, tables {|...|}, file/image/category links and interlanguage links,
// bold/italic quote runs, magic words. Kept as text: headings, list items,
// other HTML tags' content, external link labels, links to non-article
// namespaces. Nested constructs are eliminated innermost-first; an unmatched
// opener or closer is dropped on its own and the rest of the text is kept.
StrippedText strip_wikitext(std::string_view wikitext);

}  // namespace wikimrc::wikicorpus
