#pragma once

#include <cstdint>
#include <functional>
#include <istream>
#include <string>

#include "wikimrc/util/tokenizer.hpp"
#include "wikimrc/wikicorpus/article.hpp"
#include "wikimrc/wikicorpus/entity_index.hpp"

namespace wikimrc::wikicorpus {

struct CorpusCounts {
  std::size_t pages = 0;
  std::size_t articles = 0;
  std::size_t redirects = 0;
  std::size_t other_namespace = 0;
};

// Streams one dump: redirect pages go into `redirects`, content pages are
// stripped and tokenized on `workers` threads in bounded batches and handed
// to `sink` in document order. Article ids are assigned consecutively from
// `next_id`, which is advanced.
CorpusCounts build_corpus(std::istream &dump, const std::string &language,
                          const TokenizerRegistry &tokenizers, int64_t &next_id, int workers,
                          RedirectMap &redirects, const std::function<void(Article &&)> &sink);

}  // namespace wikimrc::wikicorpus
