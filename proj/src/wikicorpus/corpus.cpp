#include "wikimrc/wikicorpus/corpus.hpp"

#include <algorithm>
#include <thread>
#include <vector>

#include "wikimrc/wikicorpus/dump_reader.hpp"

namespace wikimrc::wikicorpus {
namespace {

constexpr std::size_t kBatchPages = 256;

void convert_batch(std::vector<RawPage> &pages, std::vector<Article> &out, int64_t first_id,
                   const Tokenizer &tokenizer, int workers) {
  out.assign(pages.size(), Article{});
  const std::size_t n_workers =
      std::max<std::size_t>(1, std::min<std::size_t>(static_cast<std::size_t>(workers), pages.size()));
  auto work = [&](std::size_t w) {
    for (std::size_t i = w; i < pages.size(); i += n_workers) {
      out[i] = make_article(pages[i], first_id + static_cast<int64_t>(i), tokenizer);
    }
  };
  if (n_workers == 1) {
    work(0);
    return;
  }
  std::vector<std::jthread> threads;
  for (std::size_t w = 0; w < n_workers; ++w) threads.emplace_back(work, w);
}

}  // namespace

CorpusCounts build_corpus(std::istream &dump, const std::string &language,
                          const TokenizerRegistry &tokenizers, int64_t &next_id, int workers,
                          RedirectMap &redirects, const std::function<void(Article &&)> &sink) {
  const Tokenizer &tokenizer = tokenizers.for_language(language);
  DumpReader reader(dump, language);
  CorpusCounts counts;
  std::vector<RawPage> batch;
  std::vector<Article> converted;
  auto flush = [&] {
    convert_batch(batch, converted, next_id, tokenizer, workers);
    next_id += static_cast<int64_t>(batch.size());
    for (auto &a : converted) sink(std::move(a));
    counts.articles += batch.size();
    batch.clear();
  };
  while (auto page = reader.next()) {
    ++counts.pages;
    if (page->is_redirect()) {
      ++counts.redirects;
      add_redirect(redirects, *page);
      continue;
    }
    if (!page->is_content()) {
      ++counts.other_namespace;
      continue;
    }
    batch.push_back(std::move(*page));
    if (batch.size() == kBatchPages) flush();
  }
  if (!batch.empty()) flush();
  return counts;
}

}  // namespace wikimrc::wikicorpus
