// Writes the bundled miniature dumps, tagging set and schemes.
//
//   make_mini_world <output-dir>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "mini_world.hpp"
#include "wikimrc/util/jsonl.hpp"

namespace fs = std::filesystem;
using namespace wikimrc;

namespace {

void write_file(const fs::path &path, const std::string &content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

void write_tagging(const fs::path &path, const std::vector<taskconv::TaggingInstance> &rows) {
  std::ofstream out(path, std::ios::binary);
  for (const auto &r : rows) write_jsonl(out, taskconv::tagging_to_json(r));
}

}  // namespace

int main(int argc, char **argv) {
  if (argc != 2) {
    std::cerr << "usage: make_mini_world <output-dir>\n";
    return 1;
  }
  try {
    const fs::path dir = argv[1];
    fs::create_directories(dir);
    for (const auto &lang : miniworld::languages()) {
      write_file(dir / (lang + "wiki.xml"), miniworld::dump_xml(lang));
    }
    write_tagging(dir / "ner_train.jsonl", miniworld::ner_sentences(200, 11, "train-"));
    write_tagging(dir / "ner_dev.jsonl", miniworld::ner_sentences(100, 12, "dev-"));
    write_file(dir / "conll_scheme.json", taskconv::scheme_to_json(miniworld::conll_scheme()).dump(2) + "\n");
  } catch (const std::exception &e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
  return 0;
}
