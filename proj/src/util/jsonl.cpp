#include "wikimrc/util/jsonl.hpp"

#include <fstream>

#include "wikimrc/util/error.hpp"

namespace wikimrc {

void for_each_jsonl(std::istream &in, const std::string &source_name,
                    const std::function<void(const nlohmann::json &)> &fn) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json record;
    try {
      record = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error &e) {
      throw DataError(source_name + ":" + std::to_string(line_no) + ": " + e.what());
    }
    fn(record);
  }
}

void for_each_jsonl_file(const std::string &path,
                         const std::function<void(const nlohmann::json &)> &fn) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  for_each_jsonl(in, path, fn);
}

}  // namespace wikimrc
