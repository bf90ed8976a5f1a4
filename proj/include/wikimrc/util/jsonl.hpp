#pragma once

#include <functional>
#include <istream>
#include <ostream>
#include <string>

#include <nlohmann/json.hpp>

namespace wikimrc {

// Calls `fn` for each non-blank line parsed as JSON. Parse failures raise
// DataError naming the source and line number.
void for_each_jsonl(std::istream &in, const std::string &source_name,
                    const std::function<void(const nlohmann::json &)> &fn);

void for_each_jsonl_file(const std::string &path,
                         const std::function<void(const nlohmann::json &)> &fn);

// One compact record per line, UTF-8, '\n' terminated.
inline void write_jsonl(std::ostream &out, const nlohmann::ordered_json &record) {
  out << record.dump(-1, ' ', false, nlohmann::ordered_json::error_handler_t::replace) << '\n';
}

}  // namespace wikimrc
