#pragma once

#include <map>
#include <string>

namespace segline {

// Flat key=value config files: one pair per line, '#' comments, blank lines
// ignored. Values keep their raw text; typed parsing happens in the
// consuming config struct.
std::map<std::string, std::string> parse_kv_text(const std::string& text);
std::map<std::string, std::string> load_kv_file(const std::string& path);

bool parse_bool(const std::string& value, const std::string& key);

}  // namespace segline
