#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace eoilp::config {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& msg, std::size_t line = 0)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + msg : msg), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct Entry {
  std::string key;
  std::string value;
  std::size_t line = 0;
};

/// `key = value` lines. `#` starts a comment; `[section]` prefixes later keys with `section.`.
std::vector<Entry> parse_key_values(std::string_view text);

double to_double(const Entry& e);
std::int64_t to_int(const Entry& e);
bool to_bool(const Entry& e);
/// Comma or whitespace separated list.
std::vector<std::string> to_list(const Entry& e);

/// Shortest text that reads back to the same double.
std::string format_double(double v);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

}  // namespace eoilp::config
