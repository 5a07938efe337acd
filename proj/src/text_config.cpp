#include "eoilp/text_config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace eoilp::config {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

std::vector<Entry> parse_key_values(std::string_view text) {
  std::vector<Entry> out;
  std::string section;
  std::size_t line = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line;
    if (auto c = raw.find('#'); c != std::string_view::npos) raw = raw.substr(0, c);
    const std::string s = trim(raw);
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError("unterminated section header", line);
      section = trim(std::string_view(s).substr(1, s.size() - 2));
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value'", line);
    std::string key = trim(std::string_view(s).substr(0, eq));
    if (key.empty()) throw ConfigError("empty key", line);
    if (!section.empty()) key = section + "." + key;
    out.push_back({std::move(key), trim(std::string_view(s).substr(eq + 1)), line});
  }
  return out;
}

double to_double(const Entry& e) {
  double v = 0;
  const auto* end = e.value.data() + e.value.size();
  auto [p, ec] = std::from_chars(e.value.data(), end, v);
  if (ec != std::errc{} || p != end) throw ConfigError("'" + e.key + "': expected a number, got '" + e.value + "'", e.line);
  return v;
}

std::int64_t to_int(const Entry& e) {
  std::int64_t v = 0;
  const auto* end = e.value.data() + e.value.size();
  auto [p, ec] = std::from_chars(e.value.data(), end, v);
  if (ec != std::errc{} || p != end) throw ConfigError("'" + e.key + "': expected an integer, got '" + e.value + "'", e.line);
  return v;
}

bool to_bool(const Entry& e) {
  if (e.value == "true" || e.value == "1" || e.value == "yes" || e.value == "on") return true;
  if (e.value == "false" || e.value == "0" || e.value == "no" || e.value == "off") return false;
  throw ConfigError("'" + e.key + "': expected a boolean, got '" + e.value + "'", e.line);
}

std::vector<std::string> to_list(const Entry& e) {
  std::string s = e.value;
  for (auto& c : s)
    if (c == ',') c = ' ';
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

std::string format_double(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << content;
  if (!out) throw ConfigError("write failed for '" + path + "'");
}

}  // namespace eoilp::config
