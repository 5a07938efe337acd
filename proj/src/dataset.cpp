#include "eoilp/dataset.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

#include "eoilp/text_config.hpp"

namespace eoilp::harness {

std::string_view to_string(Mode m) { return m == Mode::Static ? "static" : "dynamic"; }

Mode parse_mode(std::string_view s) {
  if (s == "static") return Mode::Static;
  if (s == "dynamic") return Mode::Dynamic;
  throw std::invalid_argument("mode must be 'static' or 'dynamic', got '" + std::string(s) + "'");
}

bool DataRow::sentinel() const {
  for (double v : values.values)
    if (!std::isnan(v)) return false;
  return true;
}

std::vector<std::string> dataset_header(Mode m) {
  std::vector<std::string> h{"failure", "run_index"};
  if (m == Mode::Dynamic) h.emplace_back("timepoint");
  for (const auto& v : sim::variables()) h.emplace_back(v.name);
  return h;
}

std::vector<std::string> Dataset::header() const { return dataset_header(mode); }

namespace {

void append_double(std::string& out, double v) {
  if (std::isnan(v)) {
    out += "nan";
    return;
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == ',') {
      out.push_back(line.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

double cell_double(std::string_view s, std::size_t line, std::size_t col) {
  if (s == "nan") return std::nan("");
  double v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size() || s.empty())
    throw DatasetError("non-numeric cell '" + std::string(s) + "'", line, col);
  return v;
}

}  // namespace

std::string format_dataset(const Dataset& d) {
  std::string out;
  const auto h = d.header();
  for (std::size_t i = 0; i < h.size(); ++i) out += (i ? "," : "") + h[i];
  out += '\n';
  for (const auto& r : d.rows) {
    if (r.failure.find(',') != std::string::npos) throw std::invalid_argument("failure label contains a comma");
    out += r.failure;
    out += ',';
    out += std::to_string(r.run_index);
    if (d.mode == Mode::Dynamic) {
      out += ',';
      append_double(out, r.timepoint);
    }
    for (double v : r.values.values) {
      out += ',';
      append_double(out, v);
    }
    out += '\n';
  }
  return out;
}

Dataset parse_dataset(std::string_view text) {
  Dataset d;
  std::size_t pos = 0, line = 0;
  bool have_header = false;
  while (pos < text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    ++line;
    if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
    if (raw.empty()) continue;
    const auto cells = split(raw);
    if (!have_header) {
      if (cells.size() == 27) d.mode = Mode::Static;
      else if (cells.size() == 28) d.mode = Mode::Dynamic;
      else throw DatasetError("header has " + std::to_string(cells.size()) + " columns, expected 27 or 28", line);
      const auto expect = d.header();
      for (std::size_t i = 0; i < cells.size(); ++i)
        if (cells[i] != expect[i])
          throw DatasetError("header column '" + std::string(cells[i]) + "', expected '" + expect[i] + "'", line,
                             i + 1);
      have_header = true;
      continue;
    }
    if (cells.size() != d.columns())
      throw DatasetError("row has " + std::to_string(cells.size()) + " columns, expected " +
                             std::to_string(d.columns()),
                         line);
    DataRow r;
    r.failure = std::string(cells[0]);
    if (r.failure.empty()) throw DatasetError("empty failure label", line, 1);
    std::int64_t idx = 0;
    auto [p, ec] = std::from_chars(cells[1].data(), cells[1].data() + cells[1].size(), idx);
    if (ec != std::errc{} || p != cells[1].data() + cells[1].size())
      throw DatasetError("run_index is not an integer", line, 2);
    r.run_index = idx;
    std::size_t c = 2;
    if (d.mode == Mode::Dynamic) {
      r.timepoint = cell_double(cells[2], line, 3);
      c = 3;
    }
    for (std::size_t i = 0; i < sim::kVarCount; ++i) r.values.values[i] = cell_double(cells[c + i], line, c + i + 1);
    d.rows.push_back(std::move(r));
  }
  if (!have_header) throw DatasetError("missing header", line);
  return d;
}

void write_dataset(const Dataset& d, const std::string& path) { config::write_file(path, format_dataset(d)); }

Dataset read_dataset(const std::string& path) { return parse_dataset(config::read_file(path)); }

}  // namespace eoilp::harness
