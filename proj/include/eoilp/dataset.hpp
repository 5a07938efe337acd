#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "eoilp/simulator.hpp"

namespace eoilp::harness {

enum class Mode { Static, Dynamic };

std::string_view to_string(Mode m);
Mode parse_mode(std::string_view s);

inline constexpr std::string_view kNominalLabel = "null";

class DatasetError : public std::runtime_error {
 public:
  DatasetError(const std::string& msg, std::size_t line, std::size_t column = 0)
      : std::runtime_error("line " + std::to_string(line) + (column ? ", column " + std::to_string(column) : "") +
                           ": " + msg) {}
};

struct DataRow {
  std::string failure;  // "location:kind", or "null" for nominal runs
  std::int64_t run_index = 0;
  double timepoint = 0.0;  // dynamic only
  sim::ProcessState values;
  bool sentinel() const;  // unsolved run placeholder: every value is NaN
};

struct Dataset {
  Mode mode = Mode::Static;
  std::vector<DataRow> rows;

  std::vector<std::string> header() const;
  std::size_t columns() const { return mode == Mode::Static ? 27 : 28; }
};

std::vector<std::string> dataset_header(Mode m);

/// CSV text. Values use 17 significant digits so reading back is lossless.
std::string format_dataset(const Dataset& d);
Dataset parse_dataset(std::string_view text);

void write_dataset(const Dataset& d, const std::string& path);
Dataset read_dataset(const std::string& path);

}  // namespace eoilp::harness
