#pragma once

#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "eoilp/flowsheet.hpp"
#include "eoilp/simulator.hpp"

namespace eoilp::harness {

class PerturbationError : public std::runtime_error {
 public:
  PerturbationError(const std::string& msg, std::size_t line)
      : std::runtime_error("line " + std::to_string(line) + ": " + msg), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct PerturbationRow {
  std::string param;  // component.variable path, e.g. SRCR1.P or SRCR1.M[C2H4]
  std::string unit;
  bool toggle = false;  // unit "bool": default is check/uncheck
  bool checked = false;
  double value = 0.0;   // default for numeric rows
  std::optional<double> min, max;
  bool uniform = false;
  std::size_t line = 0;
};

struct PerturbationFile {
  std::vector<PerturbationRow> rows;
};

/// CSV with header `param,unit,default,min,max,instr`. An empty file is a no-op.
PerturbationFile parse_perturbation_file(std::string_view text);
std::string print_perturbation_file(const PerturbationFile& f);

/// Recognised parameter paths and the unit each expects.
std::vector<std::pair<std::string, std::string>> parameter_paths();

/// Uniform double in [lo, hi] from the top 53 bits of one generator draw.
double sample_uniform(std::mt19937_64& rng, double lo, double hi);

struct AppliedPerturbation {
  sim::FlowsheetConfig config;
  std::vector<std::pair<std::string, double>> assignments;  // param path -> value set
  std::vector<sim::Var> perturbed_vars;                     // monitored variables set directly
};

/// Samples every uniform row (in file order, one draw each) and applies the
/// result to a copy of `base`.
AppliedPerturbation apply_perturbation(const PerturbationFile& f, const sim::FlowsheetConfig& base, std::mt19937_64& rng);

}  // namespace eoilp::harness
