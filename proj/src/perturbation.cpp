#include "eoilp/perturbation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <set>

#include "eoilp/text_config.hpp"

namespace eoilp::harness {

using sim::FlowsheetConfig;
using sim::Var;

namespace {

struct Param {
  std::string path;
  std::set<std::string> units;
  std::function<void(FlowsheetConfig&, double)> set;
  std::optional<Var> monitored;
  // Controller whose mode a bool row on this path toggles: 'F' flow, 'X' temperature.
  char controller = 0;
};

const std::vector<Param>& params() {
  static const std::vector<Param> p{
      {"SRCR1.P", {"bar"}, [](FlowsheetConfig& c, double v) { c.source.pressure_bar = v; }, Var::srcr1_p},
      {"SRCR1.T", {"degC", "C", "°C", "ºC"}, [](FlowsheetConfig& c, double v) { c.source.temperature_c = v; },
       Var::srcr1_t},
      {"SRCR1.M[C2H4]", {"kmol"}, [](FlowsheetConfig& c, double v) { c.source.ethylene_kmol = v; }, Var::srcr1_inv},
      {"SRCR1.M[O2]", {"kmol"}, [](FlowsheetConfig& c, double v) { c.source.oxygen_kmol = v; }, Var::srcr1_inv},
      {"SRCR1.M[N2]", {"kmol"}, [](FlowsheetConfig& c, double v) { c.source.inert_kmol = v; }, Var::srcr1_inv},
      {"SRCE1.P", {"bar"}, [](FlowsheetConfig& c, double v) { c.heat_exchanger.cw_pressure_bar = v; }, std::nullopt},
      {"SRCE1.T", {"degC", "C", "°C", "ºC"},
       [](FlowsheetConfig& c, double v) { c.heat_exchanger.cw_temperature_c = v; }, Var::e2_tsi},
      {"FC.SP", {"kg/s"}, [](FlowsheetConfig& c, double v) { c.flow_controller.setpoint_kg_s = v; }, Var::fc_sp, 'F'},
      {"FC.OP", {"fraction"}, [](FlowsheetConfig& c, double v) { c.flow_controller.manual_output = v; }, Var::fc_op,
       'F'},
      {"XC1.SP", {"degC", "C", "°C", "ºC"},
       [](FlowsheetConfig& c, double v) { c.heat_exchanger.controller.setpoint_c = v; }, Var::xc1_sp, 'X'},
      {"XC1.OP", {"fraction"}, [](FlowsheetConfig& c, double v) { c.heat_exchanger.controller.manual_output = v; },
       Var::xc1_op, 'X'},
      {"CWV.OP", {"fraction"}, [](FlowsheetConfig& c, double v) { c.heat_exchanger.outlet_valve = v; },
       Var::cw_out_op},
      {"E2.UA", {"kW/K"}, [](FlowsheetConfig& c, double v) { c.heat_exchanger.ua_kw_k = v; }, std::nullopt},
      {"K1.RATIO", {"ratio", "-"}, [](FlowsheetConfig& c, double v) { c.compressor.pressure_ratio = v; },
       std::nullopt},
      {"K1.EFF", {"fraction"}, [](FlowsheetConfig& c, double v) { c.compressor.efficiency = v; }, std::nullopt},
      {"R1.UA", {"kW/K"}, [](FlowsheetConfig& c, double v) { c.reactor.jacket_ua_kw_k = v; }, std::nullopt},
      {"SNK1.P", {"bar"}, [](FlowsheetConfig& c, double v) { c.sink.pressure_bar = v; }, Var::snk1_p},
      {"LEAK1.F", {"fraction"}, [](FlowsheetConfig& c, double v) { c.leak.before_compressor = v; }, std::nullopt},
      {"LEAK2.F", {"fraction"}, [](FlowsheetConfig& c, double v) { c.leak.before_reactor = v; }, std::nullopt},
  };
  return p;
}

const Param* find_param(std::string_view path) {
  for (const auto& p : params())
    if (p.path == path) return &p;
  return nullptr;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out(1);
  for (char c : line) {
    if (c == ',') out.emplace_back();
    else out.back() += c;
  }
  for (auto& s : out) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    s = b == std::string::npos ? "" : s.substr(b, e - b + 1);
  }
  return out;
}

double number(const std::string& s, std::size_t line, const char* column) {
  double v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size() || !std::isfinite(v))
    throw PerturbationError(std::string("column '") + column + "': expected a number, got '" + s + "'", line);
  return v;
}

}  // namespace

std::vector<std::pair<std::string, std::string>> parameter_paths() {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& p : params()) out.emplace_back(p.path, *p.units.begin());
  return out;
}

PerturbationFile parse_perturbation_file(std::string_view text) {
  PerturbationFile f;
  std::size_t line = 0, pos = 0;
  bool header = false;
  while (pos < text.size()) {
    const auto nl = text.find('\n', pos);
    std::string raw(text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos));
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    ++line;
    if (raw.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split_csv(raw);
    if (!header) {
      if (cells != std::vector<std::string>{"param", "unit", "default", "min", "max", "instr"})
        throw PerturbationError("expected header 'param,unit,default,min,max,instr'", line);
      header = true;
      continue;
    }
    if (cells.size() != 6) throw PerturbationError("expected 6 columns, got " + std::to_string(cells.size()), line);
    PerturbationRow r;
    r.param = cells[0];
    r.unit = cells[1];
    r.line = line;
    const Param* p = find_param(r.param);
    if (!p) throw PerturbationError("unknown parameter path '" + r.param + "'", line);
    if (r.unit == "bool") {
      if (!p->controller) throw PerturbationError("'" + r.param + "' cannot be toggled", line);
      if (cells[2] != "check" && cells[2] != "uncheck")
        throw PerturbationError("bool rows take 'check' or 'uncheck', got '" + cells[2] + "'", line);
      if (!cells[3].empty() || !cells[4].empty() || !cells[5].empty())
        throw PerturbationError("bool rows take no bounds or instruction", line);
      r.toggle = true;
      r.checked = cells[2] == "check";
    } else {
      if (!p->units.contains(r.unit))
        throw PerturbationError("'" + r.param + "' expects unit '" + *p->units.begin() + "', got '" + r.unit + "'",
                                line);
      r.value = number(cells[2], line, "default");
      if (!cells[3].empty()) r.min = number(cells[3], line, "min");
      if (!cells[4].empty()) r.max = number(cells[4], line, "max");
      if (r.min && r.max && *r.min > *r.max) throw PerturbationError("min exceeds max", line);
      if (cells[5] == "uniform") {
        if (!r.min || !r.max) throw PerturbationError("'uniform' needs both min and max", line);
        r.uniform = true;
      } else if (!cells[5].empty()) {
        throw PerturbationError("unknown instruction '" + cells[5] + "'", line);
      }
    }
    f.rows.push_back(std::move(r));
  }
  return f;
}

std::string print_perturbation_file(const PerturbationFile& f) {
  std::string out = "param,unit,default,min,max,instr\n";
  for (const auto& r : f.rows) {
    out += r.param + "," + r.unit + ",";
    if (r.toggle) {
      out += r.checked ? "check,,," : "uncheck,,,";
    } else {
      out += config::format_double(r.value) + ",";
      out += (r.min ? config::format_double(*r.min) : "") + ",";
      out += (r.max ? config::format_double(*r.max) : "") + ",";
      out += r.uniform ? "uniform" : "";
    }
    out += "\n";
  }
  return out;
}

double sample_uniform(std::mt19937_64& rng, double lo, double hi) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return std::clamp(lo + (hi - lo) * u, lo, hi);
}

AppliedPerturbation apply_perturbation(const PerturbationFile& f, const FlowsheetConfig& base, std::mt19937_64& rng) {
  AppliedPerturbation out{base, {}, {}};
  std::map<char, bool> manual;  // controller -> manual requested
  for (const auto& r : f.rows) {
    const Param* p = find_param(r.param);
    if (r.toggle) {
      const bool sp = r.param.ends_with(".SP");
      // Unchecking a setpoint or checking an output both hand the valve to the operator.
      manual[p->controller] = sp ? !r.checked : r.checked;
      continue;
    }
    double v = r.value;
    if (r.uniform) v = sample_uniform(rng, *r.min, *r.max);
    else if (r.min && r.max && *r.min == *r.max) v = *r.min;
    p->set(out.config, v);
    out.assignments.emplace_back(r.param, v);
    if (p->monitored && std::find(out.perturbed_vars.begin(), out.perturbed_vars.end(), *p->monitored) ==
                            out.perturbed_vars.end())
      out.perturbed_vars.push_back(*p->monitored);
  }
  for (auto [ctrl, is_manual] : manual) {
    auto& m = ctrl == 'F' ? out.config.flow_controller.manual_output : out.config.heat_exchanger.controller.manual_output;
    if (!is_manual) m.reset();
    else if (!m) throw PerturbationError("manual mode requested without an output value", 0);
  }
  try {
    out.config.validate();
  } catch (const std::invalid_argument& e) {
    throw PerturbationError(std::string("perturbed configuration is invalid: ") + e.what(), 0);
  }
  return out;
}

}  // namespace eoilp::harness
