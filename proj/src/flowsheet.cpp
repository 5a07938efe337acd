#include "eoilp/flowsheet.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>

#include "eoilp/text_config.hpp"

namespace eoilp::sim {

SpeciesVec SourceConfig::composition() const {
  SpeciesVec y = SpeciesVec::Zero();
  const double total = inventory_kmol();
  if (total <= 0.0) return y;
  y[C2H4] = ethylene_kmol / total;
  y[O2] = oxygen_kmol / total;
  y[N2] = inert_kmol / total;
  return y;
}

double FlowsheetConfig::effective_valve_cv() const {
  if (flow_controller.valve_cv > 0.0) return flow_controller.valve_cv;
  // Sized once from the default design point so that perturbations never resize the valve.
  const FlowsheetConfig d;
  const double mw = d.source.composition().dot(molar_masses());
  const double rho = d.source.pressure_bar * 1e5 * mw / (kGasConstant * (d.source.temperature_c + kKelvin));
  const double p1 = (d.sink.pressure_bar + d.compressor.reference_flow_kg_s / d.sink.conductance_kg_s_bar) /
                    d.compressor.pressure_ratio;
  return d.flow_controller.setpoint_kg_s / (0.5 * std::sqrt(rho * (d.source.pressure_bar - p1)));
}

void FlowsheetConfig::validate() const {
  auto need = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
  };
  auto fraction = [&](double v, const char* what) { need(v >= 0.0 && v <= 1.0, what); };
  need(source.pressure_bar > 0, "source pressure must be positive");
  need(source.temperature_c > -kKelvin, "source temperature below absolute zero");
  need(source.ethylene_kmol >= 0 && source.oxygen_kmol >= 0 && source.inert_kmol >= 0,
       "source inventories must be non-negative");
  need(source.inventory_kmol() > 0, "source inventory is empty");
  need(flow_controller.setpoint_kg_s >= 0, "flow setpoint must be non-negative");
  need(flow_controller.valve_tau_s > 0 && heat_exchanger.controller.valve_tau_s > 0, "valve lags must be positive");
  if (flow_controller.manual_output) fraction(*flow_controller.manual_output, "flow valve output must lie in [0,1]");
  if (heat_exchanger.controller.manual_output)
    fraction(*heat_exchanger.controller.manual_output, "temperature valve output must lie in [0,1]");
  need(compressor.pressure_ratio >= 1.0, "compressor pressure ratio must be >= 1");
  need(compressor.efficiency > 0.0 && compressor.efficiency <= 1.0, "compressor efficiency must lie in (0,1]");
  need(compressor.reference_flow_kg_s > 0, "compressor reference flow must be positive");
  need(heat_exchanger.ua_kw_k >= 0, "heat exchanger UA must be non-negative");
  need(heat_exchanger.cw_pressure_bar > 0 && heat_exchanger.cw_return_pressure_bar > 0,
       "cooling-water pressures must be positive");
  need(heat_exchanger.cw_temperature_c > -kKelvin, "cooling-water temperature below absolute zero");
  fraction(heat_exchanger.outlet_valve, "cooling-water outlet valve must lie in [0,1]");
  need(heat_exchanger.lag_s > 0, "heat exchanger lag must be positive");
  need(reactor.volume_m3 > 0, "reactor volume must be positive");
  need(reactor.jacket_ua_kw_k >= 0, "jacket UA must be non-negative");
  need(reactor.holdup_time_s > 0, "reactor holdup time must be positive");
  need(sink.pressure_bar > 0, "sink pressure must be positive");
  need(sink.conductance_kg_s_bar > 0, "sink conductance must be positive");
  need(sink.line_ua_kw_k >= 0, "sink line UA must be non-negative");
  need(leak.before_compressor >= 0 && leak.before_compressor < 1, "leak fractions must lie in [0,1)");
  need(leak.before_reactor >= 0 && leak.before_reactor < 1, "leak fractions must lie in [0,1)");
  reactor.kinetics.validate();
  const double sum = source.composition().sum();
  need(std::abs(sum - 1.0) <= 1e-9, "feed composition does not sum to 1");
}

namespace {

struct Field {
  std::function<std::string(const FlowsheetConfig&)> get;
  std::function<void(FlowsheetConfig&, std::string_view)> set;
};

double parse_number(std::string_view key, std::string_view value) {
  config::Entry e{std::string(key), std::string(value), 0};
  return config::to_double(e);
}

template <class M>
Field number(M member) {
  return {[member](const FlowsheetConfig& c) { return config::format_double(std::invoke(member, c)); },
          [member](FlowsheetConfig& c, std::string_view v) { std::invoke(member, c) = parse_number("value", v); }};
}

Field manual(std::optional<double>& (*ref)(FlowsheetConfig&), const std::optional<double>& (*cref)(const FlowsheetConfig&)) {
  return {[cref](const FlowsheetConfig& c) {
            const auto& m = cref(c);
            return m ? config::format_double(*m) : std::string("auto");
          },
          [ref](FlowsheetConfig& c, std::string_view v) {
            if (v == "auto") ref(c).reset();
            else ref(c) = parse_number("value", v);
          }};
}

Field kinetic(ReactionVec KineticsParams::*vec, int j) {
  return {[vec, j](const FlowsheetConfig& c) { return config::format_double((c.reactor.kinetics.*vec)[j]); },
          [vec, j](FlowsheetConfig& c, std::string_view v) { (c.reactor.kinetics.*vec)[j] = parse_number("value", v); }};
}

#define FIELD(key, expr) {key, number([](auto& c) -> auto& { return c.expr; })}

const std::vector<std::pair<std::string, Field>>& registry() {
  static const std::vector<std::pair<std::string, Field>> fields = [] {
    std::vector<std::pair<std::string, Field>> f{
        FIELD("source.pressure_bar", source.pressure_bar),
        FIELD("source.temperature_c", source.temperature_c),
        FIELD("source.ethylene_kmol", source.ethylene_kmol),
        FIELD("source.oxygen_kmol", source.oxygen_kmol),
        FIELD("source.inert_kmol", source.inert_kmol),
        FIELD("flow_controller.setpoint_kg_s", flow_controller.setpoint_kg_s),
        FIELD("flow_controller.kp", flow_controller.gains.kp),
        FIELD("flow_controller.ki", flow_controller.gains.ki),
        FIELD("flow_controller.valve_cv", flow_controller.valve_cv),
        FIELD("flow_controller.valve_tau_s", flow_controller.valve_tau_s),
        {"flow_controller.manual_output",
         manual([](FlowsheetConfig& c) -> std::optional<double>& { return c.flow_controller.manual_output; },
                [](const FlowsheetConfig& c) -> const std::optional<double>& { return c.flow_controller.manual_output; })},
        FIELD("compressor.pressure_ratio", compressor.pressure_ratio),
        FIELD("compressor.efficiency", compressor.efficiency),
        FIELD("compressor.curve_slope", compressor.curve_slope),
        FIELD("compressor.reference_flow_kg_s", compressor.reference_flow_kg_s),
        FIELD("heat_exchanger.ua_kw_k", heat_exchanger.ua_kw_k),
        FIELD("heat_exchanger.cw_temperature_c", heat_exchanger.cw_temperature_c),
        FIELD("heat_exchanger.cw_pressure_bar", heat_exchanger.cw_pressure_bar),
        FIELD("heat_exchanger.cw_return_pressure_bar", heat_exchanger.cw_return_pressure_bar),
        FIELD("heat_exchanger.cw_valve_coefficient", heat_exchanger.cw_valve_coefficient),
        FIELD("heat_exchanger.outlet_valve", heat_exchanger.outlet_valve),
        FIELD("heat_exchanger.lag_s", heat_exchanger.lag_s),
        FIELD("heat_exchanger.controller.setpoint_c", heat_exchanger.controller.setpoint_c),
        FIELD("heat_exchanger.controller.kp", heat_exchanger.controller.gains.kp),
        FIELD("heat_exchanger.controller.ki", heat_exchanger.controller.gains.ki),
        FIELD("heat_exchanger.controller.valve_tau_s", heat_exchanger.controller.valve_tau_s),
        {"heat_exchanger.controller.manual_output",
         manual([](FlowsheetConfig& c) -> std::optional<double>& { return c.heat_exchanger.controller.manual_output; },
                [](const FlowsheetConfig& c) -> const std::optional<double>& {
                  return c.heat_exchanger.controller.manual_output;
                })},
        FIELD("reactor.volume_m3", reactor.volume_m3),
        FIELD("reactor.jacket_ua_kw_k", reactor.jacket_ua_kw_k),
        FIELD("reactor.jacket_temperature_c", reactor.jacket_temperature_c),
        FIELD("reactor.holdup_time_s", reactor.holdup_time_s),
        FIELD("reactor.max_temperature_c", reactor.max_temperature_c),
        FIELD("sink.pressure_bar", sink.pressure_bar),
        FIELD("sink.conductance_kg_s_bar", sink.conductance_kg_s_bar),
        FIELD("sink.line_ua_kw_k", sink.line_ua_kw_k),
        FIELD("sink.ambient_c", sink.ambient_c),
        FIELD("leak.before_compressor", leak.before_compressor),
        FIELD("leak.before_reactor", leak.before_reactor),
    };
    const std::array<const char*, kReactionCount> rx{"main", "side1", "side2"};
    for (int j = 0; j < kReactionCount; ++j) {
      f.push_back({std::string("reactor.kinetics.") + rx[j] + ".pre_exponential",
                   kinetic(&KineticsParams::pre_exponential, j)});
      f.push_back({std::string("reactor.kinetics.") + rx[j] + ".activation_energy",
                   kinetic(&KineticsParams::activation_energy, j)});
      f.push_back({std::string("reactor.kinetics.") + rx[j] + ".heat_of_reaction",
                   kinetic(&KineticsParams::heat_of_reaction, j)});
    }
    return f;
  }();
  return fields;
}

#undef FIELD

const Field* find_field(std::string_view key) {
  for (const auto& [k, f] : registry())
    if (k == key) return &f;
  return nullptr;
}

}  // namespace

std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const auto& [k, f] : registry()) out.push_back(k);
  return out;
}

void set_config_value(FlowsheetConfig& c, std::string_view key, std::string_view value) {
  const Field* f = find_field(key);
  if (!f) throw std::invalid_argument("unknown flowsheet key '" + std::string(key) + "'");
  try {
    f->set(c, value);
  } catch (const config::ConfigError&) {
    throw std::invalid_argument("'" + std::string(key) + "': expected a number, got '" + std::string(value) + "'");
  }
}

FlowsheetConfig parse_flowsheet(std::string_view text) {
  FlowsheetConfig c;
  for (const auto& e : config::parse_key_values(text)) {
    try {
      set_config_value(c, e.key, e.value);
    } catch (const std::invalid_argument& err) {
      throw config::ConfigError(err.what(), e.line);
    }
  }
  try {
    c.validate();
  } catch (const std::invalid_argument& err) {
    throw config::ConfigError(err.what());
  }
  return c;
}

std::string print_flowsheet(const FlowsheetConfig& c) {
  std::string out;
  for (const auto& [k, f] : registry()) out += k + " = " + f.get(c) + "\n";
  return out;
}

}  // namespace eoilp::sim
