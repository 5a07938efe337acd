#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "eoilp/kinetics.hpp"

namespace eoilp::sim {

struct PiGains {
  double kp = 0.0;
  double ki = 0.0;
};

struct SourceConfig {
  double pressure_bar = 2.0;
  double temperature_c = 40.0;
  // Reservoir inventory of ethylene, oxygen and inert nitrogen. The feed composition follows from it.
  double ethylene_kmol = 4464.0;
  double oxygen_kmol = 4464.0;
  double inert_kmol = 102672.0;

  SpeciesVec composition() const;
  double inventory_kmol() const { return ethylene_kmol + oxygen_kmol + inert_kmol; }
};

struct FlowControllerConfig {
  double setpoint_kg_s = 1.0;
  PiGains gains{0.2, 0.1};
  double valve_cv = 0.0;       // kg/s per sqrt(kg/m3 * bar); 0 selects the nominal sizing
  double valve_tau_s = 1.0;
  std::optional<double> manual_output;
};

struct CompressorConfig {
  double pressure_ratio = 4.0;    // at the reference flow
  double efficiency = 0.75;       // isentropic
  double curve_slope = 0.3;       // relative ratio gain per relative flow deficit
  double reference_flow_kg_s = 1.0;
};

struct TemperatureControllerConfig {
  double setpoint_c = 150.0;
  PiGains gains{0.01, 0.002};
  double valve_tau_s = 1.0;
  std::optional<double> manual_output;
};

struct HeatExchangerConfig {
  double ua_kw_k = 1.0;
  double cw_temperature_c = 30.0;
  double cw_pressure_bar = 2.0;
  double cw_return_pressure_bar = 1.0;
  double cw_valve_coefficient = 1.25;  // kg/s per bar at both valves open
  double outlet_valve = 1.0;           // cooling-water outlet valve position
  double lag_s = 5.0;
  TemperatureControllerConfig controller;
};

struct ReactorConfig {
  double volume_m3 = 1.85;
  double jacket_ua_kw_k = 15.0;
  double jacket_temperature_c = 205.0;
  double holdup_time_s = 0.5;
  double max_temperature_c = 600.0;
  KineticsParams kinetics = KineticsParams::calibrated();
};

struct SinkConfig {
  double pressure_bar = 3.0;
  double conductance_kg_s_bar = 1.0;
  double line_ua_kw_k = 0.05;
  double ambient_c = 25.0;
};

struct LeakConfig {
  double before_compressor = 0.0;  // fraction of the flow lost
  double before_reactor = 0.0;
};

struct FlowsheetConfig {
  SourceConfig source;
  FlowControllerConfig flow_controller;
  CompressorConfig compressor;
  HeatExchangerConfig heat_exchanger;
  ReactorConfig reactor;
  SinkConfig sink;
  LeakConfig leak;

  /// Throws std::invalid_argument when an invariant is broken.
  void validate() const;

  /// Flow valve coefficient in effect (explicit, or sized for half-open at nominal conditions).
  double effective_valve_cv() const;
};

/// Text form: `key = value` lines, see config_keys() for the recognised keys.
FlowsheetConfig parse_flowsheet(std::string_view text);
std::string print_flowsheet(const FlowsheetConfig& c);

/// Sets one numeric field by key. Controller manual outputs accept "auto".
void set_config_value(FlowsheetConfig& c, std::string_view key, std::string_view value);
std::vector<std::string> config_keys();

}  // namespace eoilp::sim
