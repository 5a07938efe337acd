// Random process configurations and small dataset builders shared by tests and the acceptance runner.
#pragma once

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "eoilp/campaign.hpp"
#include "eoilp/flowsheet.hpp"
#include "eoilp/simulator.hpp"

namespace fixture {

/// A configuration drawn across the operating envelope the fault catalog spans.
inline eoilp::sim::FlowsheetConfig random_flowsheet(std::mt19937_64& rng) {
  auto u = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  eoilp::sim::FlowsheetConfig c;
  c.source.pressure_bar = u(1.6, 2.05);
  c.source.temperature_c = u(20.0, 45.0);
  c.source.ethylene_kmol = u(1500.0, 4500.0);
  c.flow_controller.setpoint_kg_s = u(0.6, 1.1);
  c.compressor.efficiency = u(0.5, 0.8);
  c.heat_exchanger.ua_kw_k = u(0.2, 1.2);
  c.heat_exchanger.cw_pressure_bar = u(1.2, 2.0);
  c.heat_exchanger.controller.setpoint_c = u(120.0, 170.0);
  c.sink.pressure_bar = u(2.8, 3.5);
  c.leak.before_compressor = u(0.0, 0.4);
  c.leak.before_reactor = u(0.0, 0.4);
  return c;
}

/// True when every monitored variable of `a` is within `rel` of `b`.
inline bool close_all(const eoilp::sim::ProcessState& a, const eoilp::sim::ProcessState& b, double rel,
                      std::string* worst = nullptr) {
  bool ok = true;
  double worst_err = -1;
  for (std::size_t i = 0; i < eoilp::sim::kVarCount; ++i) {
    const double err = std::abs(a.values[i] - b.values[i]);
    // Absolute floor for quantities that are zero up to solver residuals.
    const double tol = rel * std::abs(b.values[i]) + 1e-6;
    const double ratio = err / tol;
    if (err > tol) ok = false;
    if (worst && ratio > worst_err) {
      worst_err = ratio;
      *worst = std::string(eoilp::sim::variables()[i].name) + " " + std::to_string(a.values[i]) + " vs " +
               std::to_string(b.values[i]);
    }
  }
  return ok;
}

}  // namespace fixture
