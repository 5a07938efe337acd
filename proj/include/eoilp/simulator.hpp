#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "eoilp/flowsheet.hpp"

namespace eoilp::sim {

/// The monitored process variables, in dataset column order.
enum class Var : int {
  srcr1_p, srcr1_t, m2_pv, k1_p1, k1_p2, e2_tti, e2_tsi, m1_pv, r1_t2, snk1_p, snk1_t,
  r1_tau, r1_xmax, snk1_z_c2h4o, fc_op, fc_sp, xc1_op, xc1_sp, cw_out_op, k1_power, e2_duty, e2_tso,
  r1_z_c2h4_in, snk1_z_c2h4, srcr1_inv,
};
inline constexpr std::size_t kVarCount = 25;

enum class VarType { Pressure, Temperature, Flow, Fraction, Time };

struct VarInfo {
  std::string_view name;
  std::string_view unit;
  VarType type;
  bool real_world;  // one of the sensor readings an operator has on a real plant
};

const std::array<VarInfo, kVarCount>& variables();
std::optional<Var> find_var(std::string_view name);
inline std::string_view name_of(Var v) { return variables()[static_cast<std::size_t>(v)].name; }

struct ProcessState {
  std::array<double, kVarCount> values{};

  double& operator[](Var v) { return values[static_cast<std::size_t>(v)]; }
  double operator[](Var v) const { return values[static_cast<std::size_t>(v)]; }
};

/// Stream table and balance terms behind one state, for conservation checks.
struct Balances {
  double source_mol_s = 0, leak1_mol_s = 0, leak2_mol_s = 0, outlet_mol_s = 0, reaction_mol_s = 0;
  double source_kg_s = 0, leak1_kg_s = 0, leak2_kg_s = 0, outlet_kg_s = 0;
  // Sensible enthalpy flows relative to 298.15 K and heat terms, W.
  double h_source = 0, h_leak1 = 0, h_leak2 = 0, h_outlet = 0;
  double compressor_work = 0, hx_duty = 0, jacket_duty = 0, line_loss = 0, reaction_heat = 0;

  double molar_closure() const;   // relative
  double mass_closure() const;    // relative
  double energy_closure() const;  // relative
};

struct TrajectoryPoint {
  double time = 0.0;
  ProcessState state;
};

struct SimulationOutcome {
  enum class Kind { SteadyState, Trajectory, Unsolved };
  Kind kind = Kind::Unsolved;
  ProcessState state;  // steady state, final trajectory point, or last state before failure
  std::vector<TrajectoryPoint> trajectory;
  std::string reason;  // for Unsolved
  Balances balances;   // for SteadyState

  bool solved() const { return kind != Kind::Unsolved; }
};

/// Dynamic state vector: species holdups (mol), reactor temperature (K), HX outlet
/// temperature (K), flow valve position, flow integral, cooling valve position, cooling integral.
inline constexpr int kStateSize = kSpeciesCount + 6;
using StateVec = Eigen::Matrix<double, kStateSize, 1>;

struct StaticOptions {
  std::optional<StateVec> warm_start;
  int max_iterations = 400;
  double tolerance = 1e-10;  // max scaled time derivative
};

/// Steady state of the dynamic model, or Unsolved.
SimulationOutcome solve_static(const FlowsheetConfig& config, const StaticOptions& opts = {});

/// Internal state of a steady state, for warm starts and dynamic initial conditions.
std::optional<StateVec> steady_state_vector(const FlowsheetConfig& config, const StaticOptions& opts = {});

struct DynamicOptions {
  double dt = 0.05;
  double error_tolerance = 1e-6;  // scaled step-halving discrepancy that triggers substeps
  std::optional<std::uint64_t> noise_seed;  // no measurement noise when absent
  double noise_fraction = 0.005;
  std::vector<Var> noise_free;  // directly perturbed variables
};

/// Starts at the steady state of `initial`, switches to `perturbed` at t = 0+, and
/// records the t = 0 state plus one state per timepoint.
SimulationOutcome simulate_dynamic(const FlowsheetConfig& initial, const FlowsheetConfig& perturbed,
                                   const std::vector<double>& timepoints, const DynamicOptions& opts = {});

/// Lower-level form starting from an explicit state vector.
SimulationOutcome simulate_from(const StateVec& x0, const FlowsheetConfig& initial, const FlowsheetConfig& perturbed,
                                const std::vector<double>& timepoints, const DynamicOptions& opts = {});

/// Gaussian noise with sigma = fraction * |nominal| on every variable not listed as noise free.
void apply_noise(ProcessState& s, const ProcessState& nominal, double fraction, const std::vector<Var>& noise_free,
                 std::uint64_t seed);

struct ControllerState {
  double integral = 0.0;  // also holds the output bias
  double output = 0.0;
};

/// One explicit PI step with conditional-integration anti-windup. `error` is
/// signed so that a positive error asks for a larger output.
ControllerState controller_step(const ControllerState& s, const PiGains& g, double error, double dt);

/// Time derivative of the state vector (exposed for tests).
StateVec derivative(const FlowsheetConfig& config, const StateVec& x);
/// Monitored variables and balance terms at a state.
ProcessState observe(const FlowsheetConfig& config, const StateVec& x, Balances* balances = nullptr);

}  // namespace eoilp::sim
