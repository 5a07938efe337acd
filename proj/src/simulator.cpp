#include "eoilp/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include <Eigen/LU>
#include <boost/math/tools/roots.hpp>

namespace eoilp::sim {

const std::array<VarInfo, kVarCount>& variables() {
  using T = VarType;
  static const std::array<VarInfo, kVarCount> v{{
      {"srcr1_p", "bar", T::Pressure, true},
      {"srcr1_t", "degC", T::Temperature, true},
      {"m2_pv", "kg/s", T::Flow, true},
      {"k1_p1", "bar", T::Pressure, true},
      {"k1_p2", "bar", T::Pressure, true},
      {"e2_tti", "degC", T::Temperature, true},
      {"e2_tsi", "degC", T::Temperature, true},
      {"m1_pv", "degC", T::Temperature, true},
      {"r1_t2", "degC", T::Temperature, true},
      {"snk1_p", "bar", T::Pressure, true},
      {"snk1_t", "degC", T::Temperature, true},
      {"r1_tau", "s", T::Time, false},
      {"r1_xmax", "fraction", T::Fraction, false},
      {"snk1_z_c2h4o", "fraction", T::Fraction, false},
      {"fc_op", "fraction", T::Fraction, false},
      {"fc_sp", "kg/s", T::Flow, false},
      {"xc1_op", "fraction", T::Fraction, false},
      {"xc1_sp", "degC", T::Temperature, false},
      {"cw_out_op", "fraction", T::Fraction, false},
      {"k1_power", "kW", T::Flow, false},
      {"e2_duty", "kW", T::Flow, false},
      {"e2_tso", "degC", T::Temperature, false},
      {"r1_z_c2h4_in", "fraction", T::Fraction, false},
      {"snk1_z_c2h4", "fraction", T::Fraction, false},
      {"srcr1_inv", "kmol", T::Flow, false},
  }};
  return v;
}

std::optional<Var> find_var(std::string_view name) {
  const auto& v = variables();
  for (std::size_t i = 0; i < v.size(); ++i)
    if (v[i].name == name) return static_cast<Var>(i);
  return std::nullopt;
}

double Balances::molar_closure() const {
  const double s = std::max({std::abs(source_mol_s), std::abs(outlet_mol_s), 1e-12});
  return std::abs(source_mol_s - leak1_mol_s - leak2_mol_s - outlet_mol_s + reaction_mol_s) / s;
}

double Balances::mass_closure() const {
  const double s = std::max({std::abs(source_kg_s), std::abs(outlet_kg_s), 1e-12});
  return std::abs(source_kg_s - leak1_kg_s - leak2_kg_s - outlet_kg_s) / s;
}

double Balances::energy_closure() const {
  const double r = h_source + compressor_work + reaction_heat - hx_duty - jacket_duty - line_loss - h_leak1 -
                   h_leak2 - h_outlet;
  const double s = std::abs(h_source) + std::abs(compressor_work) + std::abs(reaction_heat) + std::abs(hx_duty) +
                   std::abs(jacket_duty) + std::abs(line_loss) + std::abs(h_leak1) + std::abs(h_leak2) +
                   std::abs(h_outlet);
  return std::abs(r) / std::max(s, 1e-12);
}

ControllerState controller_step(const ControllerState& s, const PiGains& g, double error, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("controller_step: dt must be positive");
  ControllerState n = s;
  const double raw = g.kp * error + s.integral;
  const bool wound = (raw >= 1.0 && error > 0.0) || (raw <= 0.0 && error < 0.0);
  if (!wound) n.integral += g.ki * error * dt;
  n.output = std::clamp(g.kp * error + n.integral, 0.0, 1.0);
  return n;
}

namespace {

constexpr double kWaterCp = 4180.0;  // J/(kg K)

class SimError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum Idx : int { kTr = kSpeciesCount, kThx, kUfc, kIfc, kUxc, kIxc };

double to_k(double c) { return c + kKelvin; }
double to_c(double k) { return k - kKelvin; }

double reference_density() {
  const FlowsheetConfig d;
  const double mw = d.source.composition().dot(molar_masses());
  return d.source.pressure_bar * 1e5 * mw / (kGasConstant * to_k(d.source.temperature_c));
}

struct Network {
  double rho = 0, p1 = 0, p2 = 0, ratio = 1;
  double m_valve = 0, m_comp = 0, m_reactor = 0;
  double t1 = 0, t2 = 0;
};

Network solve_network(const FlowsheetConfig& c, double valve) {
  Network n;
  const SpeciesVec y = c.source.composition();
  const double mw = y.dot(molar_masses());
  const double cp = y.dot(heat_capacities());
  const double ps = c.source.pressure_bar;
  n.rho = ps * 1e5 * mw / (kGasConstant * to_k(c.source.temperature_c));
  const double cv = c.effective_valve_cv();
  const double u = std::clamp(valve, 0.0, 1.0);
  const double f1 = 1.0 - c.leak.before_compressor, f2 = 1.0 - c.leak.before_reactor;
  const auto& k = c.compressor;
  auto valve_flow = [&](double p1) { return cv * u * std::sqrt(n.rho * std::max(0.0, ps - p1)); };
  auto ratio = [&](double mc) { return std::max(1.0, k.pressure_ratio * (1.0 + k.curve_slope * (1.0 - mc / k.reference_flow_kg_s))); };
  auto g = [&](double p1) {
    const double mv = valve_flow(p1);
    return f2 * f1 * mv - c.sink.conductance_kg_s_bar * (ratio(f1 * mv) * p1 - c.sink.pressure_bar);
  };
  const double g_hi = g(ps);
  if (g_hi >= 0.0) throw SimError("no forward flow: sink pressure exceeds compressor discharge");
  double p1 = 0.0;
  if (g_hi < 0.0) {
    boost::uintmax_t iters = 200;
    auto [lo, hi] = boost::math::tools::toms748_solve(g, 0.0, ps, g(0.0), g_hi,
                                                        boost::math::tools::eps_tolerance<double>(52), iters);
    p1 = 0.5 * (lo + hi);
  }
  n.p1 = p1;
  n.m_valve = valve_flow(p1);
  n.m_comp = f1 * n.m_valve;
  n.m_reactor = f2 * n.m_comp;
  n.ratio = ratio(n.m_comp);
  n.p2 = n.ratio * p1;
  const double gamma = cp / (cp - kGasConstant);
  n.t1 = to_k(c.source.temperature_c);
  n.t2 = n.t1 * (1.0 + (std::pow(n.ratio, (gamma - 1.0) / gamma) - 1.0) / k.efficiency);
  return n;
}

double counterflow_effectiveness(double ntu, double cr) {
  if (ntu <= 0.0) return 0.0;
  if (std::abs(1.0 - cr) < 1e-9) return ntu / (1.0 + ntu);
  const double e = std::exp(-ntu * (1.0 - cr));
  return (1.0 - e) / (1.0 - cr * e);
}

// Everything derived from a state: derivatives, outputs and balance terms.
struct Eval {
  StateVec dx;
  ProcessState out;
  Balances bal;
};

struct Pi {
  double output, dintegral;
};

Pi pi_law(const std::optional<double>& manual, const PiGains& g, double integral, double error) {
  if (manual) return {*manual, 0.0};
  const double raw = g.kp * error + integral;
  const bool wound = (raw >= 1.0 && error > 0.0) || (raw <= 0.0 && error < 0.0);
  return {std::clamp(raw, 0.0, 1.0), wound ? 0.0 : g.ki * error};
}

Eval evaluate_model(const FlowsheetConfig& c, const StateVec& x) {
  for (int i = 0; i < kStateSize; ++i)
    if (!std::isfinite(x[i])) throw SimError("non-finite state");
  const SpeciesVec cp = heat_capacities();
  const SpeciesVec mwv = molar_masses();
  const SpeciesVec y = c.source.composition();
  const double mw = y.dot(mwv);
  const double cp_feed = y.dot(cp);

  const SpeciesVec n = x.head<kSpeciesCount>();
  const double tr = x[kTr], thx = x[kThx];
  if (!(tr > 0.0) || !(thx > 0.0)) throw SimError("non-physical temperature");
  if (to_c(tr) > c.reactor.max_temperature_c) throw SimError("thermal runaway: reactor above temperature cap");
  const double ntot = n.sum();
  if (!(ntot > 0.0)) throw SimError("empty reactor");
  if (n.minCoeff() < -1e-6 * ntot) throw SimError("negative holdup");

  const Network net = solve_network(c, x[kUfc]);
  const double f_valve = net.m_valve / mw, f_comp = net.m_comp / mw, f_react = net.m_reactor / mw;

  // Heat exchanger, process stream on the hot side.
  const auto& hx = c.heat_exchanger;
  const double ch = f_comp * cp_feed;
  const double mcw = hx.cw_valve_coefficient * std::clamp(x[kUxc], 0.0, 1.0) * hx.outlet_valve *
                     std::max(0.0, hx.cw_pressure_bar - hx.cw_return_pressure_bar);
  const double cc = mcw * kWaterCp;
  const double tci = to_k(hx.cw_temperature_c);
  double target = net.t2;
  const double cmin = std::min(ch, cc), cmax = std::max(ch, cc);
  if (cmin > 0.0 && ch > 0.0) {
    const double eff = counterflow_effectiveness(hx.ua_kw_k * 1e3 / cmin, cmin / cmax);
    target = net.t2 - eff * cmin / ch * (net.t2 - tci);
  }
  const double duty = ch * (net.t2 - thx);

  // Controllers.
  const double m2_pv = net.m_valve * std::sqrt(reference_density() / net.rho);
  const auto& fc = c.flow_controller;
  const Pi fpi = pi_law(fc.manual_output, fc.gains, x[kIfc], fc.setpoint_kg_s - m2_pv);
  const auto& xc = hx.controller;
  const Pi xpi = pi_law(xc.manual_output, xc.gains, x[kIxc], to_c(thx) - xc.setpoint_c);

  // Reactor.
  const auto& rc = c.reactor;
  const double v = rc.volume_m3;
  const SpeciesVec conc = n.cwiseMax(0.0) / v;
  const ReactionVec r = reaction_rates(rc.kinetics, tr, conc);
  const SpeciesVec gen = v * (rc.kinetics.stoichiometry.transpose() * r);
  const double n_target = net.p2 * 1e5 * v / (kGasConstant * tr);
  const double f_out = std::max(0.0, f_react + gen.sum() + (ntot - n_target) / rc.holdup_time_s);
  const SpeciesVec z = n / ntot;
  const SpeciesVec fin = f_react * y;
  const double jacket = rc.jacket_ua_kw_k * 1e3 * (tr - to_k(rc.jacket_temperature_c));
  const ReactionVec dh = heats_at(rc.kinetics, tr);
  const double heat_cap = n.cwiseMax(0.0).dot(cp);

  Eval e;
  e.dx.head<kSpeciesCount>() = fin - f_out * z + gen;
  e.dx[kTr] = (fin.dot(cp) * (thx - tr) - v * r.dot(dh) - jacket) / heat_cap;
  e.dx[kThx] = (target - thx) / hx.lag_s;
  e.dx[kUfc] = (fpi.output - x[kUfc]) / fc.valve_tau_s;
  e.dx[kIfc] = fpi.dintegral;
  e.dx[kUxc] = (xpi.output - x[kUxc]) / xc.valve_tau_s;
  e.dx[kIxc] = xpi.dintegral;

  // Outlet line to the sink loses heat to ambient.
  const double cp_out = z.dot(cp);
  const double tamb = to_k(c.sink.ambient_c);
  const double t_line = f_out > 0.0 ? tamb + (tr - tamb) * std::exp(-c.sink.line_ua_kw_k * 1e3 / (f_out * cp_out)) : tamb;

  auto& o = e.out;
  o[Var::srcr1_p] = c.source.pressure_bar;
  o[Var::srcr1_t] = c.source.temperature_c;
  o[Var::m2_pv] = m2_pv;
  o[Var::k1_p1] = net.p1;
  o[Var::k1_p2] = net.p2;
  o[Var::e2_tti] = to_c(net.t2);
  o[Var::e2_tsi] = hx.cw_temperature_c;
  o[Var::m1_pv] = to_c(thx);
  o[Var::r1_t2] = to_c(tr);
  o[Var::snk1_p] = c.sink.pressure_bar;
  o[Var::snk1_t] = to_c(t_line);
  o[Var::r1_tau] = v * net.p2 * 1e5 / (std::max(f_out, 1e-9) * kGasConstant * tr);
  o[Var::r1_xmax] = fin[C2H4] > 0.0 ? std::clamp(1.0 - f_out * z[C2H4] / fin[C2H4], 0.0, 1.0) : 0.0;
  o[Var::snk1_z_c2h4o] = std::clamp(z[EO], 0.0, 1.0);
  o[Var::fc_op] = std::clamp(x[kUfc], 0.0, 1.0);
  o[Var::fc_sp] = fc.setpoint_kg_s;
  o[Var::xc1_op] = std::clamp(x[kUxc], 0.0, 1.0);
  o[Var::xc1_sp] = xc.setpoint_c;
  o[Var::cw_out_op] = hx.outlet_valve;
  o[Var::k1_power] = f_comp * cp_feed * (net.t2 - net.t1) / 1e3;
  o[Var::e2_duty] = duty / 1e3;
  o[Var::e2_tso] = to_c(cc > 0.0 ? tci + duty / cc : tci);
  o[Var::r1_z_c2h4_in] = y[C2H4];
  o[Var::snk1_z_c2h4] = std::clamp(z[C2H4], 0.0, 1.0);
  o[Var::srcr1_inv] = c.source.inventory_kmol();

  auto& b = e.bal;
  b.source_mol_s = f_valve;
  b.leak1_mol_s = f_valve - f_comp;
  b.leak2_mol_s = f_comp - f_react;
  b.outlet_mol_s = f_out;
  b.reaction_mol_s = gen.sum();
  b.source_kg_s = net.m_valve;
  b.leak1_kg_s = net.m_valve - net.m_comp;
  b.leak2_kg_s = net.m_comp - net.m_reactor;
  b.outlet_kg_s = f_out * z.dot(mwv);
  b.h_source = f_valve * cp_feed * (net.t1 - kTref);
  b.h_leak1 = (f_valve - f_comp) * cp_feed * (net.t1 - kTref);
  b.compressor_work = f_comp * cp_feed * (net.t2 - net.t1);
  b.hx_duty = duty;
  b.h_leak2 = (f_comp - f_react) * cp_feed * (thx - kTref);
  b.jacket_duty = jacket;
  b.reaction_heat = -v * r.dot(rc.kinetics.heat_of_reaction);
  b.line_loss = f_out * cp_out * (tr - t_line);
  b.h_outlet = f_out * cp_out * (t_line - kTref);
  return e;
}

StateVec scales(const StateVec& x) {
  StateVec s;
  const double ntot = std::max(1.0, x.head<kSpeciesCount>().sum());
  for (int i = 0; i < kSpeciesCount; ++i) s[i] = ntot;
  s[kTr] = s[kThx] = 100.0;
  s[kUfc] = s[kIfc] = s[kUxc] = s[kIxc] = 1.0;
  return s;
}

StateVec initial_guess(const FlowsheetConfig& c) {
  StateVec x;
  const double u_fc = c.flow_controller.manual_output.value_or(0.5);
  const double u_xc = c.heat_exchanger.controller.manual_output.value_or(0.4);
  const Network net = solve_network(c, u_fc);
  const double tr = to_k(c.reactor.jacket_temperature_c + 5.0);
  const double ntot = net.p2 * 1e5 * c.reactor.volume_m3 / (kGasConstant * tr);
  x.head<kSpeciesCount>() = ntot * c.source.composition();
  x[kTr] = tr;
  x[kThx] = to_k(c.heat_exchanger.controller.setpoint_c);
  x[kUfc] = u_fc;
  x[kIfc] = u_fc;
  x[kUxc] = u_xc;
  x[kIxc] = u_xc;
  return x;
}

double scaled_norm(const StateVec& dx, const StateVec& s) { return (dx.cwiseQuotient(s)).cwiseAbs().maxCoeff(); }

}  // namespace

StateVec derivative(const FlowsheetConfig& config, const StateVec& x) {
  try {
    return evaluate_model(config, x).dx;
  } catch (const SimError& e) {
    throw std::runtime_error(e.what());
  }
}

ProcessState observe(const FlowsheetConfig& config, const StateVec& x, Balances* balances) {
  try {
    Eval e = evaluate_model(config, x);
    if (balances) *balances = e.bal;
    return e.out;
  } catch (const SimError& e) {
    throw std::runtime_error(e.what());
  }
}

namespace {

struct StaticResult {
  std::optional<StateVec> x;
  std::string reason;
  StateVec last = StateVec::Zero();
};

// Pseudo-transient continuation: implicit Euler steps in physical time with a
// step that grows as the residual falls, ending in plain Newton steps.
StaticResult static_solve(const FlowsheetConfig& c, const StaticOptions& opts) {
  StaticResult res;
  StateVec x;
  try {
    c.validate();
    x = opts.warm_start ? *opts.warm_start : initial_guess(c);
  } catch (const std::exception& e) {
    res.reason = e.what();
    return res;
  }
  res.last = x;
  double dtau = 0.5;
  StateVec f;
  double norm = 0;
  try {
    f = evaluate_model(c, x).dx;
    norm = scaled_norm(f, scales(x));
  } catch (const SimError& e) {
    res.reason = e.what();
    return res;
  }
  for (int it = 0; it < opts.max_iterations; ++it) {
    if (norm < opts.tolerance) {
      res.x = x;
      return res;
    }
    Eigen::Matrix<double, kStateSize, kStateSize> jac;
    const StateVec s = scales(x);
    try {
      for (int j = 0; j < kStateSize; ++j) {
        StateVec xp = x;
        const double h = 1e-7 * std::max(std::abs(x[j]), j < kSpeciesCount ? 1e-3 * s[j] : 1e-3 * s[j]);
        xp[j] += h;
        jac.col(j) = (evaluate_model(c, xp).dx - f) / h;
      }
    } catch (const SimError& e) {
      res.reason = e.what();
      return res;
    }
    bool accepted = false;
    for (int tries = 0; tries < 30 && !accepted; ++tries) {
      Eigen::Matrix<double, kStateSize, kStateSize> a = -jac;
      a.diagonal().array() += 1.0 / dtau;
      const StateVec step = a.partialPivLu().solve(f);
      StateVec xn = x + step;
      try {
        if (!step.allFinite()) throw SimError("non-finite step");
        const StateVec fn = evaluate_model(c, xn).dx;
        const double nn = scaled_norm(fn, scales(xn));
        const double growth = std::clamp(norm / std::max(nn, 1e-300), 0.25, 10.0);
        x = xn;
        f = fn;
        norm = nn;
        dtau = std::min(dtau * growth, 1e12);
        accepted = true;
        res.last = x;
      } catch (const SimError& e) {
        if (std::string_view(e.what()).starts_with("thermal runaway") && dtau <= 0.5) {
          res.reason = e.what();
          return res;
        }
        dtau *= 0.25;
        if (dtau < 1e-8) {
          res.reason = e.what();
          return res;
        }
      }
    }
    if (!accepted) {
      res.reason = "pseudo-transient step rejected repeatedly";
      return res;
    }
  }
  res.reason = "steady-state iteration cap reached";
  return res;
}

bool physical(const ProcessState& s, std::string& why) {
  for (Var v : {Var::srcr1_p, Var::k1_p1, Var::k1_p2, Var::snk1_p})
    if (!(s[v] > 0.0)) {
      why = "non-physical pressure in " + std::string(name_of(v));
      return false;
    }
  for (std::size_t i = 0; i < kVarCount; ++i)
    if (!std::isfinite(s.values[i])) {
      why = "non-finite " + std::string(variables()[i].name);
      return false;
    }
  return true;
}

}  // namespace

std::optional<StateVec> steady_state_vector(const FlowsheetConfig& config, const StaticOptions& opts) {
  return static_solve(config, opts).x;
}

SimulationOutcome solve_static(const FlowsheetConfig& config, const StaticOptions& opts) {
  SimulationOutcome out;
  const StaticResult r = static_solve(config, opts);
  if (!r.x) {
    out.kind = SimulationOutcome::Kind::Unsolved;
    out.reason = r.reason;
    try {
      out.state = evaluate_model(config, r.last).out;
    } catch (const std::exception&) {
    }
    return out;
  }
  const Eval e = evaluate_model(config, *r.x);
  out.state = e.out;
  out.balances = e.bal;
  std::string why;
  if (!physical(out.state, why)) {
    out.kind = SimulationOutcome::Kind::Unsolved;
    out.reason = why;
    return out;
  }
  out.kind = SimulationOutcome::Kind::SteadyState;
  return out;
}

namespace {

void add_noise(ProcessState& s, const ProcessState& nominal, double fraction, const std::vector<Var>& noise_free,
               std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (std::size_t i = 0; i < kVarCount; ++i) {
    const double z = gauss(rng);  // drawn for every variable so streams stay aligned
    if (std::find(noise_free.begin(), noise_free.end(), static_cast<Var>(i)) != noise_free.end()) continue;
    s.values[i] += z * fraction * std::abs(nominal.values[i]);
  }
}

StateVec rk4(const FlowsheetConfig& c, const StateVec& x, double h) {
  const StateVec k1 = evaluate_model(c, x).dx;
  const StateVec k2 = evaluate_model(c, x + 0.5 * h * k1).dx;
  const StateVec k3 = evaluate_model(c, x + 0.5 * h * k2).dx;
  const StateVec k4 = evaluate_model(c, x + h * k3).dx;
  return x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// One step of size h, checked against two half steps and subdivided while they disagree.
StateVec checked_step(const FlowsheetConfig& c, const StateVec& x, double h, double tol, int depth) {
  const StateVec full = rk4(c, x, h);
  const StateVec mid = rk4(c, x, 0.5 * h);
  const StateVec half = rk4(c, mid, 0.5 * h);
  StateVec s = scales(x).cwiseMax(half.cwiseAbs());
  const double err = scaled_norm(full - half, s);
  if (err <= tol || depth >= 8) return half;
  return checked_step(c, checked_step(c, x, 0.5 * h, tol, depth + 1), 0.5 * h, tol, depth + 1);
}

}  // namespace

void apply_noise(ProcessState& s, const ProcessState& nominal, double fraction, const std::vector<Var>& noise_free,
                 std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  add_noise(s, nominal, fraction, noise_free, rng);
}

SimulationOutcome simulate_from(const StateVec& x0, const FlowsheetConfig& initial, const FlowsheetConfig& perturbed,
                                const std::vector<double>& timepoints, const DynamicOptions& opts) {
  SimulationOutcome out;
  out.kind = SimulationOutcome::Kind::Unsolved;
  for (std::size_t i = 0; i < timepoints.size(); ++i) {
    if (!(timepoints[i] > 0.0) || (i > 0 && !(timepoints[i] > timepoints[i - 1])))
      throw std::invalid_argument("timepoints must be positive and strictly increasing");
  }
  if (!(opts.dt > 0.0)) throw std::invalid_argument("dt must be positive");
  std::optional<std::mt19937_64> rng;
  if (opts.noise_seed) rng.emplace(*opts.noise_seed);

  StateVec x = x0;
  ProcessState nominal;
  try {
    perturbed.validate();
    nominal = evaluate_model(initial, x0).out;
  } catch (const std::exception& e) {
    out.reason = e.what();
    return out;
  }
  auto record = [&](double t, ProcessState s) {
    if (rng) add_noise(s, nominal, opts.noise_fraction, opts.noise_free, *rng);
    out.trajectory.push_back({t, s});
  };
  record(0.0, nominal);
  out.state = nominal;

  double t = 0.0;
  try {
    for (double target : timepoints) {
      while (t < target - 1e-9) {
        const double h = std::min(opts.dt, target - t);
        x = checked_step(perturbed, x, h, opts.error_tolerance, 0);
        // Recompute t from the step count to avoid drift.
        t = (target - t <= opts.dt + 1e-12) ? target : t + h;
      }
      const Eval e = evaluate_model(perturbed, x);
      std::string why;
      if (!physical(e.out, why)) throw SimError(why);
      out.state = e.out;
      record(target, e.out);
    }
  } catch (const SimError& e) {
    out.reason = e.what();
    try {
      out.state = evaluate_model(perturbed, x).out;
    } catch (const std::exception&) {
    }
    return out;
  }
  out.kind = SimulationOutcome::Kind::Trajectory;
  return out;
}

SimulationOutcome simulate_dynamic(const FlowsheetConfig& initial, const FlowsheetConfig& perturbed,
                                   const std::vector<double>& timepoints, const DynamicOptions& opts) {
  const auto x0 = steady_state_vector(initial);
  if (!x0) {
    SimulationOutcome out;
    out.reason = "initial configuration has no steady state";
    return out;
  }
  return simulate_from(*x0, initial, perturbed, timepoints, opts);
}

}  // namespace eoilp::sim
