#include "eoilp/kinetics.hpp"

#include <cmath>
#include <stdexcept>

namespace eoilp::sim {

SpeciesVec heat_capacities() {
  SpeciesVec cp;
  cp << 43.6, 29.4, 48.2, 37.1, 33.6, 29.1;
  return cp;
}

SpeciesVec molar_masses() {
  // From atomic masses so that every reaction conserves mass exactly.
  constexpr double c = 12.011e-3, h = 1.008e-3, o = 15.999e-3, n = 14.007e-3;
  SpeciesVec m;
  m << 2 * c + 4 * h, 2 * o, 2 * c + 4 * h + o, c + 2 * o, 2 * h + o, 2 * n;
  return m;
}

KineticsParams KineticsParams::calibrated() {
  KineticsParams k;
  k.pre_exponential << 5955.85, 2.43506e6, 2049.41;
  k.activation_energy << 50e3, 85e3, 60e3;
  k.heat_of_reaction << -210e3, -1323e3, -1218e3;
  // 2 C2H4 + O2 -> 2 C2H4O ; C2H4 + 3 O2 -> 2 CO2 + 2 H2O ; C2H4O + 2.5 O2 -> 2 CO2 + 2 H2O
  k.stoichiometry << -2, -1, 2, 0, 0, 0,
                     -1, -3, 0, 2, 2, 0,
                      0, -2.5, -1, 2, 2, 0;
  return k;
}

void KineticsParams::validate() const {
  for (int j = 0; j < kReactionCount; ++j) {
    if (!(pre_exponential[j] > 0.0)) throw std::invalid_argument("pre-exponential factors must be positive");
    if (!(activation_energy[j] >= 0.0)) throw std::invalid_argument("activation energies must be non-negative");
    if (!(heat_of_reaction[j] < 0.0)) throw std::invalid_argument("heats of reaction must be negative");
  }
  const auto m = molar_masses();
  for (int j = 0; j < kReactionCount; ++j)
    if (std::abs(stoichiometry.row(j).dot(m)) > 1e-9)
      throw std::invalid_argument("reaction " + std::to_string(j) + " does not conserve mass");
  if (stoichiometry(Main, C2H4) != -2 || stoichiometry(Main, O2) != -1 || stoichiometry(Main, EO) != 2)
    throw std::invalid_argument("main reaction must be 2 C2H4 + O2 -> 2 C2H4O");
}

ReactionVec reaction_rates(const KineticsParams& k, double temperature_k, const SpeciesVec& c) {
  ReactionVec r;
  const double rt = kGasConstant * temperature_k;
  const std::array<int, kReactionCount> fuel{C2H4, C2H4, EO};
  for (int j = 0; j < kReactionCount; ++j) {
    const double a = std::max(0.0, c[fuel[j]]);
    const double o = std::max(0.0, c[O2]);
    r[j] = k.pre_exponential[j] * std::exp(-k.activation_energy[j] / rt) * a * o;
  }
  return r;
}

ReactionVec heats_at(const KineticsParams& k, double temperature_k) {
  const ReactionVec dcp = k.stoichiometry * heat_capacities();
  return k.heat_of_reaction + dcp * (temperature_k - kTref);
}

}  // namespace eoilp::sim
