#pragma once

#include <array>
#include <string_view>

#include <Eigen/Core>

namespace eoilp::sim {

inline constexpr double kGasConstant = 8.314462618;  // J/(mol K)
inline constexpr double kKelvin = 273.15;
inline constexpr double kTref = 298.15;

enum Species : int { C2H4 = 0, O2, EO, CO2, H2O, N2, kSpeciesCount };
enum Reaction : int { Main = 0, Side1, Side2, kReactionCount };

using SpeciesVec = Eigen::Matrix<double, kSpeciesCount, 1>;
using ReactionVec = Eigen::Matrix<double, kReactionCount, 1>;
using StoichMatrix = Eigen::Matrix<double, kReactionCount, kSpeciesCount>;

inline constexpr std::array<std::string_view, kSpeciesCount> kSpeciesNames{"C2H4", "O2", "C2H4O", "CO2", "H2O", "N2"};

/// Ideal-gas heat capacities, J/(mol K).
SpeciesVec heat_capacities();
/// Molar masses, kg/mol.
SpeciesVec molar_masses();

struct KineticsParams {
  ReactionVec pre_exponential;   // m3/(mol s)
  ReactionVec activation_energy; // J/mol
  ReactionVec heat_of_reaction;  // J/mol of reaction extent at 298.15 K, negative = exothermic
  StoichMatrix stoichiometry;    // rows: reactions, columns: species

  /// Frozen calibration: nominal conversion about 0.4 with the jacket on,
  /// runaway within seconds with all cooling removed.
  static KineticsParams calibrated();

  /// Throws std::invalid_argument when an invariant is broken.
  void validate() const;
};

/// Rate per reaction, mol/(m3 s): A exp(-E/RT) times the concentration of
/// each reactant (first order in the hydrocarbon and in oxygen).
ReactionVec reaction_rates(const KineticsParams& k, double temperature_k, const SpeciesVec& concentrations);

/// Heat of reaction at temperature T, with constant heat capacities.
ReactionVec heats_at(const KineticsParams& k, double temperature_k);

}  // namespace eoilp::sim
