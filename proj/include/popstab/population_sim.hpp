#pragma once

/// @file population_sim.hpp
/// Synthetic credit populations: attributes are drawn independently per
/// customer from configured level proportions, and each customer's
/// default probability is the product of the levels' bad ratios times a
/// global constant calibrated so the development population's mean PD
/// hits the configured target exactly.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "popstab/types.hpp"

namespace popstab::sim {

/// PDs are clamped into [kPdClamp, 1 - kPdClamp] to keep Bernoulli
/// parameters and logits finite.
inline constexpr double kPdClamp = 1e-4;

/// One attribute: level labels, development proportions and the
/// relative default-odds multiplier per level (reference level 1.0).
/// A level may carry proportion zero; its bad ratio is then unused in
/// development draws.
struct AttributeConfig {
  std::string name;
  std::vector<std::string> levels;
  std::vector<double> props;
  std::vector<double> bad_ratios;
  bool ordinal = false;

  AttributeConfig() = default;
  AttributeConfig(std::string name_in, std::vector<std::string> levels_in,
                  std::vector<double> props_in,
                  std::vector<double> bad_ratios_in, bool ordinal_in);
};

enum class ScenarioKind { Stable, StableOutcome, Unstable };
std::string to_string(ScenarioKind kind);
std::optional<ScenarioKind> scenario_from_string(const std::string& name);

struct ScenarioConfig {
  std::string name;
  std::vector<AttributeConfig> base;
  // Replacement review proportions, keyed by attribute name. Level
  // counts must match the base attribute.
  std::map<std::string, std::vector<double>> review_overrides;
  double target_bad_rate = 0.10;
  long population_size = 10000;

  const AttributeConfig* find_attribute(const std::string& name) const;
  void validate() const;
};

/// The three built-in scenarios: an unchanged review population, an
/// offsetting two-attribute shift, and a six-attribute drift.
std::vector<ScenarioConfig> builtin_scenarios();

enum class PopulationRole { Development, Review };

struct SimulatedPopulation {
  struct Attribute {
    std::string name;
    std::vector<std::string> levels;
    bool ordinal = false;
  };

  std::vector<Attribute> attributes;
  // level_index[a][c] is customer c's level of attribute a.
  std::vector<std::vector<std::uint8_t>> level_index;
  std::vector<double> true_pd;
  std::vector<std::uint8_t> defaulted;
  std::uint64_t seed = 0;
  PopulationRole role = PopulationRole::Development;

  std::size_t size() const { return true_pd.size(); }
  double default_rate() const;
  std::size_t attribute_index(const std::string& name) const;
};

/// The calibrated PD scale together with the exact development-side
/// mean it achieves.
struct Calibration {
  double scale = 0.0;
  double dev_mean_pd = 0.0;
};

/// Solves for the global scale by bisection against the exact clamped
/// expectation over the product distribution of the bad ratios.
Calibration calibrate(const ScenarioConfig& config);

/// Draws a population. Deterministic for fixed (config, role, seed);
/// development and review use distinct streams of the same seed.
SimulatedPopulation simulate(const ScenarioConfig& config,
                             PopulationRole role, std::uint64_t seed);

/// Observed level proportions of one attribute in both populations.
SnapshotPair snapshot(const SimulatedPopulation& development,
                      const SimulatedPopulation& review,
                      const std::string& attribute);

/// Exact analytic mean PDs under the development and review proportion
/// sets (no sampling), using the development-calibrated scale.
std::pair<double, double> mean_pd_shift(const ScenarioConfig& config);

/// Exact E[PD | attribute = level] per level under the development
/// distribution (one entry per configured level, in level order).
std::vector<double> level_conditional_pds(const ScenarioConfig& config,
                                          const std::string& attribute);

/// JSON round-trip of scenario configurations (documented schema
/// mirroring AttributeConfig).
std::string scenario_to_json(const ScenarioConfig& config);
ScenarioConfig scenario_from_json(const std::string& json_text);

}  // namespace popstab::sim
