#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cabintherm/analysis.hpp"
#include "cabintherm/bus_config.hpp"
#include "cabintherm/comfort.hpp"
#include "cabintherm/geometry.hpp"
#include "cabintherm/scenario.hpp"
#include "cabintherm/thermal_model.hpp"

namespace cabintherm {

// A named HVAC concept: the base vehicle with its own heating COP and radiant
// heater settings.
struct Concept {
  std::string name;
  BusConfig config;
};

// Run-level settings that also exist as command-line flags.
struct RunSettings {
  std::uint64_t seed = 42;
  int jobs = 0;
  std::string solver = "opt";  // opt | rootfind | both
  std::optional<std::string> scenarios;
  std::vector<double> half_widths = default_half_widths();
  std::vector<std::string> sensitivity_parameters = default_sensitivity_parameters();
  double sensitivity_delta = 0.01;
};

// Everything a configuration file describes. Temperatures in the file are in
// Celsius; in memory they are kelvin like everywhere else.
struct ModelSetup {
  BusConfig bus;
  ComfortSpec comfort;
  CabinLayout cabin;
  ClothingModel clothing;
  ClimateProfile climate;
  std::vector<Concept> concepts;
  RunSettings run;

  ThermalModel model() const;
  ThermalModel model(const BusConfig& cfg) const;
  // Named concept, or the base vehicle for "base". Throws ConfigError.
  const BusConfig& concept_config(const std::string& name) const;
  std::vector<NamedModel> concept_models() const;
};

// PTC-AC, HP-AC, PTC-AC+RH and HP-AC+RH on top of `base` (4 m^2 panels at
// 90 C for the RH variants).
std::vector<Concept> default_concepts(const BusConfig& base);

// Unknown keys are rejected so misspelt parameters do not pass silently.
// Throws ConfigError.
ModelSetup setup_from_json_text(const std::string& text, const std::string& source = "<config>");
ModelSetup load_setup(const std::filesystem::path& path);
std::string setup_to_json_text(const ModelSetup& setup);

}  // namespace cabintherm
