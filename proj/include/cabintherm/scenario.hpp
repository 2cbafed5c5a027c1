#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "cabintherm/model.hpp"

namespace cabintherm {

struct ScenarioSet {
  std::vector<Scenario> scenarios;
  std::string provenance;  // file path, or generator seed and profile name

  std::size_t size() const { return scenarios.size(); }
  bool empty() const { return scenarios.empty(); }
  auto begin() const { return scenarios.begin(); }
  auto end() const { return scenarios.end(); }

  // Scenarios per month, index 0 = January.
  std::array<int, 12> month_histogram() const;

  // Non-empty, every scenario valid, ids unique. Throws DataError.
  void validate() const;
};

// Reads the documented CSV format (header row required):
//   id,month,T_inf_C,I_dni,I_dhi,beta_deg,N_pass,zeta_door,zeta_sh
// The solar altitude may instead come from timestamp,latitude_deg,
// longitude_deg columns (timestamp as UTC seconds or YYYY-MM-DDTHH:MM:SSZ).
// Rows with the sun below the horizon but nonzero irradiance are accepted
// with the irradiance zeroed, and a warning is appended. Throws DataError on
// missing columns, unreadable fields, an empty file or invalid rows (all bad
// line numbers are listed).
ScenarioSet read_scenarios_csv(std::istream& in, const std::string& source,
                               std::vector<std::string>* warnings = nullptr);
ScenarioSet load_scenarios_csv(const std::filesystem::path& path,
                               std::vector<std::string>* warnings = nullptr);

// Writes the beta_deg form. Numbers are printed with the fewest digits that
// read back to the identical double, so write + read is lossless.
void write_scenarios_csv(const ScenarioSet& set, std::ostream& out);
void save_scenarios_csv(const ScenarioSet& set, const std::filesystem::path& path);

// Solar altitude (rad) from the low-precision almanac algorithm, good to
// about 0.5 degrees for 1950..2100. Latitude/longitude in rad, east positive.
double solar_altitude(double utc_seconds, double latitude, double longitude);

// UTC seconds since 1970 for a civil date and time.
double utc_seconds(int year, int month, int day, double hours = 0.0);

// Distribution parameters of the synthetic scenario generator. The default is
// a temperate central-European placeholder, not measured data.
struct ClimateProfile {
  std::string name = "temperate";
  double latitude_deg = 47.38;
  double longitude_deg = 8.54;
  int year = 2022;
  double utc_offset_h = 1.0;  // local standard time
  int first_hour = 5;         // operating hours, local time, start of hour
  int last_hour = 23;

  std::array<double, 12> month_weight{1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1};
  std::array<double, 12> t_mean_c{0.5, 1.5, 5.5, 9.5, 14.0, 17.5, 19.5, 19.0, 15.0, 10.5, 5.0, 1.5};
  std::array<double, 12> t_std_c{4, 4, 4, 4, 4, 4, 4, 4, 4, 4, 4, 4};
  double diurnal_amplitude_c = 4.0;  // half the day-night swing, peak at 15 h

  // clearness index of the sky, Beta distributed with this mean per month
  std::array<double, 12> clearness_mean{0.35, 0.4, 0.45, 0.5, 0.5, 0.55,
                                        0.6, 0.6, 0.5, 0.45, 0.35, 0.3};
  double clearness_concentration = 4.0;

  double passengers_mean = 22.0;
  double passengers_shape = 2.5;  // gamma shape of the Poisson rate
  int passengers_max = 60;

  double door_max = 0.3;  // zeta_door = door_max * Beta(door_a, door_b)
  double door_a = 2.0;
  double door_b = 6.0;

  // shade fraction by month (winter 0.45, spring 0.35, summer 0.25, autumn 0.35)
  std::array<double, 12> zeta_sh{0.45, 0.45, 0.35, 0.35, 0.35, 0.25,
                                 0.25, 0.25, 0.35, 0.35, 0.35, 0.45};

  // Throws ConfigError.
  void validate() const;
};

// n scenarios, deterministic in (n, seed, profile). Ids are "syn-000001"....
ScenarioSet synthesize_dataset(int n, std::uint64_t seed, const ClimateProfile& profile = {});

}  // namespace cabintherm
