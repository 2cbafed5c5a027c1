#include "cabintherm/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "cabintherm/errors.hpp"
#include "cabintherm/units.hpp"

namespace cabintherm {

std::array<int, 12> ScenarioSet::month_histogram() const {
  std::array<int, 12> h{};
  for (const auto& s : scenarios) {
    if (s.month >= 1 && s.month <= 12) ++h[s.month - 1];
  }
  return h;
}

void ScenarioSet::validate() const {
  if (scenarios.empty()) throw DataError("scenario set is empty");
  std::set<std::string> ids;
  for (const auto& s : scenarios) {
    cabintherm::validate(s);
    if (!ids.insert(s.id).second) throw DataError(fmt::format("duplicate scenario id '{}'", s.id));
  }
}

// ---------------------------------------------------------------------------
// CSV

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

bool parse_double(std::string_view s, double& v) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  return r.ec == std::errc() && r.ptr == s.data() + s.size() && std::isfinite(v);
}

bool parse_int(std::string_view s, int& v) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  return r.ec == std::errc() && r.ptr == s.data() + s.size();
}

// "YYYY-MM-DDTHH:MM:SS[Z]" or plain seconds.
bool parse_timestamp(std::string_view s, double& seconds) {
  if (parse_double(s, seconds)) return true;
  int y = 0, mo = 0, d = 0, h = 0, mi = 0;
  double sec = 0.0;
  std::string buf(s);
  char tail = 0;
  const int got = std::sscanf(buf.c_str(), "%d-%d-%dT%d:%d:%lf%c", &y, &mo, &d, &h, &mi, &sec, &tail);
  if (got < 6 || (got == 7 && tail != 'Z')) return false;
  if (mo < 1 || mo > 12 || d < 1 || d > 31 || h < 0 || h > 24 || mi < 0 || mi > 59) return false;
  seconds = utc_seconds(y, mo, d, h + mi / 60.0 + sec / 3600.0);
  return true;
}

// Fewest digits of to(stored) that convert back to exactly `stored`.
std::string lossless(double stored, double (*to)(double), double (*from)(double)) {
  const double v = to(stored);
  for (int digits = 1; digits <= 17; ++digits) {
    const std::string s = fmt::format("{:.{}g}", v, digits);
    double back = 0.0;
    if (parse_double(s, back) && from(back) == stored) return s;
  }
  double lo = v, hi = v;
  for (int k = 0; k < 16; ++k) {
    lo = std::nextafter(lo, -HUGE_VAL);
    hi = std::nextafter(hi, HUGE_VAL);
    for (double cand : {lo, hi}) {
      const std::string s = fmt::format("{}", cand);
      double back = 0.0;
      if (parse_double(s, back) && from(back) == stored) return s;
    }
  }
  return fmt::format("{}", v);
}

double identity(double x) { return x; }
double k_to_c(double t) { return to_celsius(t); }
double c_to_k(double t) { return to_kelvin(t); }
double r_to_d(double r) { return rad_to_deg(r); }
double d_to_r(double d) { return deg_to_rad(d); }

}  // namespace

ScenarioSet read_scenarios_csv(std::istream& in, const std::string& source, std::vector<std::string>* warnings) {
  std::string line;
  int line_no = 0;
  std::vector<std::string_view> header;
  std::string header_line;
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) {
      header_line = line;
      break;
    }
  }
  if (header_line.empty()) throw DataError(fmt::format("{}: empty scenario file", source));
  if (header_line.size() >= 3 && header_line.compare(0, 3, "\xEF\xBB\xBF") == 0) header_line.erase(0, 3);
  header = split(header_line);

  std::map<std::string, std::size_t, std::less<>> col;
  for (std::size_t i = 0; i < header.size(); ++i) col.emplace(std::string(header[i]), i);
  const bool has_beta = col.count("beta_deg") > 0;
  const bool has_time = col.count("timestamp") && col.count("latitude_deg") && col.count("longitude_deg");
  std::vector<std::string> missing;
  for (const char* name : {"id", "month", "T_inf_C", "I_dni", "I_dhi", "N_pass", "zeta_door", "zeta_sh"}) {
    if (!col.count(name)) missing.emplace_back(name);
  }
  if (!has_beta && !has_time) missing.emplace_back("beta_deg (or timestamp,latitude_deg,longitude_deg)");
  if (!missing.empty()) {
    throw DataError(fmt::format("{}: missing column(s): {}", source, fmt::join(missing, ", ")));
  }

  ScenarioSet set;
  set.provenance = source;
  std::vector<std::string> errors;
  std::set<std::string> ids;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto f = split(line);
    auto bad = [&](const std::string& what) { errors.push_back(fmt::format("line {}: {}", line_no, what)); };
    if (f.size() != header.size()) {
      bad(fmt::format("expected {} fields, found {}", header.size(), f.size()));
      continue;
    }
    auto field = [&](const char* name) { return f[col.find(name)->second]; };
    auto number = [&](const char* name, double& v) {
      if (parse_double(field(name), v)) return true;
      bad(fmt::format("{} is not a number: '{}'", name, field(name)));
      return false;
    };
    auto integer = [&](const char* name, int& v) {
      if (parse_int(field(name), v)) return true;
      bad(fmt::format("{} is not an integer: '{}'", name, field(name)));
      return false;
    };

    Scenario s;
    s.id = std::string(field("id"));
    double t_c = 0.0, beta_deg = 0.0;
    bool ok = !s.id.empty();
    if (!ok) bad("empty id");
    ok = integer("month", s.month) && ok;
    ok = number("T_inf_C", t_c) && ok;
    ok = number("I_dni", s.i_dni) && ok;
    ok = number("I_dhi", s.i_dhi) && ok;
    ok = integer("N_pass", s.n_pass) && ok;
    ok = number("zeta_door", s.zeta_door) && ok;
    ok = number("zeta_sh", s.zeta_sh) && ok;
    if (has_beta) {
      ok = number("beta_deg", beta_deg) && ok;
      s.beta = deg_to_rad(beta_deg);
    } else {
      double ts = 0.0, lat = 0.0, lon = 0.0;
      if (!parse_timestamp(field("timestamp"), ts)) {
        bad(fmt::format("unreadable timestamp '{}'", field("timestamp")));
        ok = false;
      }
      ok = number("latitude_deg", lat) && ok;
      ok = number("longitude_deg", lon) && ok;
      if (ok) s.beta = solar_altitude(ts, deg_to_rad(lat), deg_to_rad(lon));
    }
    if (!ok) continue;
    s.t_inf = to_kelvin(t_c);
    if (s.beta <= 0.0 && (s.i_dni > 0.0 || s.i_dhi > 0.0) && s.i_dni >= 0.0 && s.i_dhi >= 0.0) {
      if (warnings) {
        warnings->push_back(fmt::format("{}:{}: sun below the horizon, irradiance set to zero", source, line_no));
      }
      s.i_dni = 0.0;
      s.i_dhi = 0.0;
    }
    try {
      validate(s);
    } catch (const DataError& e) {
      bad(e.what());
      continue;
    }
    if (!ids.insert(s.id).second) {
      bad(fmt::format("duplicate id '{}'", s.id));
      continue;
    }
    set.scenarios.push_back(std::move(s));
  }
  if (!errors.empty()) {
    throw DataError(fmt::format("{}: {} rejected row(s):\n  {}", source, errors.size(), fmt::join(errors, "\n  ")));
  }
  if (set.scenarios.empty()) throw DataError(fmt::format("{}: no scenario rows", source));
  return set;
}

ScenarioSet load_scenarios_csv(const std::filesystem::path& path, std::vector<std::string>* warnings) {
  std::ifstream in(path);
  if (!in) throw DataError(fmt::format("cannot open scenario file {}", path.string()));
  return read_scenarios_csv(in, path.string(), warnings);
}

void write_scenarios_csv(const ScenarioSet& set, std::ostream& out) {
  out << "id,month,T_inf_C,I_dni,I_dhi,beta_deg,N_pass,zeta_door,zeta_sh\n";
  for (const auto& s : set.scenarios) {
    out << fmt::format("{},{},{},{},{},{},{},{},{}\n", s.id, s.month, lossless(s.t_inf, k_to_c, c_to_k),
                       lossless(s.i_dni, identity, identity), lossless(s.i_dhi, identity, identity),
                       lossless(s.beta, r_to_d, d_to_r), s.n_pass, lossless(s.zeta_door, identity, identity),
                       lossless(s.zeta_sh, identity, identity));
  }
}

void save_scenarios_csv(const ScenarioSet& set, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError(fmt::format("cannot write {}", path.string()));
  write_scenarios_csv(set, out);
  if (!out) throw DataError(fmt::format("error while writing {}", path.string()));
}

// ---------------------------------------------------------------------------
// sun

double utc_seconds(int year, int month, int day, double hours) {
  using namespace std::chrono;
  const sys_days d = year_month_day{std::chrono::year(year), std::chrono::month(static_cast<unsigned>(month)),
                                    std::chrono::day(static_cast<unsigned>(day))};
  return static_cast<double>(d.time_since_epoch().count()) * 86400.0 + hours * 3600.0;
}

double solar_altitude(double utc, double latitude, double longitude) {
  const double n = utc / 86400.0 + 2440587.5 - 2451545.0;  // days since J2000.0
  const double mean_long = deg_to_rad(std::fmod(280.460 + 0.9856474 * n, 360.0));
  const double anomaly = deg_to_rad(std::fmod(357.528 + 0.9856003 * n, 360.0));
  const double ecl_long = mean_long + deg_to_rad(1.915) * std::sin(anomaly) + deg_to_rad(0.020) * std::sin(2.0 * anomaly);
  const double obliquity = deg_to_rad(23.439 - 4.0e-7 * n);
  const double ra = std::atan2(std::cos(obliquity) * std::sin(ecl_long), std::cos(ecl_long));
  const double dec = std::asin(std::sin(obliquity) * std::sin(ecl_long));
  const double gmst_h = std::fmod(18.697374558 + 24.06570982441908 * n, 24.0);
  const double hour_angle = deg_to_rad(gmst_h * 15.0) + longitude - ra;
  const double s = std::sin(latitude) * std::sin(dec) + std::cos(latitude) * std::cos(dec) * std::cos(hour_angle);
  return std::asin(std::clamp(s, -1.0, 1.0));
}

// ---------------------------------------------------------------------------
// generator

void ClimateProfile::validate() const {
  auto fail = [](const std::string& what) { throw ConfigError("climate profile: " + what); };
  if (std::abs(latitude_deg) > 90.0 || std::abs(longitude_deg) > 180.0) fail("latitude/longitude out of range");
  if (year < 1950 || year > 2100) fail("year must lie in 1950..2100");
  if (first_hour < 0 || last_hour > 23 || first_hour > last_hour) fail("operating hours must satisfy 0 <= first <= last <= 23");
  double weight_sum = 0.0;
  for (int m = 0; m < 12; ++m) {
    if (!(month_weight[m] >= 0.0)) fail("month weights must be non-negative");
    weight_sum += month_weight[m];
    if (!(t_std_c[m] >= 0.0)) fail("temperature standard deviations must be non-negative");
    if (!std::isfinite(t_mean_c[m])) fail("monthly mean temperatures must be finite");
    if (!(clearness_mean[m] > 0.0 && clearness_mean[m] < 1.0)) fail("clearness means must lie in (0, 1)");
    if (!(zeta_sh[m] >= 0.0 && zeta_sh[m] <= 1.0)) fail("shade fractions must lie in [0, 1]");
  }
  if (!(weight_sum > 0.0)) fail("at least one month needs a positive weight");
  if (!(diurnal_amplitude_c >= 0.0)) fail("diurnal amplitude must be non-negative");
  if (!(clearness_concentration > 0.0)) fail("clearness concentration must be positive");
  if (!(passengers_mean >= 0.0) || !(passengers_shape > 0.0) || passengers_max < 0) fail("bad passenger parameters");
  if (!(door_max >= 0.0 && door_max <= 1.0) || !(door_a > 0.0) || !(door_b > 0.0)) fail("bad door parameters");
}

namespace {

double sample_beta(std::mt19937_64& rng, double a, double b) {
  std::gamma_distribution<double> ga(a, 1.0), gb(b, 1.0);
  const double x = ga(rng);
  const double y = gb(rng);
  return x + y > 0.0 ? x / (x + y) : 0.5;
}

// dividing by the integer scale keeps 92.1 as the double nearest 92.1
double quantize(double v, double per_unit) { return std::round(v * per_unit) / per_unit; }

int days_in_month(int year, int month) {
  using namespace std::chrono;
  const year_month_day_last last{std::chrono::year(year) / std::chrono::month(static_cast<unsigned>(month)) / std::chrono::last};
  return static_cast<int>(static_cast<unsigned>(last.day()));
}

}  // namespace

ScenarioSet synthesize_dataset(int n, std::uint64_t seed, const ClimateProfile& p) {
  if (n < 1) throw std::invalid_argument("synthesize_dataset needs n >= 1");
  p.validate();
  std::mt19937_64 rng(seed);
  std::discrete_distribution<int> pick_month(p.month_weight.begin(), p.month_weight.end());
  std::normal_distribution<double> noise(0.0, 1.0);
  std::uniform_int_distribution<int> pick_hour(p.first_hour, p.last_hour);
  const double lat = deg_to_rad(p.latitude_deg);
  const double lon = deg_to_rad(p.longitude_deg);
  const int width = std::max(6, static_cast<int>(std::to_string(n).size()));

  ScenarioSet set;
  set.provenance = fmt::format("synthetic profile={} seed={} n={}", p.name, seed, n);
  set.scenarios.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    Scenario s;
    s.id = fmt::format("syn-{:0{}d}", i + 1, width);
    s.month = pick_month(rng) + 1;
    const int m = s.month - 1;
    std::uniform_int_distribution<int> pick_day(1, days_in_month(p.year, s.month));
    const int day = pick_day(rng);
    const int hour = pick_hour(rng);
    const double local_h = hour + 0.5;  // the hour is represented by its midpoint
    const double utc = utc_seconds(p.year, s.month, day, local_h - p.utc_offset_h);

    const double diurnal = p.diurnal_amplitude_c * std::cos(2.0 * kPi * (local_h - 15.0) / 24.0);
    const double t_c = quantize(p.t_mean_c[m] + diurnal + p.t_std_c[m] * noise(rng), 100.0);
    s.t_inf = to_kelvin(t_c);

    const double beta_deg = quantize(rad_to_deg(solar_altitude(utc, lat, lon)), 1e4);
    s.beta = deg_to_rad(beta_deg);
    const double mean_k = p.clearness_mean[m];
    const double k = sample_beta(rng, mean_k * p.clearness_concentration, (1.0 - mean_k) * p.clearness_concentration);
    if (s.beta > 0.0) {
      constexpr double kSolarConstant = 1361.0;
      const double air_mass = 1.0 / (std::sin(s.beta) + 0.50572 * std::pow(6.07995 + beta_deg, -1.6364));
      const double clear_dni = kSolarConstant * std::pow(0.7, std::pow(air_mass, 0.678));
      s.i_dni = quantize(std::min(k * clear_dni, kSolarConstant), 10.0);
      s.i_dhi = quantize(kSolarConstant * std::sin(s.beta) * (0.06 + 0.25 * (1.0 - k)), 10.0);
    }

    std::gamma_distribution<double> rate(p.passengers_shape, p.passengers_mean / p.passengers_shape);
    const double lambda = p.passengers_mean > 0.0 ? rate(rng) : 0.0;
    std::poisson_distribution<int> count(std::max(lambda, 1e-12));
    s.n_pass = std::min(count(rng), p.passengers_max);
    s.zeta_door = quantize(p.door_max * sample_beta(rng, p.door_a, p.door_b), 1e4);
    s.zeta_sh = p.zeta_sh[m];
    set.scenarios.push_back(std::move(s));
  }
  return set;
}

}  // namespace cabintherm
