#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

namespace cabintherm {

struct ComfortSpec {
  double v_cab = 0.1;     // m/s
  double phi_cab = 0.40;  // relative humidity, fraction
  double met = 1.2;       // metabolic rate, met
  double psi_min = -1.0;
  double psi_max = 1.0;
  std::optional<double> psi_tgt;

  void validate() const;

  // PMV bounds at or beyond +/-3 put no constraint on the reported scale.
  bool lower_bound_active() const { return psi_min > -3.0; }
  bool upper_bound_active() const { return psi_max < 3.0; }
};

// Clothing insulation as a cubic in ambient temperature (Celsius), scaled and
// floored. The default coefficients are the UTCI clothing cubic with its
// temperature axis stretched by 1.06 so the summer floor is reached by 26 C.
class ClothingModel {
 public:
  static constexpr double kDefaultFloor = 0.3;

  ClothingModel();
  explicit ClothingModel(std::array<double, 4> coefficients, double floor = kDefaultFloor,
                         double scale = 1.0);

  // Ambient temperature in kelvin -> clo.
  double operator()(double t_inf) const;

  ClothingModel scaled(double factor) const;

  const std::array<double, 4>& coefficients() const { return coefficients_; }
  double floor() const { return floor_; }
  double scale() const { return scale_; }

 private:
  std::array<double, 4> coefficients_;
  double floor_;
  double scale_;
};

// Predicted mean vote after EN ISO 7730 for air temperature and mean radiant
// temperature in kelvin. Not clamped. Throws EvaluationError if the clothing
// surface temperature iteration does not settle within 150 steps.
double pmv(double t_air, double t_mr, double clo, const ComfortSpec& spec);

double clamp_pmv(double psi);

// Predicted percentage dissatisfied, in percent.
double ppd(double psi);

double mean_pmv(std::span<const double> per_passenger);

// Least-squares polynomial approximation of pmv() in (t_air, t_mr, clo) for a
// fixed air speed, humidity and metabolic rate. Outside the fitted box the
// polynomial is continued linearly from the box boundary.
class PmvSurrogate {
 public:
  static constexpr int kDefaultDegree = 7;

  struct Gradient {
    double value;
    double d_air;
    double d_mr;
  };

  // Throws std::invalid_argument for grids that cannot determine the fit.
  static PmvSurrogate fit(const ComfortSpec& spec, std::span<const double> clo_grid,
                          std::span<const double> temperature_grid,
                          int degree = kDefaultDegree);

  // Default envelope: 0..45 C for both temperatures, 0.3..1.8 clo.
  static PmvSurrogate fit_default(const ComfortSpec& spec, int degree = kDefaultDegree);

  double operator()(double t_air, double t_mr, double clo) const;

  // Bivariate restriction at fixed clothing, used in the inner loops.
  class Slice {
   public:
    Gradient evaluate(double t_air, double t_mr) const;

   private:
    friend class PmvSurrogate;
    int degree_ = 0;
    double t_center_ = 0.0;
    double t_half_ = 1.0;
    std::vector<double> coef_;  // (i, j) -> coef_[i * (degree + 1) + j], i + j <= degree
  };

  Slice slice(double clo) const;

  int degree() const { return degree_; }
  const ComfortSpec& spec() const { return spec_; }
  double t_min() const { return t_center_ - t_half_; }
  double t_max() const { return t_center_ + t_half_; }
  double clo_min() const { return c_center_ - c_half_; }
  double clo_max() const { return c_center_ + c_half_; }
  // Largest absolute deviation from pmv() seen on the fitting grid.
  double grid_max_error() const { return grid_max_error_; }

 private:
  ComfortSpec spec_;
  int degree_ = 0;
  double t_center_ = 0.0, t_half_ = 1.0;
  double c_center_ = 0.0, c_half_ = 1.0;
  std::vector<std::array<int, 3>> exponents_;
  std::vector<double> coef_;
  double grid_max_error_ = 0.0;
};

std::vector<double> linspace(double lo, double hi, int n);

}  // namespace cabintherm
