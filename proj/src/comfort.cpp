#include "cabintherm/comfort.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "cabintherm/errors.hpp"
#include "cabintherm/units.hpp"

namespace cabintherm {

void ComfortSpec::validate() const {
  if (!(v_cab > 0.0) || !std::isfinite(v_cab)) throw ConfigError("air velocity must be positive");
  if (!(phi_cab > 0.0 && phi_cab < 1.0)) throw ConfigError("relative humidity must lie in (0, 1)");
  if (!(met > 0.0) || !std::isfinite(met)) throw ConfigError("metabolic rate must be positive");
  if (!(psi_min <= psi_max)) throw ConfigError("PMV window has psi_min > psi_max");
  if (psi_min < -3.0 || psi_max > 3.0) throw ConfigError("PMV window must lie within [-3, 3]");
  if (psi_tgt && (*psi_tgt < -3.0 || *psi_tgt > 3.0)) {
    throw ConfigError("PMV target must lie within [-3, 3]");
  }
}

// ---------------------------------------------------------------------------
// clothing

ClothingModel::ClothingModel()
    : ClothingModel({1.372, -0.01866 * 1.06, -0.0004849 * 1.06 * 1.06,
                     -0.000009333 * 1.06 * 1.06 * 1.06}) {}

ClothingModel::ClothingModel(std::array<double, 4> coefficients, double floor, double scale)
    : coefficients_(coefficients), floor_(floor), scale_(scale) {
  for (double c : coefficients_) {
    if (!std::isfinite(c)) throw ConfigError("clothing coefficients must be finite");
  }
  if (!(floor_ > 0.0)) throw ConfigError("clothing floor must be positive");
  if (!(scale_ > 0.0)) throw ConfigError("clothing scale must be positive");
  // the curve has to be non-increasing over the plausible ambient range
  for (double t = -40.0; t <= 50.0; t += 0.5) {
    const double slope = coefficients_[1] + 2.0 * coefficients_[2] * t + 3.0 * coefficients_[3] * t * t;
    if (slope > 1e-12) {
      throw ConfigError(fmt::format("clothing curve increases at {} C", t));
    }
  }
}

double ClothingModel::operator()(double t_inf) const {
  const double t = to_celsius(t_inf);
  const auto& a = coefficients_;
  const double raw = a[0] + t * (a[1] + t * (a[2] + t * a[3]));
  return std::max(floor_, scale_ * raw);
}

ClothingModel ClothingModel::scaled(double factor) const {
  return ClothingModel(coefficients_, floor_, scale_ * factor);
}

// ---------------------------------------------------------------------------
// PMV / PPD

double pmv(double t_air, double t_mr, double clo, const ComfortSpec& spec) {
  const double ta = to_celsius(t_air);
  const double tr = to_celsius(t_mr);
  const double rh = spec.phi_cab * 100.0;
  const double pa = rh * 10.0 * std::exp(16.6536 - 4030.183 / (ta + 235.0));

  const double icl = 0.155 * clo;
  const double m = spec.met * 58.15;
  const double mw = m;  // no external work
  const double fcl = icl <= 0.078 ? 1.0 + 1.29 * icl : 1.05 + 0.645 * icl;
  const double hcf = 12.1 * std::sqrt(spec.v_cab);
  const double taa = ta + 273.0;
  const double tra = tr + 273.0;
  const double tcla = taa + (35.5 - ta) / (3.5 * icl + 0.1);

  const double p1 = icl * fcl;
  const double p2 = p1 * 3.96;
  const double p3 = p1 * 100.0;
  const double p4 = p1 * taa;
  const double tr100 = tra / 100.0;
  const double tra4 = tr100 * tr100 * tr100 * tr100;
  const double p5 = 308.7 - 0.028 * mw + p2 * tra4;

  // clothing surface temperature / 100 K; 1e-11 here is 1e-9 K
  double xn = tcla / 100.0;
  double xf = tcla / 50.0;
  double hc = hcf;
  int n = 0;
  while (std::abs(xn - xf) > 1e-11) {
    xf = (xf + xn) / 2.0;
    const double hcn = 2.38 * std::sqrt(std::sqrt(std::abs(100.0 * xf - taa)));
    hc = std::max(hcf, hcn);
    xn = (p5 + p4 * hc - p2 * xf * xf * xf * xf) / (100.0 + p3 * hc);
    if (++n > 150) {
      throw EvaluationError(fmt::format(
          "PMV clothing temperature iteration did not converge (ta={:.3f} C, tr={:.3f} C, clo={:.3f})",
          ta, tr, clo));
    }
  }
  const double tcl = 100.0 * xn - 273.0;

  const double hl1 = 3.05e-3 * (5733.0 - 6.99 * mw - pa);         // skin diffusion
  const double hl2 = mw > 58.15 ? 0.42 * (mw - 58.15) : 0.0;      // sweating
  const double hl3 = 1.7e-5 * m * (5867.0 - pa);                  // latent respiration
  const double hl4 = 0.0014 * m * (34.0 - ta);                    // dry respiration
  const double hl5 = 3.96 * fcl * (xn * xn * xn * xn - tra4);     // radiation
  const double hl6 = fcl * hc * (tcl - ta);                       // convection

  const double ts = 0.303 * std::exp(-0.036 * m) + 0.028;
  return ts * (mw - hl1 - hl2 - hl3 - hl4 - hl5 - hl6);
}

double clamp_pmv(double psi) { return std::clamp(psi, -3.0, 3.0); }

double ppd(double psi) {
  const double p2 = psi * psi;
  return 100.0 - 95.0 * std::exp(-0.03353 * p2 * p2 - 0.2179 * p2);
}

double mean_pmv(std::span<const double> per_passenger) {
  if (per_passenger.empty()) throw std::invalid_argument("mean_pmv of an empty passenger list");
  double sum = 0.0;
  for (double v : per_passenger) sum += v;
  return sum / static_cast<double>(per_passenger.size());
}

// ---------------------------------------------------------------------------
// surrogate

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> out(static_cast<std::size_t>(n));
  if (n == 1) {
    out[0] = lo;
    return out;
  }
  for (int i = 0; i < n; ++i) out[i] = lo + (hi - lo) * i / (n - 1);
  return out;
}

namespace {

void powers(double x, int degree, double* out) {
  out[0] = 1.0;
  for (int k = 1; k <= degree; ++k) out[k] = out[k - 1] * x;
}

std::pair<double, double> center_half(std::span<const double> grid) {
  const auto [lo, hi] = std::minmax_element(grid.begin(), grid.end());
  return {0.5 * (*lo + *hi), 0.5 * (*hi - *lo)};
}

}  // namespace

PmvSurrogate PmvSurrogate::fit(const ComfortSpec& spec, std::span<const double> clo_grid,
                               std::span<const double> temperature_grid, int degree) {
  if (degree < 1 || degree > 10) throw std::invalid_argument("surrogate degree must be in 1..10");
  if (clo_grid.size() < 2 || temperature_grid.size() < 2) {
    throw std::invalid_argument("surrogate grid needs at least two values per axis");
  }
  for (double v : clo_grid) {
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite clothing grid value");
  }
  for (double v : temperature_grid) {
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite temperature grid value");
  }

  PmvSurrogate s;
  s.spec_ = spec;
  s.degree_ = degree;
  std::tie(s.t_center_, s.t_half_) = center_half(temperature_grid);
  std::tie(s.c_center_, s.c_half_) = center_half(clo_grid);
  if (!(s.t_half_ > 0.0) || !(s.c_half_ > 0.0)) {
    throw std::invalid_argument("surrogate grid axes must span a non-empty interval");
  }
  for (int i = 0; i <= degree; ++i) {
    for (int j = 0; i + j <= degree; ++j) {
      for (int k = 0; i + j + k <= degree; ++k) s.exponents_.push_back({i, j, k});
    }
  }

  const Eigen::Index rows =
      static_cast<Eigen::Index>(temperature_grid.size() * temperature_grid.size() * clo_grid.size());
  const Eigen::Index cols = static_cast<Eigen::Index>(s.exponents_.size());
  if (rows < cols) {
    throw std::invalid_argument(
        fmt::format("surrogate grid has {} points for {} coefficients", rows, cols));
  }

  Eigen::MatrixXd a(rows, cols);
  Eigen::VectorXd y(rows);
  std::vector<double> px(degree + 1), py(degree + 1), pz(degree + 1);
  Eigen::Index r = 0;
  for (double ta : temperature_grid) {
    powers((ta - s.t_center_) / s.t_half_, degree, px.data());
    for (double tr : temperature_grid) {
      powers((tr - s.t_center_) / s.t_half_, degree, py.data());
      for (double clo : clo_grid) {
        powers((clo - s.c_center_) / s.c_half_, degree, pz.data());
        for (Eigen::Index c = 0; c < cols; ++c) {
          const auto& e = s.exponents_[c];
          a(r, c) = px[e[0]] * py[e[1]] * pz[e[2]];
        }
        y(r) = pmv(ta, tr, clo, spec);
        ++r;
      }
    }
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  if (qr.rank() < cols) {
    throw std::invalid_argument("surrogate grid does not determine the polynomial (rank deficient)");
  }
  const Eigen::VectorXd coef = qr.solve(y);
  s.coef_.assign(coef.data(), coef.data() + coef.size());
  s.grid_max_error_ = (a * coef - y).cwiseAbs().maxCoeff();
  return s;
}

PmvSurrogate PmvSurrogate::fit_default(const ComfortSpec& spec, int degree) {
  const auto temps = linspace(to_kelvin(0.0), to_kelvin(45.0), 22);
  const auto clos = linspace(0.3, 1.8, 9);
  return fit(spec, clos, temps, degree);
}

PmvSurrogate::Slice PmvSurrogate::slice(double clo) const {
  Slice out;
  out.degree_ = degree_;
  out.t_center_ = t_center_;
  out.t_half_ = t_half_;
  const int stride = degree_ + 1;
  out.coef_.assign(static_cast<std::size_t>(stride * stride), 0.0);

  const double z = (clo - c_center_) / c_half_;
  const double zc = std::clamp(z, -1.0, 1.0);
  const double dz = z - zc;
  std::vector<double> pz(degree_ + 1);
  powers(zc, degree_, pz.data());
  for (std::size_t c = 0; c < exponents_.size(); ++c) {
    const auto& e = exponents_[c];
    double factor = pz[e[2]];
    if (dz != 0.0 && e[2] > 0) factor += e[2] * pz[e[2] - 1] * dz;
    out.coef_[e[0] * stride + e[1]] += coef_[c] * factor;
  }
  return out;
}

PmvSurrogate::Gradient PmvSurrogate::Slice::evaluate(double t_air, double t_mr) const {
  const double x = (t_air - t_center_) / t_half_;
  const double y = (t_mr - t_center_) / t_half_;
  const double xc = std::clamp(x, -1.0, 1.0);
  const double yc = std::clamp(y, -1.0, 1.0);
  const double dx = x - xc;
  const double dy = y - yc;

  // nested Horner: inner sums in y, then the outer sum in x, each carrying
  // its first derivative along
  const int stride = degree_ + 1;
  double p = 0.0, p_x = 0.0, p_y = 0.0, p_xy = 0.0;
  for (int i = degree_; i >= 0; --i) {
    const double* c = &coef_[i * stride];
    double q = 0.0, q_y = 0.0;
    for (int j = degree_ - i; j >= 0; --j) {
      q_y = q_y * yc + q;
      q = q * yc + c[j];
    }
    p_x = p_x * xc + p;
    p = p * xc + q;
    p_xy = p_xy * xc + p_y;
    p_y = p_y * xc + q_y;
  }
  Gradient g;
  g.value = p + p_x * dx + p_y * dy;
  g.d_air = (p_x + (dx == 0.0 ? p_xy * dy : 0.0)) / t_half_;
  g.d_mr = (p_y + (dy == 0.0 ? p_xy * dx : 0.0)) / t_half_;
  return g;
}

double PmvSurrogate::operator()(double t_air, double t_mr, double clo) const {
  return slice(clo).evaluate(t_air, t_mr).value;
}

}  // namespace cabintherm
