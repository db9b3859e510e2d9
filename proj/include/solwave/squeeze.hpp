#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "solwave/errors.hpp"
#include "solwave/field.hpp"

namespace solwave {

// Two-mode Bogoliubov mixing c1 = U b1 - V b2^dag, c2 = -V b1^dag + U b2.
// |U|^2 - |V|^2 = 1 is enforced at construction.
struct SqueezeParams {
  complexd U;
  complexd V;
  double eta = 0.0; // phase of V
  double g = 0.0;   // gain rate
  double z = 0.0;   // distance, so the squeeze magnitude is g*z
};

inline SqueezeParams make_squeeze_params(complexd U, complexd V) {
  const double defect = std::norm(U) - std::norm(V) - 1.0;
  if (std::abs(defect) > 1e-12)
    throw validation_error("squeeze coefficients violate |U|^2 - |V|^2 = 1 by " + std::to_string(defect));
  const double gz = std::asinh(std::abs(V));
  return SqueezeParams{U, V, std::arg(V), gz, 1.0};
}

inline SqueezeParams squeeze_from_gain(double g, double z, double eta) {
  if (g < 0.0 || z < 0.0) throw std::domain_error("gain rate and distance must be nonnegative");
  const double gz = g * z;
  const complexd V = std::polar(std::sinh(gz), eta);
  return SqueezeParams{std::cosh(gz), V, eta, g, z};
}

// Matrix product of two mixings acting on (b1, b2^dag). For equal eta the
// squeeze magnitudes g*z simply add.
inline SqueezeParams compose(const SqueezeParams& a, const SqueezeParams& b) {
  const complexd U = a.U * b.U + a.V * std::conj(b.V);
  const complexd V = a.U * b.V + a.V * std::conj(b.U);
  return make_squeeze_params(U, V);
}

// Minimal combination-quadrature variance over quadrature phase,
// (1/2)(|U| - |V|)^2. Equals the vacuum value 1/2 iff V = 0.
inline double min_quadrature_variance(const SqueezeParams& p) {
  const double d = std::abs(p.U) - std::abs(p.V);
  return 0.5 * d * d;
}

// Stokes / anti-Stokes coupling coefficients of the Raman medium.
struct RamanCouplings {
  double kappa1 = 0.0;
  double kappa2 = 0.0;
};

inline void check_couplings(const RamanCouplings& k) {
  if (k.kappa1 < 0.0 || k.kappa2 < 0.0) throw std::domain_error("couplings must be nonnegative");
  if (k.kappa1 + k.kappa2 <= 0.0) throw std::domain_error("couplings must not both be zero");
}

// Hypertransient-limit minimal variance (1/2)((k2-k1)/(k2+k1))^2.
inline double variance_hypertransient(const RamanCouplings& k) {
  check_couplings(k);
  const double r = (k.kappa2 - k.kappa1) / (k.kappa2 + k.kappa1);
  return 0.5 * r * r;
}

// Steady-state variance (1/2)(k2/(k2+k1))^2, strictly below 1/2 whenever k1 > 0.
inline double variance_steady_state(const RamanCouplings& k) {
  check_couplings(k);
  const double r = k.kappa2 / (k.kappa2 + k.kappa1);
  return 0.5 * r * r;
}

// Squeezing below vacuum in percent, 100*(1 - variance/(1/2)).
inline double squeezing_percent(double variance) { return 100.0 * (1.0 - variance / 0.5); }

// On-axis null-energy contribution -1/(16 pi^2 z^4) outside a Dirichlet plate
// with a unit-radius hole, three dimensions.
inline double dirichlet_null_energy(double z) {
  if (!(z > 0.0)) throw std::domain_error("distance from the plate must be positive");
  const double z2 = z * z;
  return -1.0 / (16.0 * pi * pi * z2 * z2);
}

// Reference squeezing figures quoted from the three-level-laser literature.
// Documentation constants only; nothing in this toolkit computes them.
namespace reference {
inline constexpr double intracavity_squeezing_pct = 97.8;      // parametric amplifier + squeezed reservoir
inline constexpr double cascade_laser_squeezing_pct = 98.0;    // driven cascade laser, eta = 0.02, A = 1000
inline constexpr double cascade_laser_squeezing_max_pct = 98.3;
inline constexpr double hm_crosstalk_attenuation = 0.62;       // helical-mode crosstalk vs standard WDM
inline constexpr double complete_collision_position_shift = 0.625;
} // namespace reference

// Least-squares fit of A*sech^2((t-t0)/w) + d to a sampled series.
struct Sech2Fit {
  double amplitude = 0.0;
  double width = 1.0;
  double center = 0.0;
  double offset = 0.0;
  double rms_residual = 0.0;
  bool converged = false;
};

namespace detail {

inline double sech(double x) { return 1.0 / std::cosh(x); }

inline double sech2_model(double t, const Eigen::Vector4d& p) {
  const double s = sech((t - p[2]) / p[1]);
  return p[0] * s * s + p[3];
}

} // namespace detail

// Levenberg-Marquardt on (A, w, t0, d), deterministically initialized from the
// extremum location and half-width of the series.
inline Sech2Fit fit_sech2_envelope(const std::vector<std::pair<double, double>>& series,
                                   int max_iterations = 200) {
  const int m = static_cast<int>(series.size());
  if (m < 8) throw config_error("sech^2 fit needs at least 8 samples");

  double vmin = series[0].second, vmax = series[0].second;
  for (const auto& [t, v] : series) {
    vmin = std::min(vmin, v);
    vmax = std::max(vmax, v);
  }
  if (vmax - vmin <= 0.0) throw config_error("series is constant; nothing to fit");

  // Baseline from the series edges, extremum = farthest point from it.
  const double baseline = 0.5 * (series.front().second + series.back().second);
  int ext = 0;
  for (int i = 1; i < m; ++i)
    if (std::abs(series[i].second - baseline) > std::abs(series[ext].second - baseline)) ext = i;
  const double a0 = series[ext].second - baseline;
  const double t0 = series[ext].first;

  // Half-width estimate: walk outward until the deviation halves.
  // sech^2(x) = 1/2 at x = arccosh(sqrt(2)).
  const double half_level = baseline + 0.5 * a0;
  double half_width = 0.0;
  for (int i = ext; i < m; ++i)
    if (std::abs(series[i].second - baseline) < std::abs(half_level - baseline)) {
      half_width = series[i].first - t0;
      break;
    }
  if (half_width <= 0.0)
    for (int i = ext; i >= 0; --i)
      if (std::abs(series[i].second - baseline) < std::abs(half_level - baseline)) {
        half_width = t0 - series[i].first;
        break;
      }
  if (half_width <= 0.0) half_width = 0.25 * (series.back().first - series.front().first);
  const double acosh_sqrt2 = 0.881373587019543;

  Eigen::Vector4d p(a0, half_width / acosh_sqrt2, t0, baseline);

  auto sum_sq = [&](const Eigen::Vector4d& q) {
    double s = 0.0;
    for (const auto& [t, v] : series) {
      const double r = detail::sech2_model(t, q) - v;
      s += r * r;
    }
    return s;
  };

  double lambda = 1e-3;
  double chi2 = sum_sq(p);
  bool converged = false;
  for (int it = 0; it < max_iterations; ++it) {
    Eigen::Matrix4d jtj = Eigen::Matrix4d::Zero();
    Eigen::Vector4d jtr = Eigen::Vector4d::Zero();
    for (const auto& [t, v] : series) {
      const double u = (t - p[2]) / p[1];
      const double s = detail::sech(u);
      const double s2 = s * s;
      const double dsech2 = -2.0 * s2 * std::tanh(u);
      Eigen::Vector4d jac;
      jac[0] = s2;
      jac[1] = p[0] * dsech2 * (-u / p[1]);
      jac[2] = p[0] * dsech2 * (-1.0 / p[1]);
      jac[3] = 1.0;
      const double r = p[0] * s2 + p[3] - v;
      jtj += jac * jac.transpose();
      jtr += jac * r;
    }
    Eigen::Matrix4d damped = jtj;
    damped.diagonal() += lambda * jtj.diagonal();
    const Eigen::Vector4d step = damped.ldlt().solve(-jtr);
    Eigen::Vector4d trial = p + step;
    if (trial[1] <= 0.0) trial[1] = 0.5 * p[1];
    const double trial_chi2 = sum_sq(trial);
    if (trial_chi2 < chi2) {
      const double rel_drop = (chi2 - trial_chi2) / std::max(chi2, 1e-300);
      p = trial;
      chi2 = trial_chi2;
      lambda = std::max(lambda * 0.3, 1e-12);
      if (rel_drop < 1e-14 || step.norm() < 1e-13 * (1.0 + p.norm())) {
        converged = true;
        break;
      }
    } else {
      lambda *= 10.0;
      if (lambda > 1e12) break;
    }
  }

  Sech2Fit fit;
  fit.amplitude = p[0];
  fit.width = p[1];
  fit.center = p[2];
  fit.offset = p[3];
  fit.rms_residual = std::sqrt(chi2 / m);
  fit.converged = converged;
  return fit;
}

} // namespace solwave
