#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "solwave/errors.hpp"
#include "solwave/field.hpp"
#include "solwave/spectral.hpp"

namespace solwave {

// Traveling-wave solution u(x,t) = -3c sech^2(sqrt(c) (x - c t - center)/2)
// of u_t = -u_xxx + u u_x. Speed and depth are both set by c.
struct KdvSolitonSpec {
  double c = 1.0;
  double center = 0.0;
};

inline RealField kdv_soliton_profile(const KdvSolitonSpec& spec, double t, const Grid1D& grid) {
  if (!(spec.c > 0.0)) throw config_error("soliton speed parameter c must be positive");
  const double peak_x = spec.center + spec.c * t;
  ArrayXd u(grid.n);
  for (int i = 0; i < grid.n; ++i) {
    const double s = 1.0 / std::cosh(0.5 * std::sqrt(spec.c) * (grid.x(i) - peak_x));
    u[i] = -3.0 * spec.c * s * s;
  }
  // The formula is not periodic; it is only usable when the tails have died
  // off inside the domain.
  const double edge = std::max(std::abs(u[0]), std::abs(u[grid.n - 1]));
  if (edge > 1e-12 * 3.0 * spec.c)
    throw config_error("soliton tails exceed 1e-12 of the peak at the domain edge; "
                       "enlarge the domain or recenter");
  return RealField{grid, std::move(u)};
}

struct KdvRunConfig {
  Grid1D grid;
  double dt = 1e-3;
  double t_end = 1.0;
  bool dealias = true;
  int snapshot_stride = 100; // steps between stored snapshots

  // Step bound dt <= kStability * dx^3 checked at construction. The
  // third-order dispersion is integrated exactly (integrating factor), so the
  // bound is set by accuracy of the explicit nonlinear stage, not by the
  // classical explicit-scheme limit.
  static constexpr double kStability = 10.0;
};

inline KdvRunConfig make_kdv_config(const Grid1D& grid, double dt, double t_end, bool dealias = true,
                                    int snapshot_stride = 100) {
  if (!(dt > 0.0)) throw config_error("time step must be positive");
  if (!(t_end > 0.0)) throw config_error("t_end must be positive");
  const double bound = KdvRunConfig::kStability * grid.dx * grid.dx * grid.dx;
  if (dt > bound)
    throw config_error("time step " + std::to_string(dt) + " exceeds the stability bound " +
                       std::to_string(bound) + " (" + std::to_string(KdvRunConfig::kStability) +
                       " * dx^3)");
  if (snapshot_stride < 1) throw config_error("snapshot stride must be >= 1");
  return KdvRunConfig{grid, dt, t_end, dealias, snapshot_stride};
}

struct KdvSnapshot {
  double t = 0.0;
  RealField field;
  double mass = 0.0;
  double momentum = 0.0;
  double peak_value = 0.0; // deepest extremum, parabola-refined
  double peak_x = 0.0;
};

struct KdvTrajectory {
  std::vector<KdvSnapshot> snapshots;

  const KdvSnapshot& front() const { return snapshots.front(); }
  const KdvSnapshot& back() const { return snapshots.back(); }

  double mass_drift() const {
    double lo = snapshots.front().mass, hi = lo;
    for (auto& s : snapshots) {
      lo = std::min(lo, s.mass);
      hi = std::max(hi, s.mass);
    }
    const double scale = std::max(std::abs(snapshots.front().mass), 1.0);
    return (hi - lo) / scale;
  }

  double momentum_drift() const {
    double lo = snapshots.front().momentum, hi = lo;
    for (auto& s : snapshots) {
      lo = std::min(lo, s.momentum);
      hi = std::max(hi, s.momentum);
    }
    const double scale = std::max(std::abs(snapshots.front().momentum), 1.0);
    return (hi - lo) / scale;
  }
};

namespace detail {

// Parabola through three equally spaced samples around an extremum index.
inline void refine_extremum(const RealField& f, int i, double& x_out, double& v_out) {
  const int n = f.grid.n;
  const double ym = f.samples[(i - 1 + n) % n];
  const double y0 = f.samples[i];
  const double yp = f.samples[(i + 1) % n];
  const double denom = ym - 2.0 * y0 + yp;
  double delta = 0.0;
  if (std::abs(denom) > 1e-300) delta = 0.5 * (ym - yp) / denom;
  delta = std::clamp(delta, -0.5, 0.5);
  x_out = f.grid.x(i) + delta * f.grid.dx;
  v_out = y0 - 0.25 * (ym - yp) * delta;
}

inline KdvSnapshot kdv_snapshot(double t, RealField field) {
  KdvSnapshot s;
  s.t = t;
  s.mass = integrate_quantity(field, IntegralKind::mass);
  s.momentum = integrate_quantity(field, IntegralKind::momentum);
  int imin = 0;
  for (int i = 1; i < field.grid.n; ++i)
    if (field.samples[i] < field.samples[imin]) imin = i;
  refine_extremum(field, imin, s.peak_x, s.peak_value);
  s.field = std::move(field);
  return s;
}

} // namespace detail

// Pseudospectral evolution of u_t = -u_xxx + u u_x: the dispersive factor
// exp(i k^3 dt) is applied exactly in Fourier space, RK4 handles the quadratic
// term, and the 2/3 rule dealiases the product.
inline KdvTrajectory kdv_propagate(const RealField& u0, const KdvRunConfig& cfg) {
  if (!u0.grid.same_as(cfg.grid)) throw config_error("initial field is not on the run grid");
  const int n = cfg.grid.n;
  const ArrayXd k = wavenumbers(cfg.grid);
  const complexd i_unit(0.0, 1.0);

  ArrayXcd half_factor(n), full_factor(n), nonlinear_gain(n);
  for (int j = 0; j < n; ++j) {
    const complexd lk = i_unit * std::pow(k[j], 3); // -u_xxx in Fourier space
    half_factor[j] = std::exp(lk * (0.5 * cfg.dt));
    full_factor[j] = std::exp(lk * cfg.dt);
    nonlinear_gain[j] = 0.5 * i_unit * k[j] * cfg.dt; // dt * F[u u_x] = dt * ik/2 F[u^2]
    if (cfg.dealias && std::abs(k[j]) > (2.0 / 3.0) * std::abs(k[n / 2])) nonlinear_gain[j] = 0.0;
    if (j == n / 2) nonlinear_gain[j] = 0.0;
  }

  Fft fft;
  auto nonlinear = [&](const ArrayXcd& spec) -> ArrayXcd {
    const ArrayXd u = fft.inverse(spec).real();
    return nonlinear_gain * fft.forward((u * u).cast<complexd>());
  };

  const double step_ratio = cfg.t_end / cfg.dt;
  long total_steps = std::llround(step_ratio);
  if (std::abs(step_ratio - double(total_steps)) > 1e-9 * std::max(1.0, step_ratio))
    total_steps = static_cast<long>(std::ceil(step_ratio));
  KdvTrajectory traj;
  traj.snapshots.push_back(detail::kdv_snapshot(0.0, u0));

  ArrayXcd v = fft.forward(u0.samples.cast<complexd>());
  for (long step = 1; step <= total_steps; ++step) {
    const ArrayXcd a = nonlinear(v);
    const ArrayXcd b = nonlinear(half_factor * (v + 0.5 * a));
    const ArrayXcd c = nonlinear(half_factor * v + 0.5 * b);
    const ArrayXcd d = nonlinear(full_factor * v + half_factor * c);
    v = full_factor * v + (full_factor * a + 2.0 * half_factor * (b + c) + d) / 6.0;

    const bool at_end = step == total_steps;
    if (step % cfg.snapshot_stride == 0 || at_end) {
      ArrayXd u = fft.inverse(v).real();
      if (!u.allFinite())
        throw numerics_error("KdV run became non-finite at step " + std::to_string(step) +
                             " (t = " + std::to_string(step * cfg.dt) + ")");
      traj.snapshots.push_back(detail::kdv_snapshot(step * cfg.dt, RealField{cfg.grid, std::move(u)}));
    }
  }
  return traj;
}

// General form u_t = a u_xxx + b u u_x, both coefficients nonzero.
struct KdvCoefficients {
  double a = -1.0;
  double b = 1.0;
};

// Substitution (x, t, u) = (alpha x~, tau t~, mu u~) carrying the general
// equation onto the canonical u~_t = -u~_xxx + u~ u~_x. alpha is +-1: a > 0
// needs a spatial reflection.
struct KdvNormalization {
  double alpha = 1.0;
  double tau = 1.0;
  double mu = 1.0;
};

inline KdvNormalization kdv_normalize(const KdvCoefficients& c) {
  if (c.a == 0.0 || c.b == 0.0)
    throw config_error("KdV coefficients a and b must both be nonzero");
  KdvNormalization n;
  n.alpha = c.a < 0.0 ? 1.0 : -1.0;
  n.tau = 1.0 / std::abs(c.a);
  n.mu = n.alpha * std::abs(c.a) / c.b;
  return n;
}

// Evolution under u_t = a u_xxx + b u u_x: normalize, run the canonical
// solver, map the trajectory back. Reflected cases (a > 0) require a grid
// symmetric about zero so that x -> -x lands on samples.
inline KdvTrajectory kdv_propagate(const RealField& u0, const KdvCoefficients& coeffs,
                                   const KdvRunConfig& cfg) {
  const KdvNormalization n = kdv_normalize(coeffs);
  if (n.alpha == 1.0 && n.tau == 1.0 && n.mu == 1.0) return kdv_propagate(u0, cfg);
  if (!u0.grid.same_as(cfg.grid)) throw config_error("initial field is not on the run grid");

  const int nn = cfg.grid.n;
  const bool reflect = n.alpha < 0.0;
  if (reflect && std::abs(cfg.grid.x0 + 0.5 * cfg.grid.length()) > 1e-12 * cfg.grid.length())
    throw config_error("a > 0 needs a grid symmetric about zero (x0 = -length/2)");
  auto reflected = [nn](const ArrayXd& s) {
    ArrayXd r(nn);
    for (int i = 0; i < nn; ++i) r[i] = s[(nn - i) % nn];
    return r;
  };

  ArrayXd v0 = u0.samples / n.mu;
  if (reflect) v0 = reflected(v0);
  const KdvRunConfig inner = make_kdv_config(cfg.grid, cfg.dt / n.tau, cfg.t_end / n.tau,
                                             cfg.dealias, cfg.snapshot_stride);
  const KdvTrajectory canonical = kdv_propagate(RealField{cfg.grid, std::move(v0)}, inner);

  KdvTrajectory out;
  out.snapshots.reserve(canonical.snapshots.size());
  for (const auto& s : canonical.snapshots) {
    ArrayXd u = s.field.samples * n.mu;
    if (reflect) u = reflected(u);
    out.snapshots.push_back(detail::kdv_snapshot(s.t * n.tau, RealField{cfg.grid, std::move(u)}));
  }
  return out;
}

struct KdvPulse {
  double amplitude = 0.0; // refined extremum value (negative)
  double position = 0.0;
  double speed = 0.0; // |amplitude| / 3 for the exact soliton shape
};

namespace detail {

// Local minima deeper than a quarter of the global one, parabola-refined,
// sorted by position.
inline std::vector<KdvPulse> find_pulses(const RealField& f) {
  const int n = f.grid.n;
  double global_min = f.samples.minCoeff();
  std::vector<KdvPulse> pulses;
  if (global_min >= 0.0) return pulses;
  const double threshold = 0.25 * global_min;
  for (int i = 0; i < n; ++i) {
    const double ym = f.samples[(i - 1 + n) % n];
    const double y0 = f.samples[i];
    const double yp = f.samples[(i + 1) % n];
    if (y0 < threshold && y0 <= ym && y0 < yp) {
      KdvPulse p;
      refine_extremum(f, i, p.position, p.amplitude);
      p.speed = -p.amplitude / 3.0;
      pulses.push_back(p);
    }
  }
  std::sort(pulses.begin(), pulses.end(),
            [](const KdvPulse& a, const KdvPulse& b) { return a.position < b.position; });
  return pulses;
}

inline double wrap_to_half(double d, double L) {
  while (d > 0.5 * L) d -= L;
  while (d <= -0.5 * L) d += L;
  return d;
}

} // namespace detail

struct KdvPulseReport {
  double amplitude_before = 0.0;
  double amplitude_after = 0.0;
  double phase_shift = 0.0; // post-collision center offset vs free propagation
};

struct KdvCollisionReport {
  std::vector<KdvPulseReport> pulses; // index 0 = slower, 1 = faster
  bool ordering_swapped = false;
};

// Diagnoses a completed overtaking event: per-pulse amplitudes before/after
// and the center offsets relative to undisturbed traveling-wave motion.
inline KdvCollisionReport kdv_collision_report(const KdvTrajectory& traj) {
  if (traj.snapshots.size() < 2) throw config_error("trajectory has fewer than two snapshots");
  const auto& first = traj.front();
  const auto& last = traj.back();
  const double L = first.field.grid.length();

  const auto initial = detail::find_pulses(first.field);
  KdvCollisionReport report;
  if (initial.size() < 2) return report; // single pulse: nothing to collide

  if (initial.size() > 2) throw config_error("collision diagnostics support exactly two pulses");
  const KdvPulse slow0 = initial[0].speed <= initial[1].speed ? initial[0] : initial[1];
  const KdvPulse fast0 = initial[0].speed <= initial[1].speed ? initial[1] : initial[0];

  if (std::abs(fast0.speed - slow0.speed) < 0.01 * fast0.speed)
    throw config_error("interacting solitons must have different heights and speeds");

  const auto final_pulses = detail::find_pulses(last.field);
  if (final_pulses.size() != 2)
    throw incomplete_collision_error("pulses are not separated in the final snapshot");

  // The deeper pulse keeps its identity through an elastic interaction.
  const KdvPulse slow1 =
      final_pulses[0].speed <= final_pulses[1].speed ? final_pulses[0] : final_pulses[1];
  const KdvPulse fast1 =
      final_pulses[0].speed <= final_pulses[1].speed ? final_pulses[1] : final_pulses[0];

  // Separation must be several pulse widths for the asymptotic readout.
  const double width_scale =
      2.0 / std::sqrt(slow1.speed > 0 ? slow1.speed : 1.0) + 2.0 / std::sqrt(fast1.speed > 0 ? fast1.speed : 1.0);
  if (std::abs(detail::wrap_to_half(fast1.position - slow1.position, L)) < 2.0 * width_scale)
    throw incomplete_collision_error("pulses have not separated beyond the interaction range");

  const double t_end = last.t - first.t;
  auto shift_vs_free = [&](const KdvPulse& before, const KdvPulse& after) {
    const double expected = before.position + before.speed * t_end;
    return detail::wrap_to_half(after.position - expected, L);
  };

  KdvPulseReport slow_report{slow0.amplitude, slow1.amplitude, shift_vs_free(slow0, slow1)};
  KdvPulseReport fast_report{fast0.amplitude, fast1.amplitude, shift_vs_free(fast0, fast1)};
  report.pulses = {slow_report, fast_report};

  const double d0 = detail::wrap_to_half(fast0.position - slow0.position, L);
  const double d1 = detail::wrap_to_half(fast1.position - slow1.position, L);
  report.ordering_swapped = (d0 < 0.0) != (d1 < 0.0);
  return report;
}

} // namespace solwave
