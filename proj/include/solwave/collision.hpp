#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "solwave/errors.hpp"

namespace solwave {

// Perturbative two-soliton interaction parameters. Index l in {0,1};
// T0/T1 are the temporal widths, group_offset the inverse-group-velocity
// offsets sigma_l, eps_D the per-soliton dispersion products eps*D_l.
struct CollisionParams {
  std::array<double, 2> beta_abs{1.0, 1.0};
  std::array<double, 2> gamma{1.0, 1.0};
  double T0 = 1.0;
  double T1 = 1.0;
  std::array<double, 2> group_offset{0.0, 0.0};
  std::array<double, 2> eps_D{1.0, 1.0};

  void check() const {
    if (!(T0 > 0.0) || !(T1 > 0.0)) throw config_error("soliton widths must be positive");
    for (int l = 0; l < 2; ++l)
      if (beta_abs[l] < 0.0 || gamma[l] < 0.0)
        throw config_error("beta and gamma must be nonnegative");
  }

  double width_scale() const { return std::sqrt(T0 * T0 + T1 * T1); }
};

struct CollisionState {
  std::array<double, 2> omega{0.0, 0.0};
  std::array<double, 2> t{0.0, 0.0};
  double z = 0.0;
};

// Right-hand side of the frequency-shift law with the Gaussian argument read
// as the inter-soliton separation t_l - t_{1-l}:
//   domega_l/dz = 4|beta_l| gamma_l (t_l - t_{1-l})
//                 / (T_{1-l} (T0^2+T1^2)^{3/2}) * exp(-(t_l-t_{1-l})^2 / (2(T0^2+T1^2)))
// closed by dt_l/dz = sigma_l - eps D_l omega_l, which reproduces the
// position-shift growth law delta_t = -delta_omega * eps D * z for frozen omega.
inline CollisionState collision_rhs(const CollisionState& s, const CollisionParams& p) {
  const double s2 = p.T0 * p.T0 + p.T1 * p.T1;
  const std::array<double, 2> other_width{p.T1, p.T0};
  CollisionState d;
  d.z = 1.0;
  for (int l = 0; l < 2; ++l) {
    const double sep = s.t[l] - s.t[1 - l];
    const double gaussian = std::exp(-sep * sep / (2.0 * s2));
    d.omega[l] =
        4.0 * p.beta_abs[l] * p.gamma[l] * sep * gaussian / (other_width[l] * s2 * std::sqrt(s2));
    d.t[l] = p.group_offset[l] - p.eps_D[l] * s.omega[l];
  }
  return d;
}

struct CollisionOutcome {
  std::array<double, 2> net_domega{0.0, 0.0};
  std::array<double, 2> net_dt{0.0, 0.0}; // versus the no-interaction trajectory
  std::array<double, 2> peak_abs_omega{0.0, 0.0};
  bool complete = false; // solitons separated again before z_end
  double z_final = 0.0;
  std::vector<CollisionState> trajectory;
};

// Adaptive dopri5 drive of collision_rhs at tolerances 1e-10 (rel) / 1e-12
// (abs) from an arbitrary initial state. Stops early once |t0 - t1| exceeds
// stop_separation (pass +inf to disable). Net shifts are measured against the
// no-interaction trajectory t_free = t(0) + (sigma - eps D omega(0)) z.
inline CollisionOutcome integrate_collision(const CollisionParams& p, const CollisionState& initial,
                                            double z_end,
                                            double stop_separation = std::numeric_limits<double>::infinity()) {
  p.check();
  if (!(z_end > 0.0)) throw config_error("z_end must be positive");

  using state_type = std::array<double, 4>; // omega0, omega1, t0, t1
  namespace ode = boost::numeric::odeint;

  auto system = [&p](const state_type& y, state_type& dydz, double /*z*/) {
    CollisionState s;
    s.omega = {y[0], y[1]};
    s.t = {y[2], y[3]};
    const CollisionState d = collision_rhs(s, p);
    dydz = {d.omega[0], d.omega[1], d.t[0], d.t[1]};
  };

  CollisionOutcome out;
  state_type y{initial.omega[0], initial.omega[1], initial.t[0], initial.t[1]};
  const state_type y0 = y;

  auto stepper = ode::make_controlled<ode::runge_kutta_dopri5<state_type>>(1e-12, 1e-10);

  double z = 0.0;
  double dz = std::min(1e-3, z_end);
  out.trajectory.push_back({{y[0], y[1]}, {y[2], y[3]}, z});

  const int max_attempts = 20'000'000;
  int attempts = 0;
  bool stopped = false;
  while (z < z_end && attempts < max_attempts) {
    if (z + dz > z_end) dz = z_end - z;
    if (dz < 1e-14 * std::max(1.0, z_end)) break; // final-step round-off
    if (stepper.try_step(system, y, z, dz) == ode::success) {
      out.trajectory.push_back({{y[0], y[1]}, {y[2], y[3]}, z});
      for (int l = 0; l < 2; ++l)
        out.peak_abs_omega[l] = std::max(out.peak_abs_omega[l], std::abs(y[l]));
      if (std::abs(y[2] - y[3]) > stop_separation) {
        stopped = true;
        break;
      }
    }
    ++attempts;
  }
  if (attempts >= max_attempts) throw numerics_error("collision integration exceeded the step budget");

  out.z_final = z;
  out.complete = stopped;
  for (int l = 0; l < 2; ++l) {
    out.net_domega[l] = y[l] - y0[l];
    const double free_velocity = p.group_offset[l] - p.eps_D[l] * y0[l];
    out.net_dt[l] = y[2 + l] - (y0[2 + l] + free_velocity * z);
  }
  return out;
}

// Collision run from a well-separated start: soliton 0 trails soliton 1 by
// `initial_separation` with zero frequency shifts. The run counts as complete
// once the separation exceeds its starting value by ten width scales.
inline CollisionOutcome simulate_collision(const CollisionParams& p, double initial_separation,
                                           double z_end) {
  CollisionState initial;
  initial.t = {-std::abs(initial_separation), 0.0};
  const double stop = std::abs(initial_separation) + 10.0 * p.width_scale();
  CollisionOutcome out = integrate_collision(p, initial, z_end, stop);
  if (!out.complete) {
    const auto& last = out.trajectory.back();
    // Passed each other but not yet beyond the stop radius by z_end: still a
    // through-collision, just report it at z_end.
    out.complete = std::abs(last.t[0] - last.t[1]) > std::abs(initial_separation);
  }
  return out;
}

struct CrosstalkRow {
  std::string label;
  std::array<double, 2> abs_dt{0.0, 0.0};
  std::array<double, 2> abs_domega{0.0, 0.0};
  bool complete = false;
};

struct CrosstalkRatio {
  std::string label_a;
  std::string label_b;
  std::array<double, 2> dt_ratio{0.0, 0.0}; // |dt_a| / |dt_b| per soliton
};

struct CrosstalkReport {
  std::vector<CrosstalkRow> rows;
  std::vector<CrosstalkRatio> ratios; // all unordered pairs, row order
};

inline CrosstalkReport crosstalk_report(
    const std::vector<std::pair<std::string, CollisionOutcome>>& runs) {
  if (runs.empty()) throw config_error("crosstalk report needs at least one run");
  CrosstalkReport report;
  for (const auto& [label, run] : runs) {
    CrosstalkRow row;
    row.label = label;
    for (int l = 0; l < 2; ++l) {
      row.abs_dt[l] = std::abs(run.net_dt[l]);
      row.abs_domega[l] = std::abs(run.net_domega[l]);
    }
    row.complete = run.complete;
    report.rows.push_back(row);
  }
  for (std::size_t a = 0; a < runs.size(); ++a)
    for (std::size_t b = a + 1; b < runs.size(); ++b) {
      CrosstalkRatio r;
      r.label_a = runs[a].first;
      r.label_b = runs[b].first;
      for (int l = 0; l < 2; ++l) {
        const double denom = report.rows[b].abs_dt[l];
        r.dt_ratio[l] = denom > 0.0 ? report.rows[a].abs_dt[l] / denom
                                    : std::numeric_limits<double>::quiet_NaN();
      }
      report.ratios.push_back(r);
    }
  return report;
}

} // namespace solwave
