#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "solwave/errors.hpp"
#include "solwave/field.hpp"
#include "solwave/spectral.hpp"

namespace solwave {

// i q_z + (beta2/2) q_TT + nu |q|^2 q = 0. In this sign convention beta2 < 0
// is the defocusing regime, so bright solitons need beta2 > 0 — opposite to
// the usual fiber-optics convention.
//
// beta2_schedule, when nonempty, replaces the constant beta2 with a
// piecewise-constant dispersion map: each (z_up_to, beta2) segment applies
// until the given distance (dispersion-managed links). Segment boundaries
// must be ascending and cover z_end.
struct NlsParams {
  double beta2 = 1.0;
  double nu = 1.0;
  double dz = 1e-3;
  double z_end = 1.0;
  std::vector<std::pair<double, double>> beta2_schedule;

  void check() const {
    if (!(dz > 0.0)) throw config_error("z step must be positive");
    if (z_end < 0.0) throw config_error("z_end must be nonnegative");
    double previous = 0.0;
    for (const auto& [z_up_to, b2] : beta2_schedule) {
      if (z_up_to <= previous)
        throw config_error("beta2 schedule boundaries must be strictly ascending");
      previous = z_up_to;
    }
    if (!beta2_schedule.empty() && previous < z_end - 1e-12)
      throw config_error("beta2 schedule must cover z_end");
  }

  double beta2_at(double z) const {
    for (const auto& [z_up_to, b2] : beta2_schedule)
      if (z < z_up_to) return b2;
    return beta2_schedule.empty() ? beta2 : beta2_schedule.back().second;
  }
};

// Gaussian spectral multiplier gain * exp(-(k - center)^2 / (2 bandwidth^2)),
// applied every `span` of propagation.
struct GuidingFilter {
  double center_freq = 0.0;
  double bandwidth = 1.0;
  double gain = 1.0;
  double span = 1.0;

  void check() const {
    if (!(bandwidth > 0.0)) throw config_error("filter bandwidth must be positive");
    if (!(span > 0.0)) throw config_error("filter span must be positive");
    if (gain < 1.0) throw config_error("filter gain must be >= 1");
  }
};

struct NlsSnapshot {
  double z = 0.0;
  ComplexEnvelope field;
  double power = 0.0;
};

struct NlsTrajectory {
  std::vector<NlsSnapshot> snapshots;

  const NlsSnapshot& front() const { return snapshots.front(); }
  const NlsSnapshot& back() const { return snapshots.back(); }

  double power_drift() const {
    double lo = snapshots.front().power, hi = lo;
    for (auto& s : snapshots) {
      lo = std::min(lo, s.power);
      hi = std::max(hi, s.power);
    }
    return (hi - lo) / std::max(std::abs(snapshots.front().power), 1e-300);
  }
};

namespace detail {

// Linear multiplier over step h for a channel at carrier offset omega:
// exp(-i (beta2/2 k^2 + beta2 omega k) h). The omega term is the
// carrier-induced group delay of the envelope.
inline ArrayXcd linear_step_factor(const Grid1D& g, double beta2, double omega, double h) {
  const ArrayXd k = wavenumbers(g);
  ArrayXcd f(g.n);
  for (int j = 0; j < g.n; ++j) {
    const double phase = -(0.5 * beta2 * k[j] * k[j] + beta2 * omega * k[j]) * h;
    f[j] = std::polar(1.0, phase);
  }
  return f;
}

inline ArrayXcd filter_multiplier(const Grid1D& g, const GuidingFilter& filt) {
  const ArrayXd k = wavenumbers(g);
  ArrayXcd f(g.n);
  for (int j = 0; j < g.n; ++j) {
    const double d = k[j] - filt.center_freq;
    f[j] = filt.gain * std::exp(-d * d / (2.0 * filt.bandwidth * filt.bandwidth));
  }
  return f;
}

} // namespace detail

// Symmetric split-step propagation. Both substeps are modulus-preserving, so
// power is conserved to round-off in the unfiltered case. The filter, when
// present, is applied between whole steps every `span`.
inline NlsTrajectory nls_propagate(const ComplexEnvelope& q0, const NlsParams& p,
                                   const std::optional<GuidingFilter>& filter = std::nullopt,
                                   int snapshot_stride = 100) {
  p.check();
  if (snapshot_stride < 1) throw config_error("snapshot stride must be >= 1");

  long filter_every = 0;
  if (filter) {
    filter->check();
    const double ratio = filter->span / p.dz;
    filter_every = std::llround(ratio);
    if (filter_every < 1 || std::abs(ratio - double(filter_every)) > 1e-9 * std::max(1.0, ratio))
      throw config_error("filter span must be a positive integer multiple of dz");
  }

  const Grid1D& g = q0.grid;
  double current_beta2 = p.beta2_at(0.5 * p.dz);
  ArrayXcd half = detail::linear_step_factor(g, current_beta2, q0.carrier_offset, 0.5 * p.dz);
  const ArrayXcd filt = filter ? detail::filter_multiplier(g, *filter) : ArrayXcd();

  Fft fft;
  const long total = detail::steps_for(p.z_end, p.dz);

  NlsTrajectory traj;
  traj.snapshots.push_back({0.0, q0, integrate_quantity(q0, IntegralKind::power)});

  ArrayXcd q = q0.samples;
  for (long step = 1; step <= total; ++step) {
    if (!p.beta2_schedule.empty()) {
      const double b2 = p.beta2_at((double(step) - 0.5) * p.dz);
      if (b2 != current_beta2) {
        current_beta2 = b2;
        half = detail::linear_step_factor(g, current_beta2, q0.carrier_offset, 0.5 * p.dz);
      }
    }
    q = fft.inverse(half * fft.forward(q));
    for (int i = 0; i < g.n; ++i)
      q[i] *= std::polar(1.0, p.nu * std::norm(q[i]) * p.dz);
    q = fft.inverse(half * fft.forward(q));
    if (filter_every > 0 && step % filter_every == 0) q = fft.inverse(filt * fft.forward(q));

    const bool at_end = step == total;
    if (step % snapshot_stride == 0 || at_end) {
      if (!q.allFinite())
        throw numerics_error("NLS run became non-finite at step " + std::to_string(step) +
                             " (z = " + std::to_string(step * p.dz) + ")");
      ComplexEnvelope snap{g, q, q0.carrier_offset};
      const double power = integrate_quantity(snap, IntegralKind::power);
      traj.snapshots.push_back({step * p.dz, std::move(snap), power});
    }
  }
  return traj;
}

// NRZ bit pattern: plateaus of height rho0 over runs of 1-bits with tanh
// ramps of scale `rise` at the edges, plus optional bit-synchronous phase
// modulation (triangle wave of period bit_width and slope +-phase_mod_slope).
inline ComplexEnvelope encode_nrz(const std::string& bits, double rho0, double bit_width,
                                  double rise, const Grid1D& grid, double phase_mod_slope = 0.0) {
  if (bits.empty()) throw config_error("bit string must be nonempty");
  for (char b : bits)
    if (b != '0' && b != '1') throw config_error("bit string may contain only 0 and 1");
  if (!(bit_width > 0.0) || !(rise > 0.0))
    throw config_error("bit width and rise must be positive");

  const double total = bits.size() * bit_width;
  const double guard = std::max(8.0 * rise, 0.05 * grid.length());
  if (total + 2.0 * guard > grid.length())
    throw config_error("encoded signal does not fit in the grid with guard bands");

  const double start = grid.x0 + 0.5 * (grid.length() - total);

  // Maximal runs of 1-bits as [edge_on, edge_off) intervals.
  std::vector<std::pair<double, double>> runs;
  for (std::size_t i = 0; i < bits.size();) {
    if (bits[i] == '1') {
      std::size_t j = i;
      while (j < bits.size() && bits[j] == '1') ++j;
      runs.emplace_back(start + i * bit_width, start + j * bit_width);
      i = j;
    } else {
      ++i;
    }
  }

  ArrayXcd q(grid.n);
  for (int i = 0; i < grid.n; ++i) {
    const double t = grid.x(i);
    double amp = 0.0;
    for (auto& [a, b] : runs)
      amp += 0.5 * (std::tanh((t - a) / rise) - std::tanh((t - b) / rise));
    double phase = 0.0;
    if (phase_mod_slope != 0.0) {
      // Zero-mean triangle of period bit_width; the phase gradient
      // alternates between +-phase_mod_slope every half bit.
      double frac = (t - start) / bit_width;
      frac -= std::floor(frac);
      const double tri = (frac < 0.5 ? frac : 1.0 - frac) - 0.25;
      phase = phase_mod_slope * bit_width * tri;
    }
    q[i] = std::polar(rho0 * amp, phase);
  }
  return ComplexEnvelope{grid, std::move(q), 0.0};
}

inline int count_plateaus(const ComplexEnvelope& q, double rho0) {
  int count = 0;
  bool high = false;
  for (int i = 0; i < q.grid.n; ++i) {
    const bool above = std::abs(q.samples[i]) > 0.5 * rho0;
    if (above && !high) ++count;
    high = above;
  }
  return count;
}

// Chirp diagnostic u = d(sigma)/dT with sigma = beta * Arg(q). Centered
// differences of the phase, each wrapped into (-pi, pi], unwrap the phase
// along T; the result is unreliable near zeros of q, where the phase has
// branch cuts (the modulus is reported alongside so callers can mask).
inline RealField chirp_profile(const ComplexEnvelope& q, double beta) {
  const int n = q.grid.n;
  ArrayXd u(n);
  auto wrap_to_pi = [](double a) {
    while (a > pi) a -= 2.0 * pi;
    while (a <= -pi) a += 2.0 * pi;
    return a;
  };
  for (int i = 0; i < n; ++i) {
    const complexd prev = q.samples[(i - 1 + n) % n];
    const complexd next = q.samples[(i + 1) % n];
    const double dphase = wrap_to_pi(std::arg(next) - std::arg(prev));
    u[i] = beta * dphase / (2.0 * q.grid.dx);
  }
  return RealField{q.grid, std::move(u)};
}

struct SteepeningMetric {
  std::vector<double> z;
  std::vector<double> max_gradient; // max |d|q|/dT| per snapshot
  double z_at_max = 0.0;
  double growth_factor = 0.0; // peak gradient over the initial one
};

// Shock diagnostic: the temporal gradient of the modulus, evaluated
// spectrally, tracked along the run.
inline SteepeningMetric steepening_metric(const NlsTrajectory& traj) {
  SteepeningMetric m;
  double best = -1.0;
  for (const auto& s : traj.snapshots) {
    RealField mod{s.field.grid, s.field.samples.abs()};
    const RealField grad = spectral_derivative(mod, 1);
    const double g = grad.samples.abs().maxCoeff();
    m.z.push_back(s.z);
    m.max_gradient.push_back(g);
    if (g > best) {
      best = g;
      m.z_at_max = s.z;
    }
  }
  if (!m.max_gradient.empty() && m.max_gradient.front() > 0.0)
    m.growth_factor = best / m.max_gradient.front();
  return m;
}

} // namespace solwave
