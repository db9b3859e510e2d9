#pragma once

#include <cmath>
#include <complex>
#include <string>

#include <Eigen/Dense>

#include "solwave/errors.hpp"

namespace solwave {

using Eigen::ArrayXcd;
using Eigen::ArrayXd;
using complexd = std::complex<double>;

inline constexpr double pi = 3.141592653589793238462643383279502884;

inline bool is_power_of_two(long n) { return n > 0 && (n & (n - 1)) == 0; }

// Uniform periodic 1-D sample lattice shared by every solver in the toolkit.
// The domain is [x0, x0 + n*dx); the sample at index i sits at x0 + i*dx.
struct Grid1D {
  int n = 0;
  double dx = 0.0;
  double x0 = 0.0;
  bool periodic = true;

  double length() const { return n * dx; }
  double x(int i) const { return x0 + i * dx; }

  ArrayXd coords() const {
    ArrayXd xs(n);
    for (int i = 0; i < n; ++i) xs[i] = x(i);
    return xs;
  }

  bool same_as(const Grid1D& o) const { return n == o.n && dx == o.dx && x0 == o.x0; }
};

inline Grid1D make_grid(int n, double length, double x0) {
  if (!is_power_of_two(n) || n < 8)
    throw config_error("grid sample count must be a power of two >= 8, got " + std::to_string(n));
  if (!(length > 0.0))
    throw config_error("grid length must be positive, got " + std::to_string(length));
  return Grid1D{n, length / n, x0, true};
}

// Sampled real wave amplitude u(x) on a Grid1D.
struct RealField {
  Grid1D grid;
  ArrayXd samples;
};

// Sampled complex field envelope q(T) on a Grid1D. carrier_offset is the
// angular-frequency offset of this channel's carrier relative to the reference.
struct ComplexEnvelope {
  Grid1D grid;
  ArrayXcd samples;
  double carrier_offset = 0.0;
};

inline RealField make_real_field(const Grid1D& grid, ArrayXd samples) {
  if (samples.size() != grid.n)
    throw config_error("field sample count does not match grid");
  if (!samples.allFinite())
    throw validation_error("field contains non-finite samples");
  return RealField{grid, std::move(samples)};
}

inline ComplexEnvelope make_envelope(const Grid1D& grid, ArrayXcd samples, double carrier_offset = 0.0) {
  if (samples.size() != grid.n)
    throw config_error("envelope sample count does not match grid");
  if (!samples.allFinite())
    throw validation_error("envelope contains non-finite samples");
  return ComplexEnvelope{grid, std::move(samples), carrier_offset};
}

// Chirped odd-Gaussian pulse A*(t-c)*exp(-(t-c)^2/W^2 + i b (t-c)^2 + i phi).
// Its energy in the channel-energy normalization is A^2 W^3 / 4.
struct PulseSpec {
  double amplitude = 1.0;
  double width = 1.0;
  double chirp = 0.0;
  double phase = 0.0;
  double center = 0.0;
};

inline ComplexEnvelope make_pulse(const PulseSpec& spec, const Grid1D& grid) {
  if (!(spec.width > 0.0))
    throw config_error("pulse width must be positive");
  ArrayXcd q(grid.n);
  const complexd phase_unit(0.0, 1.0);
  for (int i = 0; i < grid.n; ++i) {
    const double t = grid.x(i) - spec.center;
    q[i] = spec.amplitude * t *
           std::exp(complexd(-t * t / (spec.width * spec.width), spec.chirp * t * t + spec.phase));
  }
  return ComplexEnvelope{grid, std::move(q), 0.0};
}

enum class IntegralKind { mass, momentum, power };

// Rectangle-rule quadrature on the periodic grid (spectrally accurate for
// smooth periodic data): mass = integral of u, momentum = integral of u^2.
inline double integrate_quantity(const RealField& f, IntegralKind kind) {
  switch (kind) {
    case IntegralKind::mass: return f.samples.sum() * f.grid.dx;
    case IntegralKind::momentum: return f.samples.square().sum() * f.grid.dx;
    case IntegralKind::power: return f.samples.square().sum() * f.grid.dx;
  }
  throw config_error("unknown integral kind");
}

// power = integral of |q|^2 dT; mass/momentum act on the real part.
inline double integrate_quantity(const ComplexEnvelope& q, IntegralKind kind) {
  switch (kind) {
    case IntegralKind::power: return q.samples.abs2().sum() * q.grid.dx;
    case IntegralKind::mass: return q.samples.real().sum() * q.grid.dx;
    case IntegralKind::momentum: return q.samples.real().square().sum() * q.grid.dx;
  }
  throw config_error("unknown integral kind");
}

// Channel energy sqrt(2/pi) * integral |q|^2 dtau.
inline double channel_energy(const ComplexEnvelope& q) {
  return std::sqrt(2.0 / pi) * integrate_quantity(q, IntegralKind::power);
}

// Intensity-weighted center of an envelope, integral T |q|^2 / integral |q|^2.
inline double envelope_center(const ComplexEnvelope& q) {
  double w = 0.0, m = 0.0;
  for (int i = 0; i < q.grid.n; ++i) {
    const double p = std::norm(q.samples[i]);
    w += p;
    m += p * q.grid.x(i);
  }
  return w > 0.0 ? m / w : 0.0;
}

} // namespace solwave
