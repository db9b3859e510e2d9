#pragma once

#include <complex>

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include "solwave/field.hpp"

namespace solwave {

// Thin wrapper around Eigen's FFT keeping one plan cache per instance.
// Forward is unscaled; inverse carries the 1/n factor.
class Fft {
public:
  ArrayXcd forward(const ArrayXcd& in) const {
    Eigen::VectorXcd out;
    impl_.fwd(out, Eigen::VectorXcd(in.matrix()));
    return out.array();
  }

  ArrayXcd inverse(const ArrayXcd& in) const {
    Eigen::VectorXcd out;
    impl_.inv(out, Eigen::VectorXcd(in.matrix()));
    return out.array();
  }

private:
  mutable Eigen::FFT<double> impl_;
};

// Angular wavenumbers in FFT bin order: 2*pi/L * {0,1,...,n/2-1,-n/2,...,-1}.
inline ArrayXd wavenumbers(const Grid1D& g) {
  ArrayXd k(g.n);
  const double dk = 2.0 * pi / g.length();
  for (int i = 0; i < g.n; ++i) k[i] = dk * (i < g.n / 2 ? i : i - g.n);
  return k;
}

namespace detail {

// Step count for a march to z_end: exact when z_end is a near-integer
// multiple of dz, otherwise rounded up (the final time overshoots by < dz).
inline long steps_for(double z_end, double dz) {
  const double ratio = z_end / dz;
  long steps = std::llround(ratio);
  if (std::abs(ratio - double(steps)) > 1e-9 * std::max(1.0, ratio))
    steps = static_cast<long>(std::ceil(ratio));
  return steps;
}

inline ArrayXcd derivative_spectrum(const ArrayXcd& spectrum, const Grid1D& g, int order) {
  const ArrayXd k = wavenumbers(g);
  ArrayXcd out(g.n);
  const complexd i_unit(0.0, 1.0);
  for (int j = 0; j < g.n; ++j) {
    complexd m = std::pow(i_unit * k[j], order);
    // Odd derivatives have no self-conjugate Nyquist representation; drop it.
    if (order % 2 == 1 && j == g.n / 2) m = 0.0;
    out[j] = spectrum[j] * m;
  }
  return out;
}

} // namespace detail

// Discrete Fourier differentiation, exact for band-limited periodic samples.
inline ComplexEnvelope spectral_derivative(const ComplexEnvelope& f, int order) {
  if (order < 1 || order > 3)
    throw config_error("derivative order must be 1, 2 or 3, got " + std::to_string(order));
  Fft fft;
  ArrayXcd spec = detail::derivative_spectrum(fft.forward(f.samples), f.grid, order);
  return ComplexEnvelope{f.grid, fft.inverse(spec), f.carrier_offset};
}

inline RealField spectral_derivative(const RealField& f, int order) {
  if (order < 1 || order > 3)
    throw config_error("derivative order must be 1, 2 or 3, got " + std::to_string(order));
  Fft fft;
  ArrayXcd spec = detail::derivative_spectrum(fft.forward(f.samples.cast<complexd>()), f.grid, order);
  return RealField{f.grid, fft.inverse(spec).real()};
}

// Spectral interpolation onto a finer (or coarser) power-of-two grid over the
// same domain: zero-pad or truncate the spectrum, preserving band-limited content.
inline RealField resample(const RealField& f, int new_n) {
  if (!is_power_of_two(new_n) || new_n < 8)
    throw config_error("resample target must be a power of two >= 8");
  const int n = f.grid.n;
  Fft fft;
  ArrayXcd spec = fft.forward(f.samples.cast<complexd>());
  ArrayXcd out = ArrayXcd::Zero(new_n);
  const int keep = std::min(n, new_n) / 2;
  for (int j = 0; j < keep; ++j) {
    out[j] = spec[j];
    out[new_n - 1 - j] = spec[n - 1 - j];
  }
  out *= double(new_n) / double(n);
  Grid1D g2{new_n, f.grid.length() / new_n, f.grid.x0, true};
  return RealField{g2, fft.inverse(out).real()};
}

// Spectral centroid of the envelope, integral k |q^|^2 / integral |q^|^2,
// relative to the channel carrier.
inline double mean_frequency(const ComplexEnvelope& q) {
  Fft fft;
  const ArrayXcd spec = fft.forward(q.samples);
  const ArrayXd k = wavenumbers(q.grid);
  double w = 0.0, m = 0.0;
  for (int j = 0; j < q.grid.n; ++j) {
    const double p = std::norm(spec[j]);
    w += p;
    m += p * k[j];
  }
  return w > 0.0 ? m / w : 0.0;
}

} // namespace solwave
