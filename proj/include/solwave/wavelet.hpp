#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "solwave/errors.hpp"
#include "solwave/field.hpp"

namespace solwave {

// Orthonormal scaling filter in the dilation normalization sum(c_k) = 2.
// The filter bank divides by sqrt(2) per level, so the transform itself is
// orthonormal; keeping both conventions explicit avoids off-by-sqrt(2) bugs.
struct WaveletFilter {
  std::string name;
  std::vector<double> c;

  int taps() const { return static_cast<int>(c.size()); }
};

// Admissibility: sum(c_k) = 2 within 1e-12 and the shifted-by-2m
// orthonormality sum(c_k c_{k+2m}) = 2*delta_{m0} within 1e-10.
inline void validate_filter(const WaveletFilter& f) {
  const int n = f.taps();
  if (n < 2 || n % 2 != 0)
    throw validation_error("wavelet filter '" + f.name + "': tap count must be even and >= 2");
  const double sum = std::accumulate(f.c.begin(), f.c.end(), 0.0);
  if (std::abs(sum - 2.0) > 1e-12)
    throw validation_error("wavelet filter '" + f.name + "': sum(c) = " + std::to_string(sum) +
                           " violates the dilation normalization sum(c) = 2");
  for (int m = 0; 2 * m < n; ++m) {
    double dot = 0.0;
    for (int k = 0; k + 2 * m < n; ++k) dot += f.c[k] * f.c[k + 2 * m];
    const double target = (m == 0) ? 2.0 : 0.0;
    if (std::abs(dot - target) > 1e-10)
      throw validation_error("wavelet filter '" + f.name + "': sum(c_k c_{k+" +
                             std::to_string(2 * m) + "}) = " + std::to_string(dot) +
                             " violates orthonormality");
  }
}

// Alternating-flip wavelet taps g_k = (-1)^k c_{N-1-k}. For Haar {1,1} this
// gives {+1,-1}, i.e. W(x) = Phi(2x) - Phi(2x-1); index origin is a fixed
// convention of this toolkit.
inline std::vector<double> wavelet_from_scaling(const WaveletFilter& f) {
  validate_filter(f);
  const int n = f.taps();
  std::vector<double> g(n);
  for (int k = 0; k < n; ++k) g[k] = (k % 2 == 0 ? 1.0 : -1.0) * f.c[n - 1 - k];
  return g;
}

namespace filters {

inline WaveletFilter haar() { return {"haar", {1.0, 1.0}}; }

// Daubechies 4-tap, two vanishing moments.
inline WaveletFilter db2() {
  const double s3 = std::sqrt(3.0);
  return {"db2", {(1.0 + s3) / 4.0, (3.0 + s3) / 4.0, (3.0 - s3) / 4.0, (1.0 - s3) / 4.0}};
}

// Daubechies 6-tap, three vanishing moments.
inline WaveletFilter db3() {
  const double s10 = std::sqrt(10.0);
  const double t = std::sqrt(5.0 + 2.0 * s10);
  return {"db3",
          {(1.0 + s10 + t) / 16.0, (5.0 + s10 + 3.0 * t) / 16.0, (10.0 - 2.0 * s10 + 2.0 * t) / 16.0,
           (10.0 - 2.0 * s10 - 2.0 * t) / 16.0, (5.0 + s10 - 3.0 * t) / 16.0,
           (1.0 + s10 - t) / 16.0}};
}

// Coiflet-class 6-tap filter; near-symmetric bump close in shape to a
// hyperbolic-secant pulse.
inline WaveletFilter coif1() {
  const double s7 = std::sqrt(7.0);
  return {"coif1",
          {(1.0 - s7) / 16.0, (5.0 + s7) / 16.0, (14.0 + 2.0 * s7) / 16.0,
           (14.0 - 2.0 * s7) / 16.0, (1.0 - s7) / 16.0, (-3.0 + s7) / 16.0}};
}

inline std::vector<WaveletFilter> all() { return {haar(), db2(), db3(), coif1()}; }

inline WaveletFilter by_name(const std::string& name) {
  for (auto& f : all())
    if (f.name == name) return f;
  throw config_error("unknown wavelet filter: " + name);
}

} // namespace filters

// Pyramid coefficients. details[0] is the finest level; approx holds the
// coarsest approximation. Total coefficient count equals original_length.
struct DwtResult {
  std::string filter_name;
  int levels = 0;
  ArrayXd approx;
  std::vector<ArrayXd> details;
  int original_length = 0;

  double energy() const {
    double e = approx.square().sum();
    for (const auto& d : details) e += d.square().sum();
    return e;
  }
};

namespace detail {

// One analysis stage: periodic convolve-and-downsample with orthonormal taps.
inline void dwt_stage(const ArrayXd& a, const std::vector<double>& h, const std::vector<double>& g,
                      ArrayXd& approx, ArrayXd& det) {
  const int n = static_cast<int>(a.size());
  const int half = n / 2;
  const int taps = static_cast<int>(h.size());
  approx.resize(half);
  det.resize(half);
  for (int i = 0; i < half; ++i) {
    double sa = 0.0, sd = 0.0;
    for (int k = 0; k < taps; ++k) {
      const double x = a[(2 * i + k) % n];
      sa += h[k] * x;
      sd += g[k] * x;
    }
    approx[i] = sa;
    det[i] = sd;
  }
}

// One synthesis stage, the transpose of dwt_stage.
inline ArrayXd idwt_stage(const ArrayXd& approx, const ArrayXd& det, const std::vector<double>& h,
                          const std::vector<double>& g) {
  const int half = static_cast<int>(approx.size());
  const int n = 2 * half;
  const int taps = static_cast<int>(h.size());
  ArrayXd out = ArrayXd::Zero(n);
  for (int i = 0; i < half; ++i) {
    for (int k = 0; k < taps; ++k) {
      const int j = (2 * i + k) % n;
      out[j] += h[k] * approx[i] + g[k] * det[i];
    }
  }
  return out;
}

inline void orthonormal_taps(const WaveletFilter& f, std::vector<double>& h, std::vector<double>& g) {
  const std::vector<double> gw = wavelet_from_scaling(f); // validates f
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  h.resize(f.c.size());
  g.resize(f.c.size());
  for (std::size_t k = 0; k < f.c.size(); ++k) {
    h[k] = f.c[k] * inv_sqrt2;
    g[k] = gw[k] * inv_sqrt2;
  }
}

} // namespace detail

inline DwtResult dwt_forward(const ArrayXd& signal, const WaveletFilter& f, int levels) {
  const int n = static_cast<int>(signal.size());
  if (!is_power_of_two(n))
    throw config_error("signal length must be a power of two, got " + std::to_string(n));
  if (levels < 1 || (1 << levels) > n)
    throw config_error("level count must satisfy 1 <= levels <= log2(length)");

  std::vector<double> h, g;
  detail::orthonormal_taps(f, h, g);

  DwtResult r;
  r.filter_name = f.name;
  r.levels = levels;
  r.original_length = n;
  ArrayXd a = signal;
  for (int l = 0; l < levels; ++l) {
    ArrayXd next, det;
    detail::dwt_stage(a, h, g, next, det);
    r.details.push_back(std::move(det));
    a = std::move(next);
  }
  r.approx = std::move(a);
  return r;
}

inline ArrayXd dwt_inverse(const DwtResult& r, const WaveletFilter& f) {
  if (f.name != r.filter_name)
    throw validation_error("coefficients were produced with filter '" + r.filter_name +
                           "', not '" + f.name + "'");
  std::vector<double> h, g;
  detail::orthonormal_taps(f, h, g);
  ArrayXd a = r.approx;
  for (int l = r.levels - 1; l >= 0; --l) a = detail::idwt_stage(a, r.details[l], h, g);
  return a;
}

struct CompressionResult {
  DwtResult result;
  double l2_error_bound = 0.0; // exact reconstruction L2 error for orthonormal banks
  int retained = 0;            // nonzero coefficients kept
};

// Hard thresholding: keep the ceil(keep_fraction * N) largest-magnitude
// coefficients (ties broken by position for determinism), zero the rest.
inline CompressionResult compress_threshold(const DwtResult& r, double keep_fraction) {
  if (!(keep_fraction > 0.0) || keep_fraction > 1.0)
    throw std::domain_error("keep_fraction must lie in (0, 1]");

  std::vector<double*> coeffs;
  CompressionResult out{r, 0.0, 0};
  coeffs.reserve(r.original_length);
  for (auto& d : out.result.details)
    for (int i = 0; i < d.size(); ++i) coeffs.push_back(&d[i]);
  for (int i = 0; i < out.result.approx.size(); ++i) coeffs.push_back(&out.result.approx[i]);

  const int total = static_cast<int>(coeffs.size());
  const int keep = std::min<int>(total, static_cast<int>(std::ceil(keep_fraction * total)));

  std::vector<int> order(total);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return std::abs(*coeffs[a]) > std::abs(*coeffs[b]); });

  double discarded = 0.0;
  for (int j = 0; j < total; ++j) {
    double& v = *coeffs[order[j]];
    if (j < keep) {
      if (v != 0.0) ++out.retained;
    } else {
      discarded += v * v;
      v = 0.0;
    }
  }
  out.l2_error_bound = std::sqrt(discarded);
  return out;
}

} // namespace solwave
