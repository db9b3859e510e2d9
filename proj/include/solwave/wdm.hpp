#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "solwave/errors.hpp"
#include "solwave/field.hpp"
#include "solwave/nls.hpp"
#include "solwave/spectral.hpp"

namespace solwave {

// Multi-channel configuration q = sum_j q_j, one envelope per carrier.
// xpm_matrix holds the cross-phase coefficients gamma_jk (unit diagonal);
// alpha = 1 is the Manakov normalization. Four-wave-mixing terms are dropped.
struct WdmConfig {
  std::vector<ComplexEnvelope> channels;
  Eigen::MatrixXd xpm_matrix;
  double alpha = 1.0;

  void check() const {
    const int nc = static_cast<int>(channels.size());
    if (nc < 1) throw config_error("WDM configuration needs at least one channel");
    for (int j = 1; j < nc; ++j)
      if (!channels[j].grid.same_as(channels[0].grid))
        throw config_error("all WDM channels must share one grid");
    for (int j = 0; j < nc; ++j)
      for (int k = j + 1; k < nc; ++k)
        if (channels[j].carrier_offset == channels[k].carrier_offset)
          throw config_error("WDM channels must have distinct carrier offsets");
    if (xpm_matrix.rows() != nc || xpm_matrix.cols() != nc)
      throw config_error("xpm_matrix must be channels x channels");
    for (int j = 0; j < nc; ++j) {
      if (std::abs(xpm_matrix(j, j) - 1.0) > 1e-12)
        throw config_error("xpm_matrix diagonal must be 1");
      for (int k = 0; k < nc; ++k) {
        if (xpm_matrix(j, k) < 0.0) throw config_error("xpm_matrix entries must be nonnegative");
        if (std::abs(xpm_matrix(j, k) - xpm_matrix(k, j)) > 1e-12)
          throw config_error("xpm_matrix must be symmetric");
      }
    }
  }
};

// Minimum frequency separation sqrt((1 + alpha) rho0) for stable two-channel
// NRZ propagation.
inline double min_frequency_separation(double alpha, double rho0) {
  if (alpha < 0.0 || rho0 < 0.0) throw std::domain_error("alpha and rho0 must be nonnegative");
  return std::sqrt((1.0 + alpha) * rho0);
}

struct WdmSummaryRow {
  double z = 0.0;
  int channel = 0;
  double energy = 0.0;
  double center_t = 0.0;
  double mean_freq = 0.0; // carrier offset plus envelope spectral centroid
  double peak_amp = 0.0;
};

struct WdmResult {
  std::vector<NlsTrajectory> channels;
  std::vector<WdmSummaryRow> summary;
};

// Coupled split-step: each channel advances with its own carrier-shifted
// linear factor, then all nonlinear phases are computed from one common
// intensity snapshot, nu (|q_j|^2 + alpha sum_{k!=j} gamma_jk |q_k|^2).
// A single channel reduces bitwise to nls_propagate.
inline WdmResult wdm_propagate(const WdmConfig& cfg, const NlsParams& p, int snapshot_stride = 100) {
  cfg.check();
  p.check();
  if (snapshot_stride < 1) throw config_error("snapshot stride must be >= 1");

  const int nc = static_cast<int>(cfg.channels.size());
  const Grid1D& g = cfg.channels[0].grid;
  const int n = g.n;

  std::vector<ArrayXcd> half(nc);
  for (int j = 0; j < nc; ++j)
    half[j] = detail::linear_step_factor(g, p.beta2, cfg.channels[j].carrier_offset, 0.5 * p.dz);

  Fft fft;
  const long total = detail::steps_for(p.z_end, p.dz);

  WdmResult result;
  result.channels.resize(nc);

  std::vector<ArrayXcd> q(nc);
  std::vector<ArrayXd> intensity(nc, ArrayXd(n));
  for (int j = 0; j < nc; ++j) {
    q[j] = cfg.channels[j].samples;
    result.channels[j].snapshots.push_back(
        {0.0, cfg.channels[j], integrate_quantity(cfg.channels[j], IntegralKind::power)});
  }

  auto record = [&](long step) {
    for (int j = 0; j < nc; ++j) {
      if (!q[j].allFinite())
        throw numerics_error("WDM channel " + std::to_string(j) + " became non-finite at step " +
                             std::to_string(step));
      ComplexEnvelope snap{g, q[j], cfg.channels[j].carrier_offset};
      const double power = integrate_quantity(snap, IntegralKind::power);
      result.channels[j].snapshots.push_back({step * p.dz, std::move(snap), power});
    }
  };

  for (long step = 1; step <= total; ++step) {
    for (int j = 0; j < nc; ++j) q[j] = fft.inverse(half[j] * fft.forward(q[j]));
    for (int j = 0; j < nc; ++j) intensity[j] = q[j].abs2();
    for (int j = 0; j < nc; ++j) {
      for (int i = 0; i < n; ++i) {
        double xpm = 0.0;
        for (int k = 0; k < nc; ++k)
          if (k != j) xpm += cfg.xpm_matrix(j, k) * intensity[k][i];
        q[j][i] *= std::polar(1.0, p.nu * (intensity[j][i] + cfg.alpha * xpm) * p.dz);
      }
    }
    for (int j = 0; j < nc; ++j) q[j] = fft.inverse(half[j] * fft.forward(q[j]));
    if (step % snapshot_stride == 0 || step == total) record(step);
  }

  for (int j = 0; j < nc; ++j)
    for (const auto& s : result.channels[j].snapshots) {
      WdmSummaryRow row;
      row.z = s.z;
      row.channel = j;
      row.energy = channel_energy(s.field);
      row.center_t = envelope_center(s.field);
      row.mean_freq = s.field.carrier_offset + mean_frequency(s.field);
      row.peak_amp = s.field.samples.abs().maxCoeff();
      result.summary.push_back(row);
    }
  return result;
}

} // namespace solwave
