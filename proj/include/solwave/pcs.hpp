#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "solwave/errors.hpp"
#include "solwave/field.hpp"
#include "solwave/spectral.hpp"

namespace solwave {

// Coupled quadratic-medium pair
//   i dU1/dz + d^2U1/dX^2 - alpha1 U1 + chi1 U1* U3 + chi2 U2* U4 = 0
//   i dU2/dz + d^2U2/dX^2 - alpha2 U2 + chi2 U1* U4 + chi3 U2* U5 = 0
// with U3..U5 prescribed. lambda is the inverse width of the sech^2 ansatz.
struct PcsParams {
  double alpha1 = 4.0;
  double alpha2 = 4.0;
  double chi1 = 1.0;
  double chi2 = 1.0;
  double chi3 = 1.0;
  double lambda = 1.0;

  void check() const {
    if (!(lambda > 0.0)) throw config_error("lambda must be positive");
  }
};

struct PcsAmplitudes {
  std::array<double, 5> a{0.0, 0.0, 0.0, 0.0, 0.0}; // A1..A5
};

enum class PcsBranchType { trivial_only, one_parameter_family };

inline std::string to_string(PcsBranchType b) {
  return b == PcsBranchType::trivial_only ? "trivial_only" : "one_parameter_family";
}

struct PcsStationaryResult {
  PcsBranchType branch = PcsBranchType::trivial_only;
  PcsAmplitudes amplitudes;               // representative solution
  std::array<double, 2> null_direction{0.0, 0.0}; // (A1,A2) direction of the family
  double determinant = 0.0;
  double algebraic_residual = 0.0; // max |sech^4 balance| at the returned amplitudes
};

namespace detail {

inline double pcs_balance_residual(const PcsParams& p, const PcsAmplitudes& A) {
  const double l2 = p.lambda * p.lambda;
  const double r1 = -6.0 * l2 * A.a[0] + p.chi1 * A.a[0] * A.a[2] + p.chi2 * A.a[1] * A.a[3];
  const double r2 = -6.0 * l2 * A.a[1] + p.chi2 * A.a[0] * A.a[3] + p.chi3 * A.a[1] * A.a[4];
  return std::max(std::abs(r1), std::abs(r2));
}

} // namespace detail

// Substitutes U_n = A_n sech^2(lambda X) into the stationary, real-field form
// of the coupled pair. The sech^2 balance forces alpha1 = alpha2 = 4 lambda^2;
// the sech^4 balance is a homogeneous linear system for (A1, A2) given the
// drivers, so nontrivial amplitudes exist only on the degenerate
// (zero-determinant) branches, which are reported as one-parameter families.
inline PcsStationaryResult pcs_stationary_amplitudes(const PcsParams& p, double a3, double a4,
                                                     double a5, double family_scale = 1.0) {
  p.check();
  const double l2 = p.lambda * p.lambda;
  const double mismatch = std::max(std::abs(p.alpha1 - 4.0 * l2), std::abs(p.alpha2 - 4.0 * l2));
  if (mismatch > 1e-9 * std::max(1.0, 4.0 * l2))
    throw config_error("sech^2 balance requires alpha1 = alpha2 = 4 lambda^2 (mismatch " +
                       std::to_string(mismatch) + ")");

  // [chi1 A3 - 6 l^2, chi2 A4; chi2 A4, chi3 A5 - 6 l^2] (A1, A2)^T = 0
  const double m11 = p.chi1 * a3 - 6.0 * l2;
  const double m12 = p.chi2 * a4;
  const double m22 = p.chi3 * a5 - 6.0 * l2;
  const double det = m11 * m22 - m12 * m12;
  const double scale = std::max({std::abs(m11), std::abs(m12), std::abs(m22), 6.0 * l2});

  PcsStationaryResult r;
  r.determinant = det;
  r.amplitudes.a = {0.0, 0.0, a3, a4, a5};

  if (std::abs(det) > 1e-9 * scale * scale) {
    r.branch = PcsBranchType::trivial_only;
  } else {
    r.branch = PcsBranchType::one_parameter_family;
    // Null vector of the symmetric 2x2 system, from its larger row.
    double d1, d2;
    if (std::abs(m11) >= std::abs(m22) && (m11 != 0.0 || m12 != 0.0)) {
      d1 = -m12;
      d2 = m11;
    } else if (m12 != 0.0 || m22 != 0.0) {
      d1 = m22;
      d2 = -m12;
    } else {
      d1 = 1.0; // whole plane degenerate; pick an axis
      d2 = 0.0;
    }
    double norm = std::hypot(d1, d2);
    if ((std::abs(d1) >= std::abs(d2) ? d1 : d2) < 0.0) norm = -norm;
    r.null_direction = {d1 / norm, d2 / norm};
    r.amplitudes.a[0] = family_scale * r.null_direction[0];
    r.amplitudes.a[1] = family_scale * r.null_direction[1];
  }
  r.algebraic_residual = detail::pcs_balance_residual(p, r.amplitudes);
  return r;
}

// sech^2 ansatz fields for all five components on a grid.
inline std::array<RealField, 5> assemble_pcs_fields(const PcsAmplitudes& A, double lambda,
                                                    const Grid1D& grid) {
  std::array<RealField, 5> fields;
  for (int n = 0; n < 5; ++n) {
    ArrayXd u(grid.n);
    for (int i = 0; i < grid.n; ++i) {
      const double s = 1.0 / std::cosh(lambda * grid.x(i));
      u[i] = A.a[n] * s * s;
    }
    fields[n] = RealField{grid, std::move(u)};
  }
  return fields;
}

// Max-abs residual of the two stationary operators evaluated spectrally on
// assembled real fields.
inline double pcs_grid_residual(const std::array<RealField, 5>& U, const PcsParams& p) {
  for (int n = 1; n < 5; ++n)
    if (!U[n].grid.same_as(U[0].grid)) throw config_error("PCS fields must share one grid");
  const RealField d2u1 = spectral_derivative(U[0], 2);
  const RealField d2u2 = spectral_derivative(U[1], 2);
  double worst = 0.0;
  for (int i = 0; i < U[0].grid.n; ++i) {
    const double r1 = d2u1.samples[i] - p.alpha1 * U[0].samples[i] +
                      p.chi1 * U[0].samples[i] * U[2].samples[i] +
                      p.chi2 * U[1].samples[i] * U[3].samples[i];
    const double r2 = d2u2.samples[i] - p.alpha2 * U[1].samples[i] +
                      p.chi2 * U[0].samples[i] * U[3].samples[i] +
                      p.chi3 * U[1].samples[i] * U[4].samples[i];
    worst = std::max({worst, std::abs(r1), std::abs(r2)});
  }
  return worst;
}

struct PcsSnapshot {
  double z = 0.0;
  ComplexEnvelope u1;
  ComplexEnvelope u2;
};

struct PcsTrajectory {
  std::vector<PcsSnapshot> snapshots;
};

// Split-step evolution of the two displayed components over frozen drivers.
// The nonlinear substep couples (U1, U2) to their conjugates pointwise; with
// real frozen drivers it reduces to a symmetric 2x2 flow on Re/Im parts that
// is integrated exactly by eigendecomposition.
inline PcsTrajectory pcs_propagate(const ComplexEnvelope& u1_0, const ComplexEnvelope& u2_0,
                                   const std::array<RealField, 3>& drivers, const PcsParams& p,
                                   double z_end, double dz, int snapshot_stride = 100) {
  p.check();
  if (!(dz > 0.0)) throw config_error("z step must be positive");
  if (!(z_end > 0.0)) throw config_error("z_end must be positive");
  if (!u1_0.grid.same_as(u2_0.grid)) throw config_error("PCS components must share one grid");
  for (const auto& d : drivers)
    if (!d.grid.same_as(u1_0.grid)) throw config_error("PCS drivers must share the component grid");

  const Grid1D& g = u1_0.grid;
  const int n = g.n;
  const ArrayXd k = wavenumbers(g);

  ArrayXcd half1(n), half2(n);
  for (int j = 0; j < n; ++j) {
    half1[j] = std::polar(1.0, -(k[j] * k[j] + p.alpha1) * 0.5 * dz);
    half2[j] = std::polar(1.0, -(k[j] * k[j] + p.alpha2) * 0.5 * dz);
  }

  // Pointwise coupling matrix M = [[chi1 U3, chi2 U4], [chi2 U4, chi3 U5]].
  ArrayXd ma(n), mb(n), mc(n);
  for (int i = 0; i < n; ++i) {
    ma[i] = p.chi1 * drivers[0].samples[i];
    mb[i] = p.chi2 * drivers[1].samples[i];
    mc[i] = p.chi3 * drivers[2].samples[i];
  }

  auto nonlinear_step = [&](ArrayXcd& q1, ArrayXcd& q2) {
    for (int i = 0; i < n; ++i) {
      // d/dz (p_vec) = M q_vec, d/dz (q_vec) = M p_vec with p = Re, q = Im:
      // r+- = p +- q evolve as exp(+-M dz) r+-.
      const double tr = 0.5 * (ma[i] + mc[i]);
      const double dd = 0.5 * (ma[i] - mc[i]);
      const double delta = std::hypot(dd, mb[i]);
      double c1, c2; // eigenvector rotation (cos, sin)
      if (delta > 0.0) {
        // Eigenvector of [[dd, b], [b, -dd]] for eigenvalue +delta.
        const double vx = dd + delta, vy = mb[i];
        const double vn = std::hypot(vx, vy);
        if (vn > 1e-300) {
          c1 = vx / vn;
          c2 = vy / vn;
        } else { // dd = -delta, b = 0: eigenvector along y
          c1 = 0.0;
          c2 = 1.0;
        }
      } else {
        c1 = 1.0;
        c2 = 0.0;
      }
      const double mu1 = tr + delta, mu2 = tr - delta;

      auto apply_exp = [&](double h, double& x, double& y) {
        // exp(h M) via M = R diag(mu1, mu2) R^T with R = [[c1,-c2],[c2,c1]].
        const double a1 = c1 * x + c2 * y;
        const double a2 = -c2 * x + c1 * y;
        const double e1 = std::exp(h * mu1) * a1;
        const double e2 = std::exp(h * mu2) * a2;
        x = c1 * e1 - c2 * e2;
        y = c2 * e1 + c1 * e2;
      };

      double rp1 = q1[i].real() + q1[i].imag();
      double rp2 = q2[i].real() + q2[i].imag();
      double rm1 = q1[i].real() - q1[i].imag();
      double rm2 = q2[i].real() - q2[i].imag();
      apply_exp(dz, rp1, rp2);
      apply_exp(-dz, rm1, rm2);
      q1[i] = complexd(0.5 * (rp1 + rm1), 0.5 * (rp1 - rm1));
      q2[i] = complexd(0.5 * (rp2 + rm2), 0.5 * (rp2 - rm2));
    }
  };

  Fft fft;
  const long total = detail::steps_for(z_end, dz);

  PcsTrajectory traj;
  traj.snapshots.push_back({0.0, u1_0, u2_0});

  ArrayXcd q1 = u1_0.samples, q2 = u2_0.samples;
  for (long step = 1; step <= total; ++step) {
    q1 = fft.inverse(half1 * fft.forward(q1));
    q2 = fft.inverse(half2 * fft.forward(q2));
    nonlinear_step(q1, q2);
    q1 = fft.inverse(half1 * fft.forward(q1));
    q2 = fft.inverse(half2 * fft.forward(q2));

    if (step % snapshot_stride == 0 || step == total) {
      if (!q1.allFinite() || !q2.allFinite())
        throw numerics_error("PCS run became non-finite at step " + std::to_string(step));
      traj.snapshots.push_back({step * dz, ComplexEnvelope{g, q1, 0.0}, ComplexEnvelope{g, q2, 0.0}});
    }
  }
  return traj;
}

} // namespace solwave
