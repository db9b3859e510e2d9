#include <catch2/catch_amalgamated.hpp>

#include "solwave/nls.hpp"
#include "solwave/wdm.hpp"

using namespace solwave;
using Catch::Approx;

namespace {

ComplexEnvelope sech_envelope(const Grid1D& g, double amplitude, double center, double omega) {
  ArrayXcd q(g.n);
  for (int i = 0; i < g.n; ++i) q[i] = amplitude / std::cosh(g.x(i) - center);
  return ComplexEnvelope{g, std::move(q), omega};
}

} // namespace

TEST_CASE("bright soliton keeps its shape in the focusing convention", "[nls]") {
  const Grid1D g = make_grid(512, 64.0, -32.0);
  const ComplexEnvelope q0 = sech_envelope(g, 1.0, 0.0, 0.0);
  const NlsParams p{1.0, 1.0, 2e-3, 10.0};
  const auto traj = nls_propagate(q0, p, std::nullopt, 1000);

  double linf = 0.0;
  for (int i = 0; i < g.n; ++i)
    linf = std::max(linf, std::abs(std::abs(traj.back().field.samples[i]) -
                                   1.0 / std::cosh(g.x(i))));
  CHECK(linf < 1e-6);
  CHECK(traj.power_drift() < 1e-10);
}

TEST_CASE("linear run follows the analytic dispersion law", "[nls]") {
  const Grid1D g = make_grid(512, 64.0, -32.0);
  const double sigma0 = 2.0, beta2 = 1.0;
  ArrayXcd q(g.n);
  for (int i = 0; i < g.n; ++i)
    q[i] = std::exp(-g.x(i) * g.x(i) / (2.0 * sigma0 * sigma0));
  const auto traj = nls_propagate({g, q, 0.0}, {beta2, 0.0, 1e-3, 5.0}, std::nullopt, 5000);

  const auto& qf = traj.back().field;
  double w = 0.0, m = 0.0;
  for (int i = 0; i < g.n; ++i) {
    const double pw = std::norm(qf.samples[i]);
    w += pw;
    m += pw * g.x(i) * g.x(i);
  }
  const double z = traj.back().z;
  const double expected = (std::pow(sigma0, 4) + beta2 * beta2 * z * z) / (2.0 * sigma0 * sigma0);
  CHECK(m / w == Approx(expected).epsilon(1e-6));
}

TEST_CASE("an all-pass filter changes nothing", "[nls]") {
  const Grid1D g = make_grid(256, 40.0, -20.0);
  const ComplexEnvelope q0 = sech_envelope(g, 1.0, 0.0, 0.0);
  const NlsParams p{1.0, 1.0, 1e-3, 1.0};
  const auto plain = nls_propagate(q0, p, std::nullopt, 1000);
  const GuidingFilter all_pass{0.0, 1e9, 1.0, 10e-3};
  const auto filtered = nls_propagate(q0, p, all_pass, 1000);
  CHECK((plain.back().field.samples - filtered.back().field.samples).abs().maxCoeff() < 1e-12);
}

TEST_CASE("filter span must be commensurate with dz", "[nls]") {
  const Grid1D g = make_grid(256, 40.0, -20.0);
  const ComplexEnvelope q0 = sech_envelope(g, 1.0, 0.0, 0.0);
  const GuidingFilter bad{0.0, 1.0, 1.0, 0.0105};
  CHECK_THROWS_AS(nls_propagate(q0, {1.0, 1.0, 1e-2, 0.1}, bad), config_error);
}

TEST_CASE("unity-gain filter never increases power and damps detuning", "[nls]") {
  const Grid1D g = make_grid(512, 64.0, -32.0);
  // Detuned soliton: phase ramp exp(i k0 T) puts the spectrum off center.
  const double detune = 0.8;
  ArrayXcd q(g.n);
  for (int i = 0; i < g.n; ++i)
    q[i] = std::polar(1.0 / std::cosh(g.x(i)), detune * g.x(i));
  const ComplexEnvelope q0{g, q, 0.0};
  const GuidingFilter filt{0.0, 2.0, 1.0, 0.05};
  const auto traj = nls_propagate(q0, {1.0, 1.0, 1e-3, 4.0}, filt, 500);

  const double p0 = traj.front().power;
  double previous_offset = std::abs(mean_frequency(traj.front().field));
  for (std::size_t i = 1; i < traj.snapshots.size(); ++i) {
    CHECK(traj.snapshots[i].power <= p0 * (1.0 + 1e-12));
    const double offset = std::abs(mean_frequency(traj.snapshots[i].field));
    CHECK(offset <= previous_offset + 1e-9);
    previous_offset = offset;
  }
  CHECK(previous_offset < 0.5 * detune);
}

TEST_CASE("NRZ encoding", "[nls]") {
  const Grid1D g = make_grid(2048, 128.0, -64.0);

  const ComplexEnvelope zeros = encode_nrz("000", 1.0, 4.0, 0.25, g);
  CHECK(zeros.samples.abs().maxCoeff() == 0.0);

  const ComplexEnvelope one = encode_nrz("1", 1.0, 8.0, 0.5, g);
  CHECK(one.samples.abs().maxCoeff() == Approx(1.0).margin(1e-6));

  // 16-bit test word: runs of ones are 1, 2, 1, 4 -> four plateaus holding
  // eight bit-slots high in total.
  const std::string bits = "0010110010111100";
  const double bit_width = 4.0;
  const ComplexEnvelope coded = encode_nrz(bits, 1.0, bit_width, 0.2, g);
  CHECK(count_plateaus(coded, 1.0) == 4);
  double high_time = 0.0;
  for (int i = 0; i < g.n; ++i)
    if (std::abs(coded.samples[i]) > 0.5) high_time += g.dx;
  CHECK(high_time == Approx(8.0 * bit_width).epsilon(0.02));

  CHECK_THROWS_AS(encode_nrz("", 1.0, 4.0, 0.25, g), config_error);
  CHECK_THROWS_AS(encode_nrz("01021", 1.0, 4.0, 0.25, g), config_error);
  const Grid1D small = make_grid(64, 16.0, -8.0);
  CHECK_THROWS_AS(encode_nrz("11111111", 1.0, 4.0, 0.25, small), config_error);
}

TEST_CASE("bit-synchronous phase modulation carries the requested chirp", "[nls]") {
  const Grid1D g = make_grid(2048, 128.0, -64.0);
  const double slope = 9.0;
  const ComplexEnvelope q = encode_nrz("0110", 1.0, 8.0, 0.4, g, slope);
  // In the middle of the high block the phase gradient alternates +-slope.
  const int i0 = g.n / 2 + 20;
  const double dphase =
      std::arg(q.samples[i0 + 1] / q.samples[i0]) / g.dx;
  CHECK(std::abs(std::abs(dphase) - slope) < 0.15 * slope);
}

TEST_CASE("chirp profile recovers analytic phase gradients", "[nls]") {
  const Grid1D g = make_grid(512, 32.0, -16.0);
  const double beta = std::sqrt(0.1);

  // Quadratic phase: Arg(q) = b T^2, so u = beta * 2 b T.
  const double b = 0.3;
  ArrayXcd q(g.n);
  for (int i = 0; i < g.n; ++i) {
    const double t = g.x(i);
    q[i] = std::polar(std::exp(-t * t / 16.0), b * t * t);
  }
  const RealField u = chirp_profile({g, q, 0.0}, beta);
  double worst = 0.0;
  for (int i = 0; i < g.n; ++i) {
    const double t = g.x(i);
    if (std::abs(q[i]) < 1e-3 || std::abs(2.0 * b * t) > 0.8 * pi / g.dx) continue;
    worst = std::max(worst, std::abs(u.samples[i] - beta * 2.0 * b * t));
  }
  CHECK(worst < 1e-2); // centered-difference truncation on the quadratic ramp

  // Bit-synchronous NRZ modulation with slope 9 carries chirp 9*beta ~ 2.85.
  const Grid1D gn = make_grid(2048, 128.0, -64.0);
  const ComplexEnvelope coded = encode_nrz("0110", 1.0, 8.0, 0.4, gn, 9.0);
  const RealField uc = chirp_profile(coded, beta);
  const int mid = gn.n / 2 + 20; // inside the high block, away from edges
  CHECK(std::abs(std::abs(uc.samples[mid]) - 9.0 * beta) < 0.05);
}

TEST_CASE("steepening metric behavior", "[nls]") {
  const Grid1D g = make_grid(512, 64.0, -32.0);

  // Pure dispersion of a Gaussian: the gradient only decays.
  ArrayXcd q(g.n);
  for (int i = 0; i < g.n; ++i) q[i] = std::exp(-g.x(i) * g.x(i) / 2.0);
  const auto lin = nls_propagate({g, q, 0.0}, {1.0, 0.0, 1e-3, 3.0}, std::nullopt, 500);
  const auto m = steepening_metric(lin);
  for (std::size_t i = 1; i < m.max_gradient.size(); ++i)
    CHECK(m.max_gradient[i] <= m.max_gradient[i - 1] * (1.0 + 1e-9));
  CHECK(m.growth_factor <= 1.0 + 1e-9);

  // Constant-amplitude plateau with no edges: nothing to steepen.
  const ArrayXcd flat = ArrayXcd::Constant(g.n, complexd(0.8, 0.0));
  const auto still = nls_propagate({g, flat, 0.0}, {-0.1, 1.0, 1e-3, 1.0}, std::nullopt, 200);
  const auto ms = steepening_metric(still);
  for (double gmax : ms.max_gradient) CHECK(gmax < 1e-10);
}

TEST_CASE("defocusing NRZ run steepens before the frozen distance", "[nls]") {
  // rho0 = 1, chirp magnitude 9*beta ~ 2.85, beta2 = -0.1.
  const Grid1D g = make_grid(2048, 64.0, -32.0);
  const ComplexEnvelope q0 = encode_nrz("0111100", 1.0, 4.0, 0.25, g, 9.0);
  const auto traj = nls_propagate(q0, {-0.1, 1.0, 5e-4, 1.0}, std::nullopt, 400);
  const auto m = steepening_metric(traj);
  CHECK(m.growth_factor >= 2.0);
}

TEST_CASE("piecewise beta2 schedule composes like sequential runs", "[nls]") {
  const Grid1D g = make_grid(256, 40.0, -20.0);
  const ComplexEnvelope q0 = sech_envelope(g, 1.0, 0.0, 0.0);

  NlsParams mapped{0.0, 1.0, 1e-3, 2.0};
  mapped.beta2_schedule = {{1.0, 1.0}, {2.0, -0.5}};
  const auto dm = nls_propagate(q0, mapped, std::nullopt, 2000);

  const auto leg1 = nls_propagate(q0, {1.0, 1.0, 1e-3, 1.0}, std::nullopt, 1000);
  const auto leg2 =
      nls_propagate(leg1.back().field, {-0.5, 1.0, 1e-3, 1.0}, std::nullopt, 1000);
  CHECK((dm.back().field.samples - leg2.back().field.samples).abs().maxCoeff() < 1e-15);

  NlsParams bad = mapped;
  bad.beta2_schedule = {{1.0, 1.0}, {0.5, -0.5}};
  CHECK_THROWS_AS(nls_propagate(q0, bad), config_error);
  bad.beta2_schedule = {{1.0, 1.0}};
  CHECK_THROWS_AS(nls_propagate(q0, bad), config_error); // does not cover z_end
}

TEST_CASE("min frequency separation", "[wdm]") {
  CHECK(min_frequency_separation(1.0, 1.0) == Approx(std::sqrt(2.0)));
  CHECK(min_frequency_separation(0.0, 0.0) == 0.0);
  CHECK(min_frequency_separation(3.0, 4.0) == Approx(4.0));
  CHECK_THROWS_AS(min_frequency_separation(-0.1, 1.0), std::domain_error);
  CHECK_THROWS_AS(min_frequency_separation(1.0, -0.1), std::domain_error);
}

TEST_CASE("WDM config validation", "[wdm]") {
  const Grid1D g = make_grid(256, 40.0, -20.0);
  WdmConfig cfg;
  cfg.channels = {sech_envelope(g, 1.0, -5.0, 1.0), sech_envelope(g, 1.0, 5.0, 1.0)};
  cfg.xpm_matrix = Eigen::MatrixXd::Identity(2, 2);
  CHECK_THROWS_AS(cfg.check(), config_error); // duplicate carriers

  cfg.channels[1].carrier_offset = -1.0;
  CHECK_NOTHROW(cfg.check());

  cfg.xpm_matrix(0, 1) = 0.5; // asymmetric
  CHECK_THROWS_AS(cfg.check(), config_error);
  cfg.xpm_matrix(1, 0) = 0.5;
  CHECK_NOTHROW(cfg.check());

  cfg.xpm_matrix(0, 0) = 2.0;
  CHECK_THROWS_AS(cfg.check(), config_error);
}

TEST_CASE("single WDM channel reduces to the scalar solver bitwise", "[wdm]") {
  const Grid1D g = make_grid(512, 64.0, -32.0);
  WdmConfig cfg;
  cfg.channels = {sech_envelope(g, 1.0, 0.0, 2.0)};
  cfg.xpm_matrix = Eigen::MatrixXd::Ones(1, 1);
  const NlsParams p{1.0, 1.0, 1e-3, 2.0};

  const auto wdm = wdm_propagate(cfg, p, 500);
  const auto scalar = nls_propagate(cfg.channels[0], p, std::nullopt, 500);

  REQUIRE(wdm.channels[0].snapshots.size() == scalar.snapshots.size());
  for (int i = 0; i < g.n; ++i)
    CHECK(wdm.channels[0].back().field.samples[i] == scalar.back().field.samples[i]);
}

TEST_CASE("decoupled channels match isolated runs", "[wdm]") {
  const Grid1D g = make_grid(512, 64.0, -32.0);
  WdmConfig cfg;
  cfg.channels = {sech_envelope(g, 1.0, -8.0, 2.0), sech_envelope(g, 1.2, 8.0, -2.0)};
  cfg.xpm_matrix = Eigen::MatrixXd::Identity(2, 2);
  const NlsParams p{1.0, 1.0, 1e-3, 2.0};

  const auto wdm = wdm_propagate(cfg, p, 1000);
  for (int j = 0; j < 2; ++j) {
    const auto iso = nls_propagate(cfg.channels[j], p, std::nullopt, 1000);
    CHECK((wdm.channels[j].back().field.samples - iso.back().field.samples).abs().maxCoeff() <
          1e-12);
  }
}

TEST_CASE("counter-moving Manakov collision exchanges opposite shifts", "[wdm]") {
  const Grid1D g = make_grid(1024, 80.0, -40.0);
  WdmConfig cfg;
  cfg.channels = {sech_envelope(g, 1.0, -10.0, 2.0), sech_envelope(g, 1.0, 10.0, -2.0)};
  cfg.xpm_matrix = Eigen::MatrixXd::Ones(2, 2);
  cfg.alpha = 1.0;
  const NlsParams p{1.0, 1.0, 2e-3, 10.0};

  const auto res = wdm_propagate(cfg, p, 2500);
  std::array<double, 2> shift{};
  for (int j = 0; j < 2; ++j) {
    const auto& tr = res.channels[j];
    const double e0 = channel_energy(tr.front().field);
    const double e1 = channel_energy(tr.back().field);
    CHECK(std::abs(e1 - e0) / e0 < 1e-8);
    const double velocity = p.beta2 * cfg.channels[j].carrier_offset;
    shift[j] = envelope_center(tr.back().field) -
               (envelope_center(tr.front().field) + velocity * tr.back().z);
  }
  CHECK(shift[0] * shift[1] < 0.0);
  CHECK(std::abs(shift[0]) > 1e-3);
  // Mirror symmetry of the launch makes the shifts equal and opposite.
  CHECK(shift[0] + shift[1] == Approx(0.0).margin(1e-6));
}

TEST_CASE("permuting channel order permutes outputs", "[wdm]") {
  const Grid1D g = make_grid(512, 64.0, -32.0);
  WdmConfig a;
  a.channels = {sech_envelope(g, 1.0, -6.0, 2.0), sech_envelope(g, 1.3, 6.0, -2.0)};
  a.xpm_matrix = Eigen::MatrixXd::Ones(2, 2);
  WdmConfig b;
  b.channels = {a.channels[1], a.channels[0]};
  b.xpm_matrix = Eigen::MatrixXd::Ones(2, 2);
  const NlsParams p{1.0, 1.0, 2e-3, 2.0};

  const auto ra = wdm_propagate(a, p, 1000);
  const auto rb = wdm_propagate(b, p, 1000);
  CHECK((ra.channels[0].back().field.samples - rb.channels[1].back().field.samples)
            .abs()
            .maxCoeff() == 0.0);
  CHECK((ra.channels[1].back().field.samples - rb.channels[0].back().field.samples)
            .abs()
            .maxCoeff() == 0.0);
}
