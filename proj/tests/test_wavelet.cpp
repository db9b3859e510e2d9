#include <catch2/catch_amalgamated.hpp>

#include "solwave/rng.hpp"
#include "solwave/wavelet.hpp"
#include "solwave/wft.hpp"

using namespace solwave;
using Catch::Approx;

TEST_CASE("shipped filter tables pass the admissibility checks", "[wavelet]") {
  for (const auto& f : filters::all()) {
    CHECK_NOTHROW(validate_filter(f));
    const auto taps = wavelet_from_scaling(f);
    double sum = 0.0;
    for (double t : taps) sum += t;
    CHECK(std::abs(sum) < 1e-12); // vanishing-moment identity
  }
  CHECK_THROWS_AS(filters::by_name("db7"), config_error);
}

TEST_CASE("inadmissible tables are rejected with the violated condition", "[wavelet]") {
  try {
    validate_filter({"bad_sum", {1.0, 0.5}});
    FAIL("expected validation_error");
  } catch (const validation_error& e) {
    CHECK(std::string(e.what()).find("sum(c) = 2") != std::string::npos);
  }
  try {
    validate_filter({"bad_orth", {1.1, 0.9}});
    FAIL("expected validation_error");
  } catch (const validation_error& e) {
    CHECK(std::string(e.what()).find("orthonormality") != std::string::npos);
  }
  CHECK_THROWS_AS(validate_filter({"odd", {1.0, 0.5, 0.5}}), validation_error);
}

TEST_CASE("alternating flip reproduces the Haar wavelet taps", "[wavelet]") {
  const auto taps = wavelet_from_scaling(filters::haar());
  REQUIRE(taps.size() == 2);
  CHECK(taps[0] == 1.0);
  CHECK(taps[1] == -1.0);
}

TEST_CASE("constants live entirely in the approximation space", "[wavelet]") {
  const ArrayXd constant = ArrayXd::Constant(256, 0.77);
  for (const auto& f : filters::all()) {
    const auto r = dwt_forward(constant, f, 5);
    for (const auto& d : r.details) CHECK(d.abs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("unit impulse under Haar", "[wavelet]") {
  ArrayXd x = ArrayXd::Zero(8);
  x[0] = 1.0;
  const auto r = dwt_forward(x, filters::haar(), 1);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  CHECK(r.approx[0] == Approx(inv_sqrt2));
  CHECK(r.details[0][0] == Approx(inv_sqrt2));
  for (int i = 1; i < 4; ++i) {
    CHECK(r.approx[i] == 0.0);
    CHECK(r.details[0][i] == 0.0);
  }
  CHECK(r.energy() == Approx(1.0).margin(1e-14));
}

TEST_CASE("length and level preconditions", "[wavelet]") {
  ArrayXd twelve = ArrayXd::Zero(12);
  CHECK_THROWS_AS(dwt_forward(twelve, filters::haar(), 1), config_error);
  ArrayXd x = ArrayXd::Zero(16);
  CHECK_THROWS_AS(dwt_forward(x, filters::haar(), 5), config_error);
  CHECK_THROWS_AS(dwt_forward(x, filters::haar(), 0), config_error);
}

TEST_CASE("perfect reconstruction over lengths and filters", "[wavelet]") {
  Rng rng(2024);
  for (const auto& f : filters::all()) {
    for (int n = 8; n <= 1024; n *= 4) {
      ArrayXd x(n);
      for (int i = 0; i < n; ++i) x[i] = rng.uniform_symmetric(2.0);
      int levels = 0;
      while ((1 << (levels + 1)) <= n) ++levels;
      const auto r = dwt_forward(x, f, levels);
      CHECK(r.original_length == n);
      int count = static_cast<int>(r.approx.size());
      for (const auto& d : r.details) count += static_cast<int>(d.size());
      CHECK(count == n);
      const ArrayXd y = dwt_inverse(r, f);
      CHECK((x - y).abs().maxCoeff() < 1e-10);
      CHECK(std::abs(r.energy() - x.square().sum()) < 1e-10 * x.square().sum());
    }
  }
}

TEST_CASE("zeroing the details of a constant reproduces the constant", "[wavelet]") {
  const ArrayXd constant = ArrayXd::Constant(64, -2.5);
  auto r = dwt_forward(constant, filters::db2(), 3);
  for (auto& d : r.details) d.setZero();
  const ArrayXd back = dwt_inverse(r, filters::db2());
  CHECK((back - constant).abs().maxCoeff() < 1e-12);
}

TEST_CASE("filter mismatch on inversion is rejected", "[wavelet]") {
  ArrayXd x = ArrayXd::Zero(32);
  x[7] = 1.0;
  const auto r = dwt_forward(x, filters::db2(), 2);
  CHECK_THROWS_AS(dwt_inverse(r, filters::haar()), validation_error);
}

TEST_CASE("polynomials below the vanishing-moment order leave no detail", "[wavelet]") {
  const int n = 256;
  ArrayXd linear(n), quadratic(n);
  for (int i = 0; i < n; ++i) {
    linear[i] = 0.5 + 0.03 * i;
    quadratic[i] = 0.3 + 0.02 * i + 0.001 * i * i;
  }
  // Interior coefficients only: the periodic wrap sees the jump at the seam.
  auto interior_max = [](const ArrayXd& d, int taps) {
    double worst = 0.0;
    const int skirt = taps; // wrap-affected indices at the end of the row
    for (int i = 0; i < d.size() - skirt; ++i) worst = std::max(worst, std::abs(d[i]));
    return worst;
  };
  const auto rl = dwt_forward(linear, filters::db2(), 1);
  CHECK(interior_max(rl.details[0], filters::db2().taps()) < 1e-8);
  const auto rq = dwt_forward(quadratic, filters::db3(), 1);
  CHECK(interior_max(rq.details[0], filters::db3().taps()) < 1e-8);
}

TEST_CASE("threshold compression basics", "[wavelet]") {
  Rng rng(5);
  ArrayXd x(128);
  for (int i = 0; i < 128; ++i) x[i] = rng.uniform_symmetric(1.0);
  const auto r = dwt_forward(x, filters::db2(), 3);

  const auto keep_all = compress_threshold(r, 1.0);
  CHECK(keep_all.l2_error_bound == 0.0);
  CHECK(keep_all.retained == 128);
  CHECK((dwt_inverse(keep_all.result, filters::db2()) - x).abs().maxCoeff() < 1e-12);

  CHECK_THROWS_AS(compress_threshold(r, 0.0), std::domain_error);
  CHECK_THROWS_AS(compress_threshold(r, 1.5), std::domain_error);

  const ArrayXd silent = ArrayXd::Zero(64);
  const auto rs = dwt_forward(silent, filters::haar(), 2);
  const auto cs = compress_threshold(rs, 0.25);
  CHECK(cs.retained == 0);
  CHECK(cs.l2_error_bound == 0.0);
}

TEST_CASE("reported error bound is exact for orthonormal banks", "[wavelet]") {
  Rng rng(9);
  ArrayXd x(512);
  for (int i = 0; i < 512; ++i) x[i] = rng.uniform_symmetric(1.0) + std::sin(0.05 * i);
  for (const auto& f : filters::all()) {
    const auto r = dwt_forward(x, f, 4);
    const auto c = compress_threshold(r, 0.2);
    const ArrayXd y = dwt_inverse(c.result, f);
    const double measured = std::sqrt((x - y).square().sum());
    CHECK(std::abs(measured - c.l2_error_bound) < 1e-10);
  }
}

TEST_CASE("smooth pulses compress far better than noise", "[wavelet]") {
  const int n = 1024;
  Rng rng(31);
  ArrayXd pulse(n), noise(n);
  for (int i = 0; i < n; ++i) {
    const double t = (i - n / 2) * 0.05;
    const double s = 1.0 / std::cosh(t / 1.5);
    pulse[i] = s * s;
    noise[i] = rng.uniform_symmetric(1.0);
  }
  auto rel_err = [&](const ArrayXd& x, double keep) {
    const auto r = dwt_forward(x, filters::coif1(), 6);
    const auto c = compress_threshold(r, keep);
    const ArrayXd y = dwt_inverse(c.result, filters::coif1());
    return std::sqrt((x - y).square().sum() / x.square().sum());
  };
  CHECK(rel_err(noise, 0.1) >= 10.0 * rel_err(pulse, 0.1));
  // Half the coefficients reconstruct a smooth pulse essentially exactly.
  CHECK(rel_err(pulse, 0.5) < 1e-3);
}

TEST_CASE("spectrogram of a pure tone is one steady row", "[wft]") {
  const int n = 512, window = 64, hop = 32;
  ArrayXd x(n);
  const int cycles_per_window = 9;
  for (int i = 0; i < n; ++i) x[i] = std::sin(2.0 * pi * cycles_per_window * i / window);
  const auto sg = wft_spectrogram(x, window, hop);
  REQUIRE(sg.magnitudes.rows() > 3);

  Eigen::Index peak0;
  sg.magnitudes.row(0).maxCoeff(&peak0);
  CHECK(peak0 == cycles_per_window);
  for (int f = 1; f < sg.magnitudes.rows(); ++f) {
    Eigen::Index peak;
    const double v = sg.magnitudes.row(f).maxCoeff(&peak);
    CHECK(peak == peak0);
    CHECK(v == Approx(sg.magnitudes(0, peak0)).epsilon(1e-9));
  }
}

TEST_CASE("a step edge lights up one broadband column", "[wft]") {
  const int n = 512, window = 64, hop = 16;
  ArrayXd x = ArrayXd::Zero(n);
  const int edge = 256;
  for (int i = edge; i < n; ++i) x[i] = 1.0;
  const auto sg = wft_spectrogram(x, window, hop);

  // High-frequency content concentrates in the frames containing the jump.
  const int half = window / 4;
  double best = -1.0;
  int best_frame = -1;
  for (int f = 0; f < sg.magnitudes.rows(); ++f) {
    double hf = 0.0;
    for (int j = half; j < sg.magnitudes.cols(); ++j) hf += sg.magnitudes(f, j);
    if (hf > best) {
      best = hf;
      best_frame = f;
    }
  }
  const int start = sg.frame_starts[best_frame];
  CHECK(start <= edge);
  CHECK(edge < start + window);
}

TEST_CASE("degenerate spectrogram inputs", "[wft]") {
  const ArrayXd zero = ArrayXd::Zero(256);
  const auto sg = wft_spectrogram(zero, 64, 32);
  CHECK(sg.magnitudes.maxCoeff() == 0.0);

  ArrayXd x = ArrayXd::Zero(32);
  CHECK_THROWS_AS(wft_spectrogram(x, 64, 8), config_error);
  CHECK_THROWS_AS(wft_spectrogram(x, 16, 0), config_error);
}
