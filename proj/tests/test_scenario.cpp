#include <catch2/catch_amalgamated.hpp>

#include "solwave/scenario.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace solwave;
namespace fs = std::filesystem;

namespace {

Config parse_text(const std::string& text) {
  std::istringstream is(text);
  return Config::parse(is, "<test>");
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "solwave_test" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

} // namespace

TEST_CASE("config parsing fundamentals", "[scenario]") {
  const Config cfg = parse_text("# comment\n"
                                "[a]\n"
                                "x = 1.5\n"
                                "flag = true   # trailing comment\n"
                                "name = hello\n"
                                "[b]\n"
                                "count = 7\n");
  CHECK(cfg.get_double("a.x") == 1.5);
  CHECK(cfg.get_bool("a.flag"));
  CHECK(cfg.get_string("a.name") == "hello");
  CHECK(cfg.get_int("b.count") == 7);
  CHECK(cfg.get_int_or("b.missing", 3) == 3);

  CHECK_THROWS_AS(parse_text("[a]\nx = 1\nx = 2\n"), config_error);
  CHECK_THROWS_AS(parse_text("[a\nx = 1\n"), config_error);
  CHECK_THROWS_AS(parse_text("just words\n"), config_error);
  CHECK_THROWS_AS(parse_text("[]\nx = 1\n"), config_error);
}

TEST_CASE("typed getters name the key and expected type", "[scenario]") {
  const Config cfg = parse_text("[a]\nx = banana\n");
  try {
    cfg.get_double("a.x");
    FAIL("expected config_error");
  } catch (const config_error& e) {
    const std::string msg = e.what();
    CHECK(msg.find("a.x") != std::string::npos);
    CHECK(msg.find("real") != std::string::npos);
  }
  try {
    cfg.get_double("a.missing");
    FAIL("expected config_error");
  } catch (const config_error& e) {
    CHECK(std::string(e.what()).find("a.missing") != std::string::npos);
  }
}

TEST_CASE("schema validation flags unknown kinds and keys", "[scenario]") {
  CHECK_THROWS_AS(validate_scenario(parse_text("[scenario]\nkind = warp\nname = x\n")),
                  config_error);

  const std::string base = demo_config("kdv");
  CHECK_NOTHROW(validate_scenario(parse_text(base)));
  CHECK_THROWS_AS(validate_scenario(parse_text(base + "\n[kdv]\nbogus = 1\n")), config_error);

  // missing required key
  CHECK_THROWS_AS(validate_scenario(parse_text("[scenario]\nkind = kdv\nname = x\n")),
                  config_error);
}

TEST_CASE("all demo configs validate", "[scenario]") {
  for (const auto& kind : scenario_kinds()) CHECK_NOTHROW(validate_scenario(parse_text(demo_config(kind))));
  CHECK_THROWS_AS(demo_config("unknown"), config_error);
}

TEST_CASE("report emission formats", "[scenario]") {
  RunReport r;
  r.scenario = "demo";
  r.checks = {{"alpha", true, 1.25, 2.0}, {"beta", false, 3.0, 0.5}};
  r.artifact_paths = {"out/a.csv"};

  std::ostringstream csv;
  emit_report(r, ReportFormat::csv, csv);
  CHECK(csv.str() == "check,pass,measured,tolerance\n"
                     "alpha,1,1.25,2\n"
                     "beta,0,3,0.5\n");

  std::ostringstream text;
  emit_report(r, ReportFormat::text, text);
  CHECK(text.str().find("[FAIL] beta") != std::string::npos);
  CHECK(text.str().find("[PASS] alpha") != std::string::npos);
  CHECK_FALSE(r.all_passed());
}

TEST_CASE("squeeze scenario runs, passes, and is byte-reproducible", "[scenario]") {
  const Config cfg = parse_text(demo_config("squeeze"));
  const fs::path out1 = fresh_dir("squeeze1");
  const fs::path out2 = fresh_dir("squeeze2");

  const RunReport r1 = run_scenario(cfg, out1.string());
  const RunReport r2 = run_scenario(cfg, out2.string());
  CHECK(r1.all_passed());
  REQUIRE(!r1.artifact_paths.empty());
  REQUIRE(r1.artifact_paths.size() == r2.artifact_paths.size());
  for (std::size_t i = 0; i < r1.artifact_paths.size(); ++i)
    CHECK(slurp(r1.artifact_paths[i]) == slurp(r2.artifact_paths[i]));

  // Same scenario with another seed produces a different noisy series.
  std::string reseeded = demo_config("squeeze");
  const auto pos = reseeded.find("seed = 7");
  REQUIRE(pos != std::string::npos);
  reseeded.replace(pos, 8, "seed = 8");
  const fs::path out3 = fresh_dir("squeeze3");
  run_scenario(parse_text(reseeded), out3.string());
  CHECK(slurp(out1 / "fit_series.csv") != slurp(out3 / "fit_series.csv"));
}

TEST_CASE("wavelet scenario passes its internal checks", "[scenario]") {
  const Config cfg = parse_text(demo_config("wavelet"));
  const fs::path out = fresh_dir("wavelet");
  const RunReport r = run_scenario(cfg, out.string());
  CHECK(r.all_passed());
  CHECK(fs::exists(out / "coeffs.csv"));
  CHECK(fs::exists(out / "reconstruction.csv"));
  CHECK(fs::exists(out / "spectrogram.csv"));
}

TEST_CASE("collide scenario passes its internal checks", "[scenario]") {
  const Config cfg = parse_text(demo_config("collide"));
  const fs::path out = fresh_dir("collide");
  const RunReport r = run_scenario(cfg, out.string());
  CHECK(r.all_passed());
  CHECK(fs::exists(out / "collision.csv"));
  CHECK(fs::exists(out / "crosstalk.csv"));
}

TEST_CASE("scenario errors carry context", "[scenario]") {
  // Unknown pulse kind surfaces as a configuration error at run time.
  std::string bad = demo_config("nls");
  const auto pos = bad.find("kind = sech\n");
  REQUIRE(pos != std::string::npos);
  bad.replace(pos, 12, "kind = boxcar\n");
  const fs::path out = fresh_dir("bad_nls");
  CHECK_THROWS_AS(run_scenario(parse_text(bad), out.string()), config_error);
}
