#include <atomic>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "solwave/scenario.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailedChecks = 1;
constexpr int kExitConfigError = 2;
constexpr int kExitNumericsError = 3;

struct ScenarioResult {
  std::optional<solwave::RunReport> report;
  std::string error;
  int exit_code = kExitOk;
};

ScenarioResult run_one(const std::string& path, const std::optional<std::string>& out) {
  ScenarioResult r;
  try {
    r.report = solwave::run_scenario_file(path, out);
    r.exit_code = r.report->all_passed() ? kExitOk : kExitFailedChecks;
  } catch (const solwave::config_error& e) {
    r.error = e.what();
    r.exit_code = kExitConfigError;
  } catch (const solwave::validation_error& e) {
    r.error = e.what();
    r.exit_code = kExitConfigError;
  } catch (const std::domain_error& e) {
    r.error = e.what();
    r.exit_code = kExitConfigError;
  } catch (const solwave::numerics_error& e) {
    r.error = e.what();
    r.exit_code = kExitNumericsError;
  } catch (const std::exception& e) {
    r.error = e.what();
    r.exit_code = kExitNumericsError;
  }
  return r;
}

// Batch exit code: configuration problems dominate, then numerical failures,
// then failed checks.
int combine_exit_codes(const std::vector<ScenarioResult>& results) {
  int code = kExitOk;
  for (int want : {kExitConfigError, kExitNumericsError, kExitFailedChecks})
    for (const auto& r : results)
      if (r.exit_code == want && code == kExitOk) code = want;
  return code;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"solwave: deterministic soliton / squeezed-light scenario runner"};
  app.require_subcommand(1);

  std::vector<std::string> configs;
  std::string out_dir;
  std::string format = "text";
  unsigned jobs = 1;

  auto* run = app.add_subcommand("run", "execute scenario configs and emit reports");
  run->add_option("configs", configs, "scenario config files")->required()->expected(-1);
  run->add_option("--out", out_dir, "output directory (batch runs append the scenario name)");
  run->add_option("--format", format, "report format: text or csv")
      ->check(CLI::IsMember({"text", "csv"}));
  run->add_option("--jobs", jobs, "parallel scenario workers")->check(CLI::PositiveNumber);

  auto* validate = app.add_subcommand("validate", "parse and schema-check configs");
  validate->add_option("configs", configs, "scenario config files")->required()->expected(-1);

  std::string demo_kind;
  auto* demo = app.add_subcommand("demo", "write a reference config for a scenario kind");
  demo->add_option("kind", demo_kind, "one of: kdv nls wdm collide squeeze pcs wavelet")->required();
  demo->add_option("--out", out_dir, "directory for the generated config");

  CLI11_PARSE(app, argc, argv);

  if (validate->parsed()) {
    int code = kExitOk;
    for (const auto& path : configs) {
      try {
        solwave::validate_scenario(solwave::Config::parse_file(path));
        std::cout << "OK " << path << "\n";
      } catch (const std::exception& e) {
        std::cerr << "INVALID " << path << ": " << e.what() << "\n";
        code = kExitConfigError;
      }
    }
    return code;
  }

  if (demo->parsed()) {
    try {
      const std::string text = solwave::demo_config(demo_kind);
      const std::string dir = out_dir.empty() ? "." : out_dir;
      std::filesystem::create_directories(dir);
      const auto path = std::filesystem::path(dir) / (demo_kind + "_demo.ini");
      std::ofstream os(path);
      if (!os) throw solwave::config_error("cannot write " + path.string());
      os << text;
      std::cout << path.string() << "\n";
      return kExitOk;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kExitConfigError;
    }
  }

  // run
  const bool batch = configs.size() > 1;
  std::vector<ScenarioResult> results(configs.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next.fetch_add(1); i < configs.size(); i = next.fetch_add(1)) {
      std::optional<std::string> out;
      if (!out_dir.empty()) {
        if (batch) {
          // Isolate per-scenario outputs inside the shared base directory.
          const auto stem = std::filesystem::path(configs[i]).stem().string();
          out = (std::filesystem::path(out_dir) / stem).string();
        } else {
          out = out_dir;
        }
      }
      results[i] = run_one(configs[i], out);
    }
  };

  const unsigned workers = std::min<unsigned>(jobs, static_cast<unsigned>(configs.size()));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  const auto fmt = format == "csv" ? solwave::ReportFormat::csv : solwave::ReportFormat::text;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    const auto& r = results[i];
    if (r.report) {
      solwave::emit_report(*r.report, fmt, std::cout);
    } else {
      std::cerr << "error in " << configs[i] << ": " << r.error << "\n";
    }
  }
  return combine_exit_codes(results);
}
