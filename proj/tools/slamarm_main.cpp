// slamarm - command line front end: run scenarios, verify identities, plot traces
// SPDX-License-Identifier: MIT

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <string>

#include "slamarm/plots.hpp"
#include "slamarm/scenario.hpp"
#include "slamarm/selfcheck.hpp"
#include "slamarm/trace_io.hpp"

namespace {

constexpr int kExitMonitorFailure = 1;
constexpr int kExitConfigError = 2;
constexpr int kExitSimulationFailure = 3;

int cmd_run(const std::string& config_path, const std::string& out_dir, long seed_override,
            double duration_override, bool plots) {
  slamarm::SimulationConfig sim;
  try {
    slamarm::FlatConfig cfg =
        config_path.empty() ? slamarm::FlatConfig{} : slamarm::FlatConfig::parse_file(config_path);
    if (seed_override >= 0) cfg.set("sim.seed", std::to_string(seed_override));
    if (duration_override > 0) cfg.set("sim.duration", std::to_string(duration_override));
    sim = slamarm::load_scenario(cfg);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfigError;
  }

  slamarm::SimulationResult result;
  try {
    result = slamarm::run_simulation(sim);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "simulation failed: %s\n", e.what());
    return kExitSimulationFailure;
  }

  try {
    std::filesystem::create_directories(out_dir);
    const std::string stem =
        config_path.empty()
            ? std::string("scenario")
            : std::filesystem::path(config_path).stem().string();
    const std::string trace_path = out_dir + "/" + stem + "_trace.csv";
    const std::string report_path = out_dir + "/" + stem + "_report.txt";
    slamarm::write_file(trace_path, slamarm::trace_to_csv(result.trace));
    slamarm::write_file(report_path, slamarm::report_to_text(result.report));
    std::fprintf(stderr, "trace:  %s\nreport: %s\n", trace_path.c_str(), report_path.c_str());
    if (plots) {
      const auto table = slamarm::read_trace_csv(trace_path);
      for (const auto& p : slamarm::emit_plots(table, out_dir + "/" + stem)) {
        std::fprintf(stderr, "plot:   %s\n", p.c_str());
      }
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "output error: %s\n", e.what());
    return kExitSimulationFailure;
  }

  if (!result.report.all_pass()) {
    std::fprintf(stderr, "monitor failure (see report)\n");
    return kExitMonitorFailure;
  }
  return 0;
}

int cmd_verify(const std::string& suite) {
  std::vector<slamarm::SuiteResult> results;
  if (suite == "identities" || suite == "all") results.push_back(slamarm::verify_identities());
  if (suite == "gradients" || suite == "all") results.push_back(slamarm::verify_gradients());
  if (suite == "equivalence" || suite == "all") results.push_back(slamarm::verify_equivalence());
  if (suite == "dynamics" || suite == "all") results.push_back(slamarm::verify_dynamics());
  if (results.empty()) {
    std::fprintf(stderr, "unknown suite '%s' (identities|gradients|equivalence|dynamics|all)\n",
                 suite.c_str());
    return kExitConfigError;
  }
  bool ok = true;
  for (const auto& r : results) {
    slamarm::print_suite(r);
    ok = ok && r.ok();
  }
  return ok ? 0 : kExitMonitorFailure;
}

int cmd_plot(const std::string& trace_path, const std::string& out_dir) {
  try {
    const auto table = slamarm::read_trace_csv(trace_path);
    std::filesystem::create_directories(out_dir);
    const std::string stem = std::filesystem::path(trace_path).stem().string();
    for (const auto& p : slamarm::emit_plots(table, out_dir + "/" + stem)) {
      std::fprintf(stderr, "plot: %s\n", p.c_str());
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "plot error: %s\n", e.what());
    return kExitSimulationFailure;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hybrid task-space arm control with a SLAM-group pose observer"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out", suite = "all", trace_path;
  long seed = -1;
  double duration = -1.0;
  bool plots = false;

  auto* run = app.add_subcommand("run", "simulate a scenario and write trace/report");
  run->add_option("--config", config_path, "scenario config file (defaults when omitted)")
      ->envname("SLAMARM_CONFIG");
  run->add_option("--out", out_dir, "output directory")->envname("SLAMARM_OUT");
  run->add_option("--seed", seed, "override sim.seed")->envname("SLAMARM_SEED");
  run->add_option("--duration", duration, "override sim.duration [s]")
      ->envname("SLAMARM_DURATION");
  run->add_flag("--plots", plots, "also write the SVG figures");

  auto* verify = app.add_subcommand("verify", "run the built-in property suites");
  verify->add_option("--suite", suite, "identities|gradients|equivalence|dynamics|all")
      ->envname("SLAMARM_SUITE");

  auto* plot = app.add_subcommand("plot", "regenerate figures from a trace CSV");
  plot->add_option("trace", trace_path, "trace CSV path")->required();
  plot->add_option("--out", out_dir, "output directory")->envname("SLAMARM_OUT");

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) return cmd_run(config_path, out_dir, seed, duration, plots);
  if (verify->parsed()) return cmd_verify(suite);
  if (plot->parsed()) return cmd_plot(trace_path, out_dir);
  return kExitConfigError;
}
