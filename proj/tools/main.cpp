#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "parkmpc/errors.hpp"
#include "parkmpc/scenario_io.hpp"
#include "parkmpc/simulation.hpp"
#include "parkmpc/svg_plot.hpp"

namespace {

namespace fs = std::filesystem;
using namespace parkmpc;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitSim = 3;
constexpr int kExitIo = 4;

void write_plots(const Scenario& scenario, const SimResult& result, const fs::path& dir) {
  PlotSeries ref_path{"reference", "#888888", {}, {}};
  for (const Waypoint& w : scenario.trajectory.waypoints()) {
    ref_path.x.push_back(w.x);
    ref_path.y.push_back(w.y);
  }
  PlotSeries act_path{"actual", "#c0392b", {}, {}};
  PlotSeries steer{"delta_cmd", "#2471a3", {}, {}};
  PlotSeries v_ref{"reference", "#888888", {}, {}};
  PlotSeries v_act{"actual", "#1e8449", {}, {}};
  for (const SimSample& s : result.samples) {
    act_path.x.push_back(s.state.x);
    act_path.y.push_back(s.state.y);
    steer.x.push_back(s.t);
    steer.y.push_back(s.command.delta_cmd);
    v_ref.x.push_back(s.t);
    v_ref.y.push_back(s.state.v - s.v_error);
    v_act.x.push_back(s.t);
    v_act.y.push_back(s.state.v);
  }
  write_line_plot(dir / "path.svg", "vehicle path", "x [m]", "y [m]",
                  {ref_path, act_path}, /*equal_axes=*/true);
  write_line_plot(dir / "steering.svg", "commanded road-wheel angle", "t [s]", "delta [rad]",
                  {steer});
  write_line_plot(dir / "speed.svg", "longitudinal speed", "t [s]", "v [m/s]",
                  {v_ref, v_act});
}

int run_command(const std::string& scenario_path, const std::string& out_dir, bool plots,
                const std::vector<std::string>& overrides) {
  if (!fs::exists(scenario_path)) {
    std::cerr << "scenario not found: " << scenario_path << "\n";
    return kExitConfig;
  }
  const Scenario scenario = load_scenario_file(scenario_path, overrides);
  validate(scenario);

  const SimResult result = run_closed_loop(scenario);
  const Metrics metrics = compute_metrics(result, scenario.trajectory);

  const fs::path dir(out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
  }
  write_trace_csv(result, dir / "trace.csv");
  write_metrics_json(metrics, dir / "metrics.json");
  if (plots) {
    write_plots(scenario, result, dir);
  }

  if (result.failed) {
    std::cerr << "simulation failed: " << result.failure_reason << "\n";
    return kExitSim;
  }
  std::printf(
      "%zu samples, reached_goal=%d, final_position_error=%.4f m, final_speed=%.4f m/s, "
      "max_cross_track=%.4f m -> %s\n",
      result.samples.size(), result.reached_goal ? 1 : 0, metrics.final_position_error,
      metrics.final_speed, metrics.max_cross_track, dir.string().c_str());
  return kExitOk;
}

int validate_command(const std::string& scenario_path,
                     const std::vector<std::string>& overrides) {
  if (!fs::exists(scenario_path)) {
    std::cerr << "scenario not found: " << scenario_path << "\n";
    return kExitConfig;
  }
  const Scenario scenario = load_scenario_file(scenario_path, overrides);
  const std::vector<std::string> violations = collect_violations(scenario);
  if (!violations.empty()) {
    for (const std::string& v : violations) {
      std::cerr << "invalid: " << v << "\n";
    }
    return kExitConfig;
  }
  std::cout << scenario_echo(scenario) << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kinematic-bicycle MPC path-tracking simulator"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string out_dir = "out";
  bool plots = false;
  std::vector<std::string> overrides;

  CLI::App* run = app.add_subcommand("run", "simulate a scenario and write trace/metrics");
  run->add_option("scenario", scenario_path, "scenario JSON file")->required();
  run->add_option("--out", out_dir, "output directory (default: out)");
  run->add_flag("--plots", plots, "also write path/steering/speed SVG plots");
  run->add_option("--override", overrides, "dotted-path override, e.g. mpc.r_w=5.0");

  CLI::App* val = app.add_subcommand("validate", "check a scenario file without simulating");
  val->add_option("scenario", scenario_path, "scenario JSON file")->required();
  val->add_option("--override", overrides, "dotted-path override, e.g. mpc.r_w=5.0");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (run->parsed()) {
      return run_command(scenario_path, out_dir, plots, overrides);
    }
    return validate_command(scenario_path, overrides);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "simulation error: " << e.what() << "\n";
    return kExitSim;
  }
}
