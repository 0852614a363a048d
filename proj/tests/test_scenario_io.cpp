#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <doctest.h>
#include <json.hpp>

#include "parkmpc/errors.hpp"
#include "parkmpc/scenario_io.hpp"

using namespace parkmpc;
using nlohmann::json;

namespace {

std::filesystem::path fresh_temp_dir() {
  const auto dir = std::filesystem::temp_directory_path() / "parkmpc_io_tests";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

json waypoint_array(int n, double spacing = 1.0) {
  json arr = json::array();
  for (int i = 0; i < n; ++i) {
    arr.push_back({{"x", i * spacing}, {"y", 0.0}, {"theta", 0.0}, {"v", 1.0}});
  }
  return arr;
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    lines.push_back(line);
  }
  return lines;
}

}  // namespace

TEST_CASE("inline waypoints with defaults everywhere else") {
  json doc;
  doc["trajectory"] = waypoint_array(5);
  doc["trajectory"][0] = {{"x", 0.5}, {"y", -0.25}, {"theta", 0.1}, {"v", 1.2}};

  const Scenario scn = parse_scenario(doc.dump(), ".");
  CHECK(scn.trajectory.size() == 5);
  CHECK(scn.initial_state.x == 0.5);
  CHECK(scn.initial_state.y == -0.25);
  CHECK(scn.initial_state.theta == 0.1);
  CHECK(scn.initial_state.v == 1.2);  // starts at the first waypoint's speed
  CHECK(scn.vehicle.wheelbase == 2.7);
  CHECK(scn.mpc.prediction_horizon == 20);
  CHECK(scn.mpc.control_horizon == 5);
  CHECK(scn.duration == 30.0);
  CHECK(scn.actuation_delay_steps == 1);
}

TEST_CASE("every section key lands on its field") {
  json doc;
  doc["trajectory"] = waypoint_array(5);
  doc["initial_state"] = {{"x", 9.0}, {"y", 8.0}, {"v", 0.5}, {"theta", -0.2}};
  doc["vehicle"] = {{"L", 3.1},        {"T_s", 0.1},         {"delta_max", 0.5},
                    {"a_max", 1.5},    {"a_min", -1.0},      {"d_delta_max", 0.04},
                    {"d_a_max", 0.4},  {"v_floor", 0.02}};
  doc["mpc"] = {{"N_p", 15},
                {"N_c", 4},
                {"r_w", 2.5},
                {"preview_mode", "hold"},
                {"output_mode", "velocity_passthrough"},
                {"resample_spacing", 0.2}};
  doc["sim"] = {{"duration", 12.5}, {"actuation_delay_steps", 3}};

  const Scenario scn = parse_scenario(doc.dump(), ".");
  CHECK(scn.initial_state.x == 9.0);
  CHECK(scn.initial_state.v == 0.5);
  CHECK(scn.vehicle.wheelbase == 3.1);
  CHECK(scn.vehicle.sample_time == 0.1);
  CHECK(scn.vehicle.delta_max == 0.5);
  CHECK(scn.vehicle.a_max == 1.5);
  CHECK(scn.vehicle.a_min == -1.0);
  CHECK(scn.vehicle.d_delta_max == 0.04);
  CHECK(scn.vehicle.d_a_max == 0.4);
  CHECK(scn.vehicle.v_floor == 0.02);
  CHECK(scn.mpc.prediction_horizon == 15);
  CHECK(scn.mpc.control_horizon == 4);
  CHECK(scn.mpc.input_weight == 2.5);
  CHECK(scn.mpc.preview_mode == PreviewMode::hold);
  CHECK(scn.mpc.output_mode == OutputMode::velocity_passthrough);
  CHECK(scn.mpc.resample_spacing == 0.2);
  CHECK(scn.duration == 12.5);
  CHECK(scn.actuation_delay_steps == 3);
}

TEST_CASE("generated maneuver section matches the generator") {
  const Scenario parsed = parse_scenario(R"({"trajectory": {"s_curve": {}}})", ".");
  const Scenario direct = make_s_curve_scenario(3.0, 15.0, 2.0);
  CHECK(parsed.trajectory.size() == direct.trajectory.size());
  CHECK(parsed.initial_state.x == direct.initial_state.x);
  CHECK(parsed.duration == direct.duration);

  const Scenario custom = parse_scenario(
      R"({"trajectory": {"s_curve": {"lateral_offset": 2.0,
                                     "transition_length": 10.0,
                                     "cruise_speed": 1.0}}})",
      ".");
  const Scenario want = make_s_curve_scenario(2.0, 10.0, 1.0);
  CHECK(custom.trajectory.size() == want.trajectory.size());
  CHECK(custom.trajectory.length() == want.trajectory.length());
}

TEST_CASE("waypoints can come from a referenced file") {
  const auto dir = fresh_temp_dir();
  {
    std::ofstream out(dir / "wps.json");
    out << waypoint_array(6).dump();
  }
  const Scenario scn = parse_scenario(R"({"trajectory": {"file": "wps.json"}})", dir);
  CHECK(scn.trajectory.size() == 6);
  CHECK(scn.initial_state.v == 1.0);

  CHECK_THROWS_AS(parse_scenario(R"({"trajectory": {"file": "missing.json"}})", dir), IoError);

  {
    std::ofstream out(dir / "garbage.json");
    out << "not json";
  }
  CHECK_THROWS_AS(parse_scenario(R"({"trajectory": {"file": "garbage.json"}})", dir),
                  ConfigError);
}

TEST_CASE("dotted overrides rewrite the document before extraction") {
  const std::string text = R"({"trajectory": {"s_curve": {}}})";
  const Scenario scn = parse_scenario(
      text, ".",
      {"mpc.r_w=5.0", "vehicle.delta_max=0.1", "sim.duration=12", "mpc.preview_mode=hold",
       "mpc.N_p=12", "mpc.output_mode=\"velocity_passthrough\""});
  CHECK(scn.mpc.input_weight == 5.0);
  CHECK(scn.vehicle.delta_max == 0.1);
  CHECK(scn.duration == 12.0);
  CHECK(scn.mpc.preview_mode == PreviewMode::hold);  // bare word stays a string
  CHECK(scn.mpc.prediction_horizon == 12);
  CHECK(scn.mpc.output_mode == OutputMode::velocity_passthrough);
}

TEST_CASE("malformed overrides are rejected") {
  const std::string text = R"({"trajectory": {"s_curve": {}}})";
  CHECK_THROWS_AS(parse_scenario(text, ".", {"mpc.r_w"}), ConfigError);
  CHECK_THROWS_AS(parse_scenario(text, ".", {"=5"}), ConfigError);
  CHECK_THROWS_AS(parse_scenario(text, ".", {"mpc..r_w=5"}), ConfigError);

  json doc;
  doc["trajectory"] = waypoint_array(5);
  // the trajectory value is an array; the path cannot descend into it
  CHECK_THROWS_AS(parse_scenario(doc.dump(), ".", {"trajectory.x=1"}), ConfigError);
}

TEST_CASE("unknown keys anywhere are an error") {
  json doc;
  doc["trajectory"] = waypoint_array(5);
  doc["extra"] = 1;
  CHECK_THROWS_AS(parse_scenario(doc.dump(), "."), ConfigError);

  doc.erase("extra");
  doc["vehicle"] = {{"mass", 1200.0}};
  CHECK_THROWS_AS(parse_scenario(doc.dump(), "."), ConfigError);

  doc.erase("vehicle");
  doc["trajectory"][1]["z"] = 0.0;
  CHECK_THROWS_AS(parse_scenario(doc.dump(), "."), ConfigError);
}

TEST_CASE("malformed documents are rejected with config errors") {
  CHECK_THROWS_AS(parse_scenario("{nope", "."), ConfigError);
  CHECK_THROWS_AS(parse_scenario("[1, 2]", "."), ConfigError);
  CHECK_THROWS_AS(parse_scenario("{}", "."), ConfigError);
  CHECK_THROWS_AS(parse_scenario(R"({"trajectory": "road.csv"})", "."), ConfigError);

  json doc;
  doc["trajectory"] = waypoint_array(5);
  doc["trajectory"][2].erase("v");
  CHECK_THROWS_AS(parse_scenario(doc.dump(), "."), ConfigError);

  doc["trajectory"] = waypoint_array(5);
  doc["mpc"] = {{"N_p", 2.5}};  // horizons must be integers
  CHECK_THROWS_AS(parse_scenario(doc.dump(), "."), ConfigError);

  doc["mpc"] = {{"preview_mode", "sideways"}};
  CHECK_THROWS_AS(parse_scenario(doc.dump(), "."), ConfigError);
  doc["mpc"] = {{"preview_mode", 42}};
  CHECK_THROWS_AS(parse_scenario(doc.dump(), "."), ConfigError);
}

TEST_CASE("violation listing reports every problem, not just the first") {
  Scenario scn = make_s_curve_scenario(3.0, 15.0, 2.0);
  CHECK(collect_violations(scn).empty());

  scn.mpc.control_horizon = scn.mpc.prediction_horizon + 5;
  scn.duration = -1.0;
  const std::vector<std::string> problems = collect_violations(scn);
  REQUIRE(problems.size() == 2);
  CHECK(problems[0].find("N_c") != std::string::npos);
  CHECK(problems[1].find("duration") != std::string::npos);
}

TEST_CASE("the configuration echo is parseable and complete") {
  const Scenario scn = parse_scenario(R"({"trajectory": {"s_curve": {}}})", ".");
  const json j = json::parse(scenario_echo(scn));
  CHECK(j.at("mpc").at("N_p") == 20);
  CHECK(j.at("mpc").at("r_w") == 0.5);
  CHECK(j.at("vehicle").at("L") == 2.7);
  CHECK(j.at("vehicle").at("T_s") == 0.05);
  CHECK(j.at("sim").at("actuation_delay_steps") == 1);
  CHECK(j.at("trajectory").at("waypoints") == scn.trajectory.size());
  CHECK(j.at("initial_state").at("v") == 0.0);
}

TEST_CASE("trace rows survive a text round trip") {
  SimResult result;
  SimSample s;
  s.t = 0.0;
  s.state.x = 1.0 / 3.0;
  s.state.y = -2.0 / 7.0;
  s.state.theta = std::numbers::pi / 6.0;
  s.state.v = 0.1234567890123456789;
  s.command.delta_cmd = -0.05;
  s.command.a_cmd = 0.375;
  s.cross_track_error = 1e-13;
  s.heading_error = -1e-7;
  s.qp_iterations = 7;
  s.constraint_active = true;
  result.samples.push_back(s);
  s.t = 0.05;
  s.constraint_active = false;
  s.qp_iterations = 0;
  result.samples.push_back(s);

  const auto dir = fresh_temp_dir();
  const auto path = dir / "trace.csv";
  write_trace_csv(result, path);

  const std::vector<std::string> lines = read_lines(path);
  REQUIRE(lines.size() == 3);
  CHECK(lines[0] ==
        "t,x,y,theta,v,delta_cmd,a_cmd,cross_track_err,heading_err,qp_iters,constraint_active");

  std::vector<std::string> fields;
  std::stringstream row(lines[1]);
  std::string field;
  while (std::getline(row, field, ',')) {
    fields.push_back(field);
  }
  REQUIRE(fields.size() == 11);
  const SimSample& ref = result.samples[0];
  const double want[9] = {ref.t,
                          ref.state.x,
                          ref.state.y,
                          ref.state.theta,
                          ref.state.v,
                          ref.command.delta_cmd,
                          ref.command.a_cmd,
                          ref.cross_track_error,
                          ref.heading_error};
  for (int i = 0; i < 9; ++i) {
    CHECK(std::strtod(fields[static_cast<std::size_t>(i)].c_str(), nullptr) == want[i]);
  }
  CHECK(fields[9] == "7");
  CHECK(fields[10] == "1");
  CHECK(lines[2].back() == '0');  // second row: constraint inactive
}

TEST_CASE("metrics serialize with all seven fields") {
  Metrics m;
  m.max_cross_track = 0.25;
  m.rms_cross_track = 0.1;
  m.max_overshoot = -0.25;
  m.final_position_error = 0.03;
  m.final_speed = 0.001;
  m.max_steering_rate = 0.0179;
  m.steps_at_constraint = 42;

  const auto dir = fresh_temp_dir();
  const auto path = dir / "metrics.json";
  write_metrics_json(m, path);

  std::ifstream in(path);
  const json j = json::parse(in);
  CHECK(j.at("max_cross_track") == 0.25);
  CHECK(j.at("rms_cross_track") == 0.1);
  CHECK(j.at("max_overshoot") == -0.25);
  CHECK(j.at("final_position_error") == 0.03);
  CHECK(j.at("final_speed") == 0.001);
  CHECK(j.at("max_steering_rate") == 0.0179);
  CHECK(j.at("steps_at_constraint") == 42);
}

TEST_CASE("unwritable or missing paths raise io errors") {
  CHECK_THROWS_AS(write_trace_csv(SimResult{}, "/nonexistent_dir_for_tests/trace.csv"), IoError);
  CHECK_THROWS_AS(write_metrics_json(Metrics{}, "/nonexistent_dir_for_tests/m.json"), IoError);
  CHECK_THROWS_AS(load_scenario_file("/nonexistent_dir_for_tests/scn.json"), IoError);
}
