#include "parkmpc/scenario_io.hpp"

#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <sstream>
#include <string>

#include <json.hpp>

#include "parkmpc/errors.hpp"

namespace parkmpc {
namespace {

using nlohmann::json;

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot read " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void check_keys(const json& obj, const std::string& section,
                std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (const char* a : allowed) {
      if (key == a) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw ConfigError("unknown key " + section + "." + key);
    }
  }
}

double require_number(const json& obj, const std::string& where) {
  if (!obj.is_number()) {
    throw ConfigError(where + " must be a number");
  }
  return obj.get<double>();
}

void read_number(const json& obj, const std::string& section, const char* key, double& out) {
  if (obj.contains(key)) {
    out = require_number(obj.at(key), section + "." + std::string(key));
  }
}

void read_integer(const json& obj, const std::string& section, const char* key, int& out) {
  if (obj.contains(key)) {
    const json& v = obj.at(key);
    if (!v.is_number_integer()) {
      throw ConfigError(section + "." + std::string(key) + " must be an integer");
    }
    out = v.get<int>();
  }
}

std::vector<Waypoint> waypoints_from_array(const json& arr, const std::string& where) {
  if (!arr.is_array()) {
    throw ConfigError(where + " must be an array of waypoints");
  }
  std::vector<Waypoint> wps;
  wps.reserve(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const json& p = arr[i];
    const std::string item = where + "[" + std::to_string(i) + "]";
    if (!p.is_object()) {
      throw ConfigError(item + " must be an object with x, y, theta, v");
    }
    check_keys(p, item, {"x", "y", "theta", "v"});
    Waypoint w;
    for (const char* key : {"x", "y", "theta", "v"}) {
      if (!p.contains(key)) {
        throw ConfigError(item + " is missing \"" + key + "\"");
      }
    }
    w.x = require_number(p.at("x"), item + ".x");
    w.y = require_number(p.at("y"), item + ".y");
    w.theta = require_number(p.at("theta"), item + ".theta");
    w.v = require_number(p.at("v"), item + ".v");
    wps.push_back(w);
  }
  return wps;
}

void apply_override(json& doc, const std::string& assignment) {
  const std::size_t eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("override must look like section.key=value, got \"" + assignment + "\"");
  }
  const std::string path = assignment.substr(0, eq);
  const std::string value = assignment.substr(eq + 1);

  json parsed;
  try {
    parsed = json::parse(value);
  } catch (const json::parse_error&) {
    parsed = value;  // bare strings stay strings
  }

  json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = path.find('.', start);
    const std::string part = path.substr(start, dot - start);
    if (part.empty()) {
      throw ConfigError("override path has an empty segment: " + path);
    }
    if (!node->is_object() && !node->is_null()) {
      throw ConfigError("override path " + path + " descends into a non-object");
    }
    if (dot == std::string::npos) {
      (*node)[part] = parsed;
      return;
    }
    node = &(*node)[part];
    start = dot + 1;
  }
}

}  // namespace

Scenario parse_scenario(const std::string& json_text, const std::filesystem::path& base_dir,
                        const std::vector<std::string>& overrides) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("scenario is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) {
    throw ConfigError("scenario must be a JSON object");
  }
  for (const std::string& o : overrides) {
    apply_override(doc, o);
  }
  check_keys(doc, "scenario", {"trajectory", "initial_state", "vehicle", "mpc", "sim"});
  if (!doc.contains("trajectory")) {
    throw ConfigError("scenario is missing the trajectory section");
  }

  // the trajectory section decides the baseline scenario
  std::optional<Scenario> base;
  const json& tj = doc.at("trajectory");
  if (tj.is_array()) {
    std::vector<Waypoint> wps = waypoints_from_array(tj, "trajectory");
    Trajectory traj{std::move(wps)};
    VehicleState init;
    init.x = traj.waypoints().front().x;
    init.y = traj.waypoints().front().y;
    init.v = traj.waypoints().front().v;
    init.theta = traj.waypoints().front().theta;
    base.emplace(Scenario{std::move(traj), init, VehicleParams{}, MpcConfig{}, 30.0, 1});
  } else if (tj.is_object() && tj.contains("file")) {
    check_keys(tj, "trajectory", {"file"});
    if (!tj.at("file").is_string()) {
      throw ConfigError("trajectory.file must be a string path");
    }
    const std::filesystem::path wp_path =
        base_dir / std::filesystem::path(tj.at("file").get<std::string>());
    json wp_doc;
    try {
      wp_doc = json::parse(read_text_file(wp_path));
    } catch (const json::parse_error& e) {
      throw ConfigError("waypoint file " + wp_path.string() + " is not valid JSON: " + e.what());
    }
    std::vector<Waypoint> wps = waypoints_from_array(wp_doc, "waypoint file");
    Trajectory traj{std::move(wps)};
    VehicleState init;
    init.x = traj.waypoints().front().x;
    init.y = traj.waypoints().front().y;
    init.v = traj.waypoints().front().v;
    init.theta = traj.waypoints().front().theta;
    base.emplace(Scenario{std::move(traj), init, VehicleParams{}, MpcConfig{}, 30.0, 1});
  } else if (tj.is_object() && tj.contains("s_curve")) {
    check_keys(tj, "trajectory", {"s_curve"});
    const json& sc = tj.at("s_curve");
    check_keys(sc, "trajectory.s_curve",
               {"lateral_offset", "transition_length", "cruise_speed"});
    double offset = 3.0;
    double length = 15.0;
    double cruise = 2.0;
    read_number(sc, "trajectory.s_curve", "lateral_offset", offset);
    read_number(sc, "trajectory.s_curve", "transition_length", length);
    read_number(sc, "trajectory.s_curve", "cruise_speed", cruise);
    base.emplace(make_s_curve_scenario(offset, length, cruise));
  } else {
    throw ConfigError(
        "trajectory must be a waypoint array, {\"file\": ...}, or {\"s_curve\": ...}");
  }

  Scenario scenario = std::move(*base);

  if (doc.contains("initial_state")) {
    const json& is = doc.at("initial_state");
    check_keys(is, "initial_state", {"x", "y", "v", "theta"});
    read_number(is, "initial_state", "x", scenario.initial_state.x);
    read_number(is, "initial_state", "y", scenario.initial_state.y);
    read_number(is, "initial_state", "v", scenario.initial_state.v);
    read_number(is, "initial_state", "theta", scenario.initial_state.theta);
  }
  if (doc.contains("vehicle")) {
    const json& v = doc.at("vehicle");
    check_keys(v, "vehicle",
               {"L", "T_s", "delta_max", "a_max", "a_min", "d_delta_max", "d_a_max", "v_floor"});
    read_number(v, "vehicle", "L", scenario.vehicle.wheelbase);
    read_number(v, "vehicle", "T_s", scenario.vehicle.sample_time);
    read_number(v, "vehicle", "delta_max", scenario.vehicle.delta_max);
    read_number(v, "vehicle", "a_max", scenario.vehicle.a_max);
    read_number(v, "vehicle", "a_min", scenario.vehicle.a_min);
    read_number(v, "vehicle", "d_delta_max", scenario.vehicle.d_delta_max);
    read_number(v, "vehicle", "d_a_max", scenario.vehicle.d_a_max);
    read_number(v, "vehicle", "v_floor", scenario.vehicle.v_floor);
  }
  if (doc.contains("mpc")) {
    const json& m = doc.at("mpc");
    check_keys(m, "mpc",
               {"N_p", "N_c", "r_w", "preview_mode", "output_mode", "resample_spacing"});
    read_integer(m, "mpc", "N_p", scenario.mpc.prediction_horizon);
    read_integer(m, "mpc", "N_c", scenario.mpc.control_horizon);
    read_number(m, "mpc", "r_w", scenario.mpc.input_weight);
    read_number(m, "mpc", "resample_spacing", scenario.mpc.resample_spacing);
    if (m.contains("preview_mode")) {
      const std::string mode = m.at("preview_mode").is_string()
                                   ? m.at("preview_mode").get<std::string>()
                                   : std::string();
      if (mode == "advancing") {
        scenario.mpc.preview_mode = PreviewMode::advancing;
      } else if (mode == "hold") {
        scenario.mpc.preview_mode = PreviewMode::hold;
      } else {
        throw ConfigError("mpc.preview_mode must be \"advancing\" or \"hold\"");
      }
    }
    if (m.contains("output_mode")) {
      const std::string mode = m.at("output_mode").is_string()
                                   ? m.at("output_mode").get<std::string>()
                                   : std::string();
      if (mode == "acceleration") {
        scenario.mpc.output_mode = OutputMode::acceleration;
      } else if (mode == "velocity_passthrough") {
        scenario.mpc.output_mode = OutputMode::velocity_passthrough;
      } else {
        throw ConfigError("mpc.output_mode must be \"acceleration\" or \"velocity_passthrough\"");
      }
    }
  }
  if (doc.contains("sim")) {
    const json& s = doc.at("sim");
    check_keys(s, "sim", {"duration", "actuation_delay_steps"});
    read_number(s, "sim", "duration", scenario.duration);
    read_integer(s, "sim", "actuation_delay_steps", scenario.actuation_delay_steps);
  }
  return scenario;
}

Scenario load_scenario_file(const std::filesystem::path& path,
                            const std::vector<std::string>& overrides) {
  return parse_scenario(read_text_file(path), path.parent_path(), overrides);
}

std::vector<std::string> collect_violations(const Scenario& scenario) {
  std::vector<std::string> out;
  const auto record = [&out](const auto& check) {
    try {
      check();
    } catch (const ConfigError& e) {
      out.emplace_back(e.what());
    }
  };
  record([&] { validate(scenario.vehicle); });
  record([&] { validate(scenario.mpc); });
  record([&] {
    if (!(scenario.duration > 0.0) || !std::isfinite(scenario.duration)) {
      throw ConfigError("sim.duration must be > 0");
    }
  });
  record([&] {
    if (scenario.actuation_delay_steps < 0) {
      throw ConfigError("sim.actuation_delay_steps must be >= 0");
    }
  });
  record([&] {
    const VehicleState& s = scenario.initial_state;
    if (!(std::isfinite(s.x) && std::isfinite(s.y) && std::isfinite(s.v) &&
          std::isfinite(s.theta))) {
      throw ConfigError("sim.initial_state must be finite");
    }
  });
  record([&] {
    const auto& arcs = scenario.trajectory.arclength();
    for (std::size_t i = 1; i < arcs.size(); ++i) {
      const double gap = arcs[i] - arcs[i - 1];
      if (gap < 0.25 - 1e-9 || gap > 2.0 + 1e-9) {
        throw ConfigError("trajectory waypoints must be 0.25-2.0 m apart (violated at index " +
                          std::to_string(i) + ")");
      }
    }
  });
  return out;
}

std::string scenario_echo(const Scenario& sc) {
  json j;
  j["trajectory"]["waypoints"] = sc.trajectory.size();
  j["trajectory"]["length_m"] = sc.trajectory.length();
  j["initial_state"] = {{"x", sc.initial_state.x},
                        {"y", sc.initial_state.y},
                        {"v", sc.initial_state.v},
                        {"theta", sc.initial_state.theta}};
  j["vehicle"] = {{"L", sc.vehicle.wheelbase},
                  {"T_s", sc.vehicle.sample_time},
                  {"delta_max", sc.vehicle.delta_max},
                  {"a_max", sc.vehicle.a_max},
                  {"a_min", sc.vehicle.a_min},
                  {"d_delta_max", sc.vehicle.d_delta_max},
                  {"d_a_max", sc.vehicle.d_a_max},
                  {"v_floor", sc.vehicle.v_floor}};
  j["mpc"] = {{"N_p", sc.mpc.prediction_horizon},
              {"N_c", sc.mpc.control_horizon},
              {"r_w", sc.mpc.input_weight},
              {"preview_mode", sc.mpc.preview_mode == PreviewMode::advancing ? "advancing" : "hold"},
              {"output_mode", sc.mpc.output_mode == OutputMode::acceleration
                                  ? "acceleration"
                                  : "velocity_passthrough"},
              {"resample_spacing", sc.mpc.resample_spacing}};
  j["sim"] = {{"duration", sc.duration},
              {"actuation_delay_steps", sc.actuation_delay_steps}};
  return j.dump(2);
}

void write_trace_csv(const SimResult& result, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot write " + path.string());
  }
  out << "t,x,y,theta,v,delta_cmd,a_cmd,cross_track_err,heading_err,qp_iters,"
         "constraint_active\n";
  char buf[512];
  for (const SimSample& s : result.samples) {
    std::snprintf(buf, sizeof(buf),
                  "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d,%d\n", s.t,
                  s.state.x, s.state.y, s.state.theta, s.state.v, s.command.delta_cmd,
                  s.command.a_cmd, s.cross_track_error, s.heading_error, s.qp_iterations,
                  s.constraint_active ? 1 : 0);
    out << buf;
  }
  if (!out) {
    throw IoError("failed while writing " + path.string());
  }
}

void write_metrics_json(const Metrics& m, const std::filesystem::path& path) {
  json j = {{"max_cross_track", m.max_cross_track},
            {"rms_cross_track", m.rms_cross_track},
            {"max_overshoot", m.max_overshoot},
            {"final_position_error", m.final_position_error},
            {"final_speed", m.final_speed},
            {"max_steering_rate", m.max_steering_rate},
            {"steps_at_constraint", m.steps_at_constraint}};
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot write " + path.string());
  }
  out << j.dump(2) << "\n";
  if (!out) {
    throw IoError("failed while writing " + path.string());
  }
}

}  // namespace parkmpc
