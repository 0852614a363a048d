#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "parkmpc/simulation.hpp"

namespace parkmpc {

/// Parses a scenario document. The JSON has a mandatory `trajectory`
/// section (inline waypoint array, {"file": path} pointing at a waypoint
/// array, or {"s_curve": {lateral_offset, transition_length,
/// cruise_speed}}) and optional `initial_state`, `vehicle`, `mpc`, and
/// `sim` sections. Dotted-path overrides ("mpc.r_w=5.0") are applied to
/// the document before extraction. Unknown keys are rejected. Throws
/// ConfigError on malformed input, IoError when a referenced waypoint
/// file cannot be read.
Scenario parse_scenario(const std::string& json_text, const std::filesystem::path& base_dir,
                        const std::vector<std::string>& overrides = {});

/// parse_scenario on a file's contents; base_dir is the file's parent.
Scenario load_scenario_file(const std::filesystem::path& path,
                            const std::vector<std::string>& overrides = {});

/// Every violated scenario invariant as a human-readable line; empty
/// when the scenario is valid. Unlike validate(), does not stop at the
/// first problem.
std::vector<std::string> collect_violations(const Scenario& scenario);

/// Normalized dump of the effective configuration (JSON text).
std::string scenario_echo(const Scenario& scenario);

/// Writes the per-tick trace with columns t, x, y, theta, v, delta_cmd,
/// a_cmd, cross_track_err, heading_err, qp_iters, constraint_active.
void write_trace_csv(const SimResult& result, const std::filesystem::path& path);

void write_metrics_json(const Metrics& metrics, const std::filesystem::path& path);

}  // namespace parkmpc
