#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <optional>

#include "parkmpc/qp_solver.hpp"
#include "parkmpc/trajectory.hpp"
#include "parkmpc/vehicle_model.hpp"

namespace parkmpc {

enum class OutputMode { acceleration, velocity_passthrough };

struct MpcConfig {
  int prediction_horizon{20};
  int control_horizon{5};
  double input_weight{0.5};  // penalty on input increments; > 0 for a definite QP
  PreviewMode preview_mode{PreviewMode::advancing};
  OutputMode output_mode{OutputMode::acceleration};
  double resample_spacing{0.1};  // local densification step [m]
};

/// Throws ConfigError when a field violates its admissible range.
void validate(const MpcConfig& cfg);

/// Incremental state-space form: the state stacks the plant-state
/// increment (4) on top of the tracked outputs (3), so the input
/// increment becomes the decision variable and integral action on the
/// outputs comes for free.
struct AugmentedModel {
  Eigen::Matrix<double, 7, 7> A;
  Eigen::Matrix<double, 7, 2> B;
  Eigen::Matrix<double, 3, 7> C;
};

AugmentedModel build_augmented(const LinearModel& model);

/// Stacked horizon maps: predicted outputs over the prediction horizon
/// are free_response * x_aug + forced_response * du, where du stacks the
/// input increments over the control horizon.
struct PredictionMatrices {
  Eigen::MatrixXd free_response;    // (N_p*3) x 7
  Eigen::MatrixXd forced_response;  // (N_p*3) x (N_c*2), block lower triangular
};

/// Throws ConfigError unless 1 <= control_horizon <= prediction_horizon.
PredictionMatrices build_prediction(const AugmentedModel& aug, int prediction_horizon,
                                    int control_horizon);

/// Closed-form minimizer of the tracking cost without inequality
/// constraints. Throws SolverError when the normal matrix is singular
/// (possible only with input_weight = 0 and rank-deficient
/// forced_response).
Eigen::VectorXd solve_unconstrained(const PredictionMatrices& pred,
                                    const Eigen::VectorXd& reference,
                                    const Eigen::Matrix<double, 7, 1>& augmented_state,
                                    double input_weight);

/// Builds the constrained program over the input increments: quadratic
/// tracking cost plus, per horizon step and input channel, two-sided
/// per-step rate bounds and two-sided amplitude bounds on the
/// accumulated input (block lower-triangular sums started at
/// previous_input). Steering bounds live in the tan domain. Eight rows
/// per control-horizon step. Requires input_weight > 0.
QpProblem assemble_qp(const PredictionMatrices& pred, const Eigen::VectorXd& reference,
                      const Eigen::Matrix<double, 7, 1>& augmented_state, double input_weight,
                      const ControlInput& previous_input, const VehicleParams& params,
                      int control_horizon);

/// False when previous_input sits so far outside the amplitude box that
/// no admissible increment sequence can re-enter it within the control
/// horizon; the QP is then infeasible and the command relies on the
/// output clamp.
bool amplitude_bounds_reachable(const ControlInput& previous_input, const VehicleParams& params,
                                int control_horizon);

struct ControlDiagnostics {
  Eigen::VectorXd predicted_outputs;  // stacked (y, v, theta) over the prediction horizon
  Eigen::Vector2d applied_increment{0.0, 0.0};  // (d_accel, d_tan_delta) actually applied
  int qp_iterations{0};
  bool constraint_active{false};  // any positive multiplier, or the output clamp engaged
  bool degraded{false};  // dual sweeps hit the cap unconverged, or amplitude box unreachable
  Eigen::Matrix<double, 7, 1> augmented_state;
  std::size_t nearest_index{0};
};

struct ControlCommand {
  double delta_cmd{0.0};  // road-wheel angle [rad], |delta_cmd| <= delta_max
  double a_cmd{0.0};      // [m/s^2], consumed in acceleration mode
  double v_cmd{0.0};      // [m/s], consumed in velocity passthrough mode
  ControlDiagnostics diag;
};

/// Per-controller persistent data. previous_input starts at (0, 0);
/// previous_state is empty before the first tick, which zeroes the
/// increment block of the augmented state.
struct ControllerState {
  ControlInput previous_input{};
  std::optional<Eigen::Vector4d> previous_state;
};

/// One receding-horizon tick: locate the nearest waypoint, densify the
/// path around it, build the speed-integrated reference preview,
/// re-linearize the plant, solve the constrained program, and apply only
/// the first input increment. The first-step command is always re-clamped
/// to the rate and amplitude boxes before output, so emitted commands
/// respect the bounds even when the solver stops early.
ControlCommand control_step(ControllerState& ctrl, const VehicleState& state,
                            const Trajectory& traj, const MpcConfig& cfg,
                            const VehicleParams& params);

}  // namespace parkmpc
