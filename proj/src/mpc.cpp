#include "parkmpc/mpc.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <vector>

#include "parkmpc/angles.hpp"
#include "parkmpc/errors.hpp"

namespace parkmpc {

void validate(const MpcConfig& cfg) {
  if (cfg.control_horizon < 1 || cfg.prediction_horizon < cfg.control_horizon) {
    throw ConfigError("mpc horizons must satisfy 1 <= N_c <= N_p");
  }
  if (!(cfg.input_weight >= 0.0)) {
    throw ConfigError("mpc.r_w must be >= 0");
  }
  if (!(cfg.resample_spacing > 0.0)) {
    throw ConfigError("mpc.resample_spacing must be > 0");
  }
}

AugmentedModel build_augmented(const LinearModel& m) {
  AugmentedModel aug;
  aug.A.setZero();
  aug.A.topLeftCorner<4, 4>() = m.A;
  aug.A.bottomLeftCorner<3, 4>() = m.C * m.A;
  aug.A.bottomRightCorner<3, 3>().setIdentity();

  aug.B.topRows<4>() = m.B;
  aug.B.bottomRows<3>() = m.C * m.B;

  aug.C.setZero();
  aug.C.rightCols<3>().setIdentity();
  return aug;
}

PredictionMatrices build_prediction(const AugmentedModel& aug, int prediction_horizon,
                                    int control_horizon) {
  if (control_horizon < 1) {
    throw ConfigError("control horizon must be >= 1");
  }
  if (control_horizon > prediction_horizon) {
    throw ConfigError("control horizon cannot exceed prediction horizon");
  }

  PredictionMatrices pred;
  pred.free_response.resize(3 * prediction_horizon, 7);
  pred.forced_response = Eigen::MatrixXd::Zero(3 * prediction_horizon, 2 * control_horizon);

  // impulse[p] = C A^p B feeds every subdiagonal block at offset p
  std::vector<Eigen::Matrix<double, 3, 2>> impulse(static_cast<std::size_t>(prediction_horizon));
  Eigen::Matrix<double, 7, 7> a_pow = Eigen::Matrix<double, 7, 7>::Identity();
  for (int p = 0; p < prediction_horizon; ++p) {
    impulse[static_cast<std::size_t>(p)] = aug.C * a_pow * aug.B;
    a_pow = a_pow * aug.A;  // now A^{p+1}
    pred.free_response.middleRows<3>(3 * p) = aug.C * a_pow;
  }
  for (int i = 0; i < prediction_horizon; ++i) {
    const int cols = std::min(i, control_horizon - 1);
    for (int j = 0; j <= cols; ++j) {
      pred.forced_response.block<3, 2>(3 * i, 2 * j) = impulse[static_cast<std::size_t>(i - j)];
    }
  }
  return pred;
}

Eigen::VectorXd solve_unconstrained(const PredictionMatrices& pred,
                                    const Eigen::VectorXd& reference,
                                    const Eigen::Matrix<double, 7, 1>& augmented_state,
                                    double input_weight) {
  if (!(input_weight >= 0.0)) {
    throw ConfigError("input weight must be >= 0");
  }
  if (reference.size() != pred.free_response.rows()) {
    throw ConfigError("reference length does not match the prediction horizon");
  }
  const Eigen::Index n = pred.forced_response.cols();
  const Eigen::MatrixXd normal =
      pred.forced_response.transpose() * pred.forced_response +
      input_weight * Eigen::MatrixXd::Identity(n, n);
  const Eigen::VectorXd rhs =
      pred.forced_response.transpose() * (reference - pred.free_response * augmented_state);

  Eigen::LDLT<Eigen::MatrixXd> ldlt(normal);
  const Eigen::VectorXd d = ldlt.vectorD();
  const bool rank_deficient =
      d.minCoeff() <= 1e-12 * std::max(1.0, d.maxCoeff());
  Eigen::VectorXd du = ldlt.solve(rhs);
  const double residual = (normal * du - rhs).norm();
  if (ldlt.info() != Eigen::Success || rank_deficient || !du.allFinite() ||
      residual > 1e-6 * std::max(1.0, rhs.norm())) {
    throw SolverError("unconstrained solve failed: singular normal matrix");
  }
  return du;
}

QpProblem assemble_qp(const PredictionMatrices& pred, const Eigen::VectorXd& reference,
                      const Eigen::Matrix<double, 7, 1>& augmented_state, double input_weight,
                      const ControlInput& previous_input, const VehicleParams& params,
                      int control_horizon) {
  if (!(input_weight > 0.0)) {
    throw ConfigError("constrained mode requires r_w > 0");
  }
  if (reference.size() != pred.free_response.rows()) {
    throw ConfigError("reference length does not match the prediction horizon");
  }
  const Eigen::Index n = pred.forced_response.cols();
  if (n != 2 * control_horizon) {
    throw ConfigError("prediction matrices do not match the control horizon");
  }

  QpProblem qp;
  const Eigen::MatrixXd gram = pred.forced_response.transpose() * pred.forced_response;
  // symmetrize exactly so the solver's symmetry check never trips on rounding
  qp.H = gram + gram.transpose() +
         2.0 * input_weight * Eigen::MatrixXd::Identity(n, n);
  qp.f = -2.0 * pred.forced_response.transpose() *
         (reference - pred.free_response * augmented_state);

  const double tan_delta_max = std::tan(params.delta_max);
  const double d_tan_max = std::tan(params.d_delta_max);

  qp.A = Eigen::MatrixXd::Zero(8 * control_horizon, n);
  qp.b.resize(8 * control_horizon);
  for (int j = 0; j < control_horizon; ++j) {
    const int row = 8 * j;
    const int a_col = 2 * j;
    const int t_col = 2 * j + 1;

    // per-step rate bounds on the j-th increment
    qp.A(row + 0, a_col) = 1.0;
    qp.b(row + 0) = params.d_a_max;
    qp.A(row + 1, a_col) = -1.0;
    qp.b(row + 1) = params.d_a_max;
    qp.A(row + 2, t_col) = 1.0;
    qp.b(row + 2) = d_tan_max;
    qp.A(row + 3, t_col) = -1.0;
    qp.b(row + 3) = d_tan_max;

    // amplitude bounds on the accumulated input through step j
    for (int i = 0; i <= j; ++i) {
      qp.A(row + 4, 2 * i) = 1.0;
      qp.A(row + 5, 2 * i) = -1.0;
      qp.A(row + 6, 2 * i + 1) = 1.0;
      qp.A(row + 7, 2 * i + 1) = -1.0;
    }
    qp.b(row + 4) = params.a_max - previous_input.accel;
    qp.b(row + 5) = previous_input.accel - params.a_min;
    qp.b(row + 6) = tan_delta_max - previous_input.tan_delta;
    qp.b(row + 7) = previous_input.tan_delta + tan_delta_max;
  }
  return qp;
}

bool amplitude_bounds_reachable(const ControlInput& previous_input, const VehicleParams& params,
                                int control_horizon) {
  const double tan_delta_max = std::tan(params.delta_max);
  const double slack_a = control_horizon * params.d_a_max;
  const double slack_t = control_horizon * std::tan(params.d_delta_max);
  return previous_input.accel <= params.a_max + slack_a &&
         previous_input.accel >= params.a_min - slack_a &&
         previous_input.tan_delta <= tan_delta_max + slack_t &&
         previous_input.tan_delta >= -tan_delta_max - slack_t;
}

ControlCommand control_step(ControllerState& ctrl, const VehicleState& state,
                            const Trajectory& traj, const MpcConfig& cfg,
                            const VehicleParams& params) {
  validate(cfg);
  validate(params);

  const std::size_t nearest = find_nearest_waypoint(traj, Eigen::Vector2d(state.x, state.y));
  Trajectory local = resample_cubic(traj, nearest, cfg.resample_spacing);

  // splice the coarse waypoints past the densified window back on, so a
  // fast preview can look beyond the four-point stencil
  const std::size_t stencil_end = cubic_stencil_start(traj.size(), nearest) + 4;
  if (stencil_end < traj.size()) {
    std::vector<Waypoint> pts = local.waypoints();
    for (std::size_t i = stencil_end; i < traj.size(); ++i) {
      pts.push_back(traj.waypoints()[i]);
    }
    local = Trajectory(std::move(pts));
  }

  const ReferencePreview preview = build_reference_preview(
      local, state, cfg.prediction_horizon, params.sample_time, cfg.preview_mode);

  const LinearModel model = linearize(state, params);
  const AugmentedModel aug = build_augmented(model);
  const PredictionMatrices pred =
      build_prediction(aug, cfg.prediction_horizon, cfg.control_horizon);

  Eigen::Matrix<double, 7, 1> x_aug = Eigen::Matrix<double, 7, 1>::Zero();
  if (ctrl.previous_state) {
    const Eigen::Vector4d& prev = *ctrl.previous_state;
    x_aug(0) = state.x - prev(0);
    x_aug(1) = state.y - prev(1);
    x_aug(2) = state.v - prev(2);
    x_aug(3) = angle_diff(state.theta, prev(3));
  }
  x_aug(4) = state.y;
  x_aug(5) = state.v;
  x_aug(6) = state.theta;

  const Eigen::VectorXd reference = preview.stacked();
  const QpProblem qp = assemble_qp(pred, reference, x_aug, cfg.input_weight,
                                   ctrl.previous_input, params, cfg.control_horizon);
  const QpSolution sol = solve_hildreth(qp);

  // receding horizon: only the first increment reaches the plant,
  // re-clamped so the command always honors rate and amplitude bounds
  const double d_tan_max = std::tan(params.d_delta_max);
  const double tan_delta_max = std::tan(params.delta_max);
  const double raw_a = ctrl.previous_input.accel + sol.x(0);
  const double raw_tan = ctrl.previous_input.tan_delta + sol.x(1);
  const double a_new =
      std::clamp(ctrl.previous_input.accel +
                     std::clamp(sol.x(0), -params.d_a_max, params.d_a_max),
                 params.a_min, params.a_max);
  const double tan_new =
      std::clamp(ctrl.previous_input.tan_delta +
                     std::clamp(sol.x(1), -d_tan_max, d_tan_max),
                 -tan_delta_max, tan_delta_max);
  const bool clamp_engaged = a_new != raw_a || tan_new != raw_tan;

  ControlCommand cmd;
  cmd.delta_cmd = std::atan(tan_new);
  cmd.a_cmd = a_new;
  cmd.v_cmd = preview.rows(0, 1);
  cmd.diag.predicted_outputs =
      pred.free_response * x_aug + pred.forced_response * sol.x;
  cmd.diag.applied_increment =
      Eigen::Vector2d(a_new - ctrl.previous_input.accel,
                      tan_new - ctrl.previous_input.tan_delta);
  cmd.diag.qp_iterations = sol.iterations;
  cmd.diag.constraint_active =
      clamp_engaged || (sol.lambda.size() > 0 && sol.lambda.maxCoeff() > 0.0);
  cmd.diag.degraded =
      !sol.converged || !amplitude_bounds_reachable(ctrl.previous_input, params,
                                                    cfg.control_horizon);
  cmd.diag.augmented_state = x_aug;
  cmd.diag.nearest_index = nearest;

  ctrl.previous_input = ControlInput{a_new, tan_new};
  ctrl.previous_state = state.as_vector();
  return cmd;
}

}  // namespace parkmpc
