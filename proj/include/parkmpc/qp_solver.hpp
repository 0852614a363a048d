#pragma once

#include <Eigen/Core>

namespace parkmpc {

/// Convex QP in standard form: minimize 0.5 x'Hx + f'x subject to Ax <= b.
/// H must be symmetric positive definite. A may have zero rows
/// (unconstrained problem).
struct QpProblem {
  Eigen::MatrixXd H;
  Eigen::VectorXd f;
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
};

struct QpSolution {
  Eigen::VectorXd x;
  Eigen::VectorXd lambda;    // dual multipliers, >= 0 elementwise
  int iterations{0};         // dual sweeps performed (0 = unconstrained exit)
  bool converged{false};
  double max_violation{0.0};  // max_i (Ax - b)_i, negative when strictly feasible
};

struct HildrethOptions {
  int max_iterations{38};      // dual sweep cap
  double lambda_tol{1e-8};     // squared-norm change of lambda per sweep
  double feas_tol{1e-9};       // feasibility slack for the unconstrained exit
  double violation_tol{1e-6};  // residual feasibility required to report converged
  double slackness_tol{1e-5};  // max |lambda_i * residual_i| required to report converged
};

/// Hildreth's dual coordinate-descent QP solver. The unconstrained
/// minimizer is returned directly when it satisfies every constraint;
/// otherwise the dual variables are swept Gauss-Seidel style with
/// clipping at zero, up to max_iterations sweeps. Dual rows whose
/// diagonal vanishes are frozen. The SPD factorization of H is computed
/// once and reused for every solve against it.
///
/// `converged` means the returned pair passes the whole optimality
/// battery: the lambda stopping criterion fired, the primal violation
/// is within violation_tol, and complementary slackness holds within
/// slackness_tol. On badly conditioned duals the flag stays false; the
/// last iterate is still returned so callers can clamp it.
QpSolution solve_hildreth(const QpProblem& qp, const HildrethOptions& options = {});

}  // namespace parkmpc
