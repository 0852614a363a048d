#include "parkmpc/qp_solver.hpp"

#include <Eigen/Cholesky>
#include <cmath>

#ifndef NDEBUG
#include <Eigen/Eigenvalues>
#endif

#include "parkmpc/errors.hpp"

namespace parkmpc {

QpSolution solve_hildreth(const QpProblem& qp, const HildrethOptions& options) {
  const Eigen::Index n = qp.H.rows();
  const Eigen::Index c = qp.A.rows();
  if (qp.H.cols() != n || qp.f.size() != n || (c > 0 && qp.A.cols() != n) || qp.b.size() != c) {
    throw SolverError("solve_hildreth: inconsistent problem dimensions");
  }
  if ((qp.H - qp.H.transpose()).cwiseAbs().maxCoeff() > 1e-10) {
    throw SolverError("solve_hildreth: H is not symmetric");
  }
#ifndef NDEBUG
  {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(qp.H, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() <= 0.0) {
      throw SolverError("solve_hildreth: H is not positive definite");
    }
  }
#endif

  Eigen::LLT<Eigen::MatrixXd> llt(qp.H);
  if (llt.info() != Eigen::Success) {
    throw SolverError("solve_hildreth: H is not positive definite");
  }

  QpSolution sol;
  sol.lambda = Eigen::VectorXd::Zero(c);
  sol.x = llt.solve(-qp.f);
  if (!sol.x.allFinite()) {
    throw SolverError("solve_hildreth: non-finite unconstrained minimizer");
  }

  if (c == 0) {
    sol.converged = true;
    return sol;
  }

  Eigen::VectorXd residual = qp.A * sol.x - qp.b;
  if ((residual.array() <= options.feas_tol).all()) {
    sol.converged = true;
    sol.max_violation = residual.maxCoeff();
    return sol;
  }

  // Dual problem data: Hd = A H^-1 A', k = b + A H^-1 f.
  const Eigen::MatrixXd hinv_at = llt.solve(qp.A.transpose());
  const Eigen::MatrixXd hd = qp.A * hinv_at;
  const Eigen::VectorXd k = qp.b + qp.A * llt.solve(qp.f);

  Eigen::VectorXd lambda = Eigen::VectorXd::Zero(c);
  Eigen::VectorXd lambda_prev(c);
  bool lambda_converged = false;
  int sweeps = 0;
  while (sweeps < options.max_iterations) {
    lambda_prev = lambda;
    for (Eigen::Index i = 0; i < c; ++i) {
      if (std::abs(hd(i, i)) < 1e-12) {
        continue;  // degenerate dual row, multiplier stays frozen
      }
      const double coupled = hd.row(i).dot(lambda) - hd(i, i) * lambda(i);
      lambda(i) = std::max(0.0, -(k(i) + coupled) / hd(i, i));
    }
    ++sweeps;
    if ((lambda - lambda_prev).squaredNorm() < options.lambda_tol) {
      lambda_converged = true;
      break;
    }
  }

  if (!lambda.allFinite()) {
    throw SolverError("solve_hildreth: dual iteration diverged");
  }

  sol.lambda = lambda;
  sol.iterations = sweeps;
  sol.x = llt.solve(-(qp.f + qp.A.transpose() * lambda));
  if (!sol.x.allFinite()) {
    throw SolverError("solve_hildreth: non-finite solution");
  }
  const Eigen::VectorXd final_residual = qp.A * sol.x - qp.b;
  sol.max_violation = final_residual.maxCoeff();
  const double slackness = lambda.cwiseProduct(final_residual).cwiseAbs().maxCoeff();
  // every row carrying a multiplier must actually sit on its bound,
  // otherwise the dual stopped short even though lambda went stationary
  bool active_rows_tight = true;
  for (Eigen::Index i = 0; i < c; ++i) {
    if (lambda(i) > 1e-8 && std::abs(final_residual(i)) > options.violation_tol) {
      active_rows_tight = false;
      break;
    }
  }
  sol.converged = lambda_converged && sol.max_violation <= options.violation_tol &&
                  slackness < options.slackness_tol && active_rows_tight;
  return sol;
}

}  // namespace parkmpc
