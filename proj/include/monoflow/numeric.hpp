#pragma once

#include <cmath>
#include <limits>
#include <utility>

#include "monoflow/errors.hpp"
#include "monoflow/system.hpp"
#include "monoflow/types.hpp"

namespace monoflow {

// Pivots below this magnitude are treated as a structural singularity.
inline constexpr double kPivotFloor = 1e-300;

/// Dense solve of A z = rhs via partially pivoted LU.
/// Throws SingularMatrixError when a pivot collapses.
CVec linear_solve(const CMat& A, const CVec& rhs);

struct NewtonOutcome {
  CVec z;
  double residual = std::numeric_limits<double>::infinity();
  double last_step = std::numeric_limits<double>::infinity();
  int iterations = 0;
  bool converged = false;
  bool singular = false;
};

/// How newton_iterate interprets its tolerance. Absolute is the contract for
/// solution refinement. Scaled is for the in-path corrector: the system is
/// quadratic, so at a point of magnitude M the residual cannot drop below
/// ~M^2 eps and steps below ~M eps; large-norm excursions along a homotopy
/// path would otherwise be untrackable with an absolute test.
enum class NewtonTolerance { Absolute, Scaled };

/// Damped-free Newton iteration on a square system given by callables
/// f(z) -> CVec and jac(z) -> CMat. Convergence requires both the residual
/// and the last step to drop below tol in the infinity norm; an accepted
/// result must also contract (each step at most half the previous one) so a
/// stagnating iteration near a singular point is reported as failure rather
/// than success.
template <class EvalFn, class JacFn>
NewtonOutcome newton_iterate(const EvalFn& f, const JacFn& jac, CVec z, double tol, int max_iters,
                             NewtonTolerance mode = NewtonTolerance::Absolute) {
  NewtonOutcome out;
  double prev_step = -1.0;
  for (int iter = 1; iter <= max_iters; ++iter) {
    CVec r = f(z);
    if (!r.allFinite()) {
      out.z = std::move(z);
      out.residual = std::numeric_limits<double>::infinity();
      return out;
    }
    Eigen::PartialPivLU<CMat> lu(jac(z));
    const double min_pivot = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
    if (!(min_pivot > kPivotFloor)) {
      out.z = std::move(z);
      out.residual = inf_norm(r);
      out.singular = true;
      return out;
    }
    const CVec dz = lu.solve(-r);
    if (!dz.allFinite()) {
      out.z = std::move(z);
      out.residual = inf_norm(r);
      out.singular = true;
      return out;
    }
    z += dz;
    const double step = inf_norm(dz);
    out.iterations = iter;
    out.last_step = step;
    double step_scale = 1.0, res_scale = 1.0;
    if (mode == NewtonTolerance::Scaled) {
      step_scale = 1.0 + inf_norm(z);
      res_scale = step_scale * step_scale;
    }
    if (step <= tol * step_scale) {
      out.residual = inf_norm(f(z));
      if (out.residual <= tol * res_scale) {
        // Contraction guard, with a floor so roundoff-level steps don't trip it.
        const double floor = 64.0 * std::numeric_limits<double>::epsilon() * (1.0 + inf_norm(z));
        out.converged = !(prev_step >= 0.0 && step > 0.5 * prev_step && step > floor);
        out.z = std::move(z);
        return out;
      }
    }
    prev_step = step;
  }
  out.residual = inf_norm(f(z));
  out.z = std::move(z);
  return out;
}

/// Newton correction of z0 toward a solution of F_b = 0.
/// A singular Jacobian is reported through the outcome, not thrown.
NewtonOutcome newton_correct(const PowerFlowSystem& sys, const CVec& b, CVec z0, double tol = 1e-10,
                             int max_iters = 30);

}  // namespace monoflow
