#pragma once

// Levenberg-Marquardt for min sum(r(x)^2) with m >= n. Each step solves
//
//   (J^T J + lambda D) d = -J^T r,   D = diag(J^T J) floored at 1e-10,
//
// through QR of the augmented matrix [J; sqrt(lambda D)].

#include <cstddef>
#include <functional>
#include <string>

#include "nleq/numlinalg.hpp"
#include "nleq/problems.hpp"

namespace nleq {

/// One accepted step, reported to LsqOptions::observer.
struct LsqStepRecord {
    std::size_t iter = 0;
    double ss_before = 0.0;
    double ss_after = 0.0;
    double lambda = 0.0;   // damping the step was computed with
};

struct LsqOptions {
    JacobianScheme jacobian = JacobianScheme::central();
    double lambda_init = 1e-4;
    double lambda_up = 10.0;
    double lambda_down = 0.4;
    std::size_t max_jac = 500;
    std::size_t max_feval = 2000;
    double tol = 1e-12;        // relative sum-of-squares decrease on an accepted step
    double step_tol = 1e-12;   // stop when |d|_inf < step_tol * (1 + |x|_inf)
    std::function<void(const LsqStepRecord&)> observer;

    /// Throws InputError unless lambda_up > 1, 0 < lambda_down < 1, lambda_init > 0.
    void validate() const;
};

struct LsqResult {
    Vector x;
    Vector fvec;
    double ss = 0.0;
    std::size_t jac_evals = 0;
    std::size_t fn_evals = 0;   // residual calls outside the finite-difference Jacobians
    std::size_t iterations = 0; // accepted steps
    Vector singvals;            // of the Jacobian at x, descending
    Vector gradient;            // 2 J^T r at x
    bool budget_exhausted = false;
    std::string message;
};

/// Throws DimensionError when m < n or x0 has the wrong length, and
/// EvaluationError when the residual is not finite at x0 or while forming a
/// Jacobian. Running out of budget is reported through budget_exhausted.
LsqResult solve_lsq(const ProblemSpec& problem, const Vector& x0, const LsqOptions& opts = {});

/// Damped step for Jacobian j and residual r. lambda = 0 gives Gauss-Newton.
///
/// Throws SingularMatrixError when the augmented system is rank deficient
/// (only possible for lambda = 0) and InputError for negative lambda.
Vector lm_step(const DenseMatrix& j, const Vector& r, double lambda);

}  // namespace nleq
