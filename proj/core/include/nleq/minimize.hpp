#pragma once

// Sum-of-squares objectives and three unconstrained minimizers:
//
//   vm          BFGS inverse-Hessian update with Armijo backtracking
//   cg          nonlinear conjugate gradients, Polak-Ribiere+ with restarts
//   neldermead  derivative-free simplex search
//
// All three work on z = x / parscale and report x = z * parscale.

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include "nleq/numlinalg.hpp"
#include "nleq/problems.hpp"

namespace nleq {

enum class MinimizeMethod { vm, cg, neldermead };

std::string_view to_string(MinimizeMethod m) noexcept;
MinimizeMethod parse_minimize_method(std::string_view name);

/// sum((rscale_i * r_i(x))^2), or sum(r_i^2) without rscale.
/// Throws DimensionError when x or rscale has the wrong length.
double sumsq(const ProblemSpec& problem, const Vector& x, const std::optional<Vector>& rscale = {});

/// Residual-scaled sum of squares of a problem. Holds a copy of the problem.
struct ScaledObjective {
    ProblemSpec problem;
    std::optional<Vector> rscale;

    ScaledObjective(ProblemSpec p, std::optional<Vector> scale = {});
    double operator()(const Vector& x) const { return sumsq(problem, x, rscale); }
    std::size_t dimension() const noexcept { return problem.n_params; }
};

/// One accepted line-search step of vm or cg, in scaled coordinates.
struct MinimizeStepRecord {
    std::size_t iter = 0;
    double f_before = 0.0;
    double f_after = 0.0;
    double step = 0.0;    // multiplier t along the search direction
    double slope = 0.0;   // g^T d at the start of the step
};

inline const JacobianScheme kDefaultGradient{DiffScheme::central, 1e-7};

struct MinimizeOptions {
    MinimizeMethod method = MinimizeMethod::vm;
    // A fixed 1e-7 central step: the cube-root-of-eps default leaves a
    // truncation floor near 1e-12 on badly conditioned sums of squares.
    JacobianScheme gradient = kDefaultGradient;
    std::optional<Vector> parscale;
    std::size_t max_iter = 20000;
    std::size_t max_feval = 25000;
    std::optional<double> gtol;   // defaults to 1e-10 * sqrt(n)
    double simplex_tol = 1e-8;    // Nelder-Mead diameter relative to 1 + max|z|
    double armijo = 1e-4;
    std::function<void(const MinimizeStepRecord&)> observer;

    /// Throws InputError for non-positive parscale entries or budgets.
    void validate(std::size_t n) const;
    double gradient_tolerance(std::size_t n) const;
};

struct MinimizeResult {
    Vector x;
    double value = 0.0;
    std::size_t fevals = 0;    // objective calls outside gradient estimates
    std::size_t gevals = 0;    // finite-difference gradients
    std::size_t iterations = 0;
    bool converged = false;
    double kkt_gradient_norm = 0.0;  // max-norm of the FD gradient in x at the result
    std::string message;
};

/// Throws EvaluationError when the objective is not finite at x0 or a
/// gradient estimate fails. Non-finite trial points inside a line search or
/// simplex move are rejected as if they had a larger value.
MinimizeResult minimize(const ScaledObjective& objective, const Vector& x0,
                        const MinimizeOptions& opts = {});

}  // namespace nleq
