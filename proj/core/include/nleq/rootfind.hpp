#pragma once

// Newton and Broyden iterations for square systems r(x) = 0, each wrapped in
// one of several global strategies:
//
//   cline   backtracking line search, cubic interpolation
//   qline   backtracking line search, quadratic interpolation
//   gline   backtracking line search, step halving
//   pwldog  Powell single dogleg trust region
//   dbldog  double dogleg trust region (Newton point biased by 0.8)
//   hook    Levenberg-shifted step matched to the trust radius
//   none    full steps
//
// The merit function is fnorm = 0.5 * sum(r^2).

#include <cstddef>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "nleq/numlinalg.hpp"
#include "nleq/problems.hpp"

namespace nleq {

enum class RootMethod { newton, broyden };
enum class GlobalStrategy { cline, qline, gline, pwldog, dbldog, hook, none };

inline constexpr GlobalStrategy kAllGlobals[] = {
    GlobalStrategy::cline,  GlobalStrategy::qline, GlobalStrategy::gline, GlobalStrategy::pwldog,
    GlobalStrategy::dbldog, GlobalStrategy::hook,  GlobalStrategy::none};

std::string_view to_string(RootMethod m) noexcept;
std::string_view to_string(GlobalStrategy g) noexcept;
RootMethod parse_root_method(std::string_view name);
GlobalStrategy parse_global_strategy(std::string_view name);

bool is_line_search(GlobalStrategy g) noexcept;
bool is_trust_region(GlobalStrategy g) noexcept;

/// Termination codes.
namespace termcd {
inline constexpr int fcrit = 1;       // max|r| <= ftol
inline constexpr int xcrit = 2;       // relative step <= xtol, residual test not met
inline constexpr int stalled = 3;     // line search could not find an acceptable point
inline constexpr int maxiter = 4;     // iteration limit
inline constexpr int tr_collapse = 5; // trust radius fell to its floor
inline constexpr int eval_error = -1; // residual evaluation failed
}  // namespace termcd

std::string_view termcd_message(int code) noexcept;

/// One accepted step, reported to RootOptions::observer.
struct RootStepRecord {
    std::size_t iter = 0;
    double fnorm_before = 0.0;
    double fnorm_after = 0.0;
    double slope = 0.0;        // g^T s along the accepted step s, g = J^T r
    double lambda = 1.0;       // line-search multiplier
    double step_norm = 0.0;    // ||s||_2
    double radius = 0.0;       // trust radius the step was computed for (0 for non-TR)
    double radius_floor = 0.0; // xtol * (1 + ||x||)
};

struct RootOptions {
    RootMethod method = RootMethod::broyden;
    GlobalStrategy global = GlobalStrategy::dbldog;
    double ftol = 1e-8;
    double xtol = 1e-8;
    std::size_t max_iter = 150;
    JacobianScheme jacobian = JacobianScheme::central();
    std::function<void(const RootStepRecord&)> observer;

    /// Throws InputError for non-positive tolerances or max_iter == 0.
    void validate() const;
};

struct RootResult {
    Vector x;
    Vector fvec;
    int termcd = 0;
    std::size_t fcnt = 0;
    std::size_t jcnt = 0;
    std::size_t iter = 0;
    double fnorm = 0.0;  // 0.5 * sum(fvec^2)
    std::string message;
};

/// Solves problem.evaluate(x) = 0 from x0.
///
/// Throws InputError when the residual at x0 is not finite and
/// SingularMatrixError when global == none meets a singular Jacobian. A residual
/// that turns non-finite later ends the run with termcd -1.
RootResult solve_root(const ProblemSpec& problem, const Vector& x0, const RootOptions& opts = {});

/// d solving J d = -r.
Vector newton_step(const DenseMatrix& jac, const Vector& r);

/// B + (y - B s) s^T / (s^T s). Throws DegenerateStepError for s = 0.
DenseMatrix broyden_update(const DenseMatrix& b, const Vector& s, const Vector& y);

}  // namespace nleq
