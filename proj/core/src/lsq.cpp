#include "nleq/lsq.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nleq/errors.hpp"

namespace nleq {

void LsqOptions::validate() const {
    jacobian.validate();
    if (!(lambda_init > 0.0 && std::isfinite(lambda_init))) throw InputError("lambda_init must be positive");
    if (!(lambda_up > 1.0)) throw InputError("lambda_up must exceed 1");
    if (!(lambda_down > 0.0 && lambda_down < 1.0)) throw InputError("lambda_down must lie in (0, 1)");
    if (max_jac < 1 || max_feval < 1) throw InputError("evaluation budgets must be positive");
    if (!(tol >= 0.0) || !(step_tol >= 0.0)) throw InputError("tolerances must be nonnegative");
}

Vector lm_step(const DenseMatrix& j, const Vector& r, double lambda) {
    if (!(lambda >= 0.0)) throw InputError("lm_step: lambda must be nonnegative");
    const std::size_t m = j.rows(), n = j.cols();
    if (r.size() != m) throw DimensionError("lm_step: residual length does not match the Jacobian");

    const std::size_t extra = lambda > 0.0 ? n : 0;
    DenseMatrix aug(m + extra, n);
    Vector rhs(m + extra, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t k = 0; k < n; ++k) aug(i, k) = j(i, k);
        rhs[i] = -r[i];
    }
    for (std::size_t k = 0; k < extra; ++k) {
        double d = 0.0;
        for (std::size_t i = 0; i < m; ++i) d += j(i, k) * j(i, k);
        aug(m + k, k) = std::sqrt(lambda * std::max(d, 1e-10));
    }
    return solve_least_squares(aug, rhs);
}

LsqResult solve_lsq(const ProblemSpec& problem, const Vector& x0, const LsqOptions& opts) {
    opts.validate();
    if (problem.n_residuals < problem.n_params)
        throw DimensionError("solve_lsq needs at least as many residuals as parameters");
    if (x0.size() != problem.n_params) throw DimensionError("solve_lsq: start has wrong length");
    if (!all_finite(x0)) throw InputError("solve_lsq: start is not finite");

    const VectorFunction f = problem.bound();
    LsqResult res;
    res.x = x0;
    res.fvec = f(x0);
    res.fn_evals = 1;
    if (!all_finite(res.fvec)) throw EvaluationError("solve_lsq: residual not finite at the start", x0);
    res.ss = sum_of_squares(res.fvec);

    double lambda = opts.lambda_init;
    DenseMatrix jac;
    bool jac_current = false;
    auto refresh = [&] {
        jac = fd_jacobian(f, res.x, opts.jacobian, &res.fvec);
        ++res.jac_evals;
        jac_current = true;
    };

    res.message = "Evaluation budget exhausted";
    res.budget_exhausted = true;
    while (res.jac_evals < opts.max_jac && res.fn_evals < opts.max_feval) {
        if (res.ss == 0.0) {
            res.message = "Zero residual";
            res.budget_exhausted = false;
            break;
        }
        refresh();

        bool accepted = false, done = false;
        while (res.fn_evals < opts.max_feval) {
            Vector d;
            try {
                d = lm_step(jac, res.fvec, lambda);
            } catch (const SingularMatrixError&) {
                lambda *= opts.lambda_up;
                continue;
            }
            if (norm_inf(d) < opts.step_tol * (1.0 + norm_inf(res.x))) {
                res.message = "Step too small";
                done = true;
                break;
            }
            Vector trial = res.x;
            for (std::size_t i = 0; i < trial.size(); ++i) trial[i] += d[i];
            Vector ft = f(trial);
            ++res.fn_evals;
            const double ss = all_finite(ft) ? sum_of_squares(ft) : std::numeric_limits<double>::infinity();
            if (ss < res.ss) {
                const double rel = (res.ss - ss) / res.ss;
                if (opts.observer) opts.observer({res.iterations + 1, res.ss, ss, lambda});
                res.x = std::move(trial);
                res.fvec = std::move(ft);
                res.ss = ss;
                ++res.iterations;
                jac_current = false;
                lambda *= opts.lambda_down;
                accepted = true;
                if (rel < opts.tol || ss == 0.0) {
                    res.message = "Relative decrease below tolerance";
                    done = true;
                }
                break;
            }
            lambda *= opts.lambda_up;
            if (!std::isfinite(lambda) || lambda > 1e300) {
                res.message = "Damping overflow";
                done = true;
                break;
            }
        }
        if (done) {
            res.budget_exhausted = false;
            break;
        }
        if (!accepted) break;
    }

    if (!jac_current) refresh();
    res.singvals = singular_values(jac);
    res.gradient = multiply_transposed(jac, res.fvec);
    for (double& g : res.gradient) g *= 2.0;
    return res;
}

}  // namespace nleq
