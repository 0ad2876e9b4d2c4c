#include "nleq/rootfind.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "nleq/errors.hpp"

namespace nleq {

std::string_view to_string(RootMethod m) noexcept {
    return m == RootMethod::newton ? "Newton" : "Broyden";
}

std::string_view to_string(GlobalStrategy g) noexcept {
    switch (g) {
        case GlobalStrategy::cline: return "cline";
        case GlobalStrategy::qline: return "qline";
        case GlobalStrategy::gline: return "gline";
        case GlobalStrategy::pwldog: return "pwldog";
        case GlobalStrategy::dbldog: return "dbldog";
        case GlobalStrategy::hook: return "hook";
        case GlobalStrategy::none: return "none";
    }
    return "unknown";
}

RootMethod parse_root_method(std::string_view name) {
    if (name == "newton" || name == "Newton") return RootMethod::newton;
    if (name == "broyden" || name == "Broyden") return RootMethod::broyden;
    throw InputError("unknown root method: " + std::string(name));
}

GlobalStrategy parse_global_strategy(std::string_view name) {
    for (GlobalStrategy g : kAllGlobals)
        if (to_string(g) == name) return g;
    throw InputError("unknown global strategy: " + std::string(name));
}

bool is_line_search(GlobalStrategy g) noexcept {
    return g == GlobalStrategy::cline || g == GlobalStrategy::qline || g == GlobalStrategy::gline;
}

bool is_trust_region(GlobalStrategy g) noexcept {
    return g == GlobalStrategy::pwldog || g == GlobalStrategy::dbldog || g == GlobalStrategy::hook;
}

std::string_view termcd_message(int code) noexcept {
    switch (code) {
        case termcd::fcrit: return "Fcrit";
        case termcd::xcrit: return "Xcrit";
        case termcd::stalled: return "Stalled";
        case termcd::maxiter: return "Maxiter";
        case termcd::tr_collapse: return "TRcollapse";
        case termcd::eval_error: return "EvalError";
        default: return "Unknown";
    }
}

void RootOptions::validate() const {
    if (!(ftol > 0.0) || !(xtol > 0.0)) throw InputError("ftol and xtol must be positive");
    if (max_iter < 1) throw InputError("max_iter must be at least 1");
    jacobian.validate();
}

Vector newton_step(const DenseMatrix& jac, const Vector& r) {
    Vector neg(r.size());
    std::transform(r.begin(), r.end(), neg.begin(), [](double v) { return -v; });
    return solve_linear(jac, neg);
}

DenseMatrix broyden_update(const DenseMatrix& b, const Vector& s, const Vector& y) {
    if (b.rows() != b.cols() || s.size() != b.cols() || y.size() != b.rows())
        throw DimensionError("broyden_update: dimension mismatch");
    const double sts = dot(s, s);
    if (!(sts > 0.0)) throw DegenerateStepError("broyden_update: zero step");
    const Vector bs = multiply(b, s);
    DenseMatrix out = b;
    for (std::size_t i = 0; i < b.rows(); ++i) {
        const double coef = (y[i] - bs[i]) / sts;
        if (coef == 0.0) continue;
        for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += coef * s[j];
    }
    return out;
}

namespace {

constexpr double kArmijo = 1e-4;
constexpr double kDoglegBias = 0.8;

Vector axpy(double a, const Vector& x, const Vector& y) {
    Vector out = y;
    for (std::size_t i = 0; i < y.size(); ++i) out[i] += a * x[i];
    return out;
}

Vector scaled(const Vector& x, double a) {
    Vector out = x;
    for (double& v : out) v *= a;
    return out;
}

double half_ss(const Vector& f) { return 0.5 * sum_of_squares(f); }

double relative_length(const Vector& d, const Vector& x) {
    double m = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i)
        m = std::max(m, std::fabs(d[i]) / std::max(std::fabs(x[i]), 1.0));
    return m;
}

/// Raised internally when an evaluation fails in a way that ends the run.
struct EvalFailure {};

class RootSolver {
public:
    RootSolver(const ProblemSpec& problem, const RootOptions& opts)
        : problem_(problem), opts_(opts), fn_(problem.bound()) {}

    RootResult run(const Vector& x0);

private:
    struct Direction {
        std::optional<Vector> newton;  // J d = -f, absent when J is singular
        Vector gradient;                // J^T f
        Vector cauchy;                  // minimizer of the model along -g
    };

    struct Trial {
        bool accepted = false;
        Vector x, f;
        double fnorm = 0.0;
        double slope = 0.0;
        double lambda = 1.0;
        double radius = 0.0;
    };

    std::optional<Vector> evaluate(const Vector& x) {
        ++fcnt_;
        Vector f = problem_.evaluate(x);
        if (!all_finite(f)) return std::nullopt;
        return f;
    }

    void refresh_jacobian() {
        try {
            jac_ = fd_jacobian(fn_, x_, opts_.jacobian, &f_);
        } catch (const EvaluationError&) {
            throw EvalFailure{};
        }
        ++jcnt_;
        fresh_ = true;
    }

    Direction direction() const;
    Trial line_search(const Direction& dir);
    Trial trust_region(const Direction& dir);
    Vector dogleg_step(const Direction& dir, double radius, bool& took_newton) const;
    Vector hook_step(const Direction& dir, double radius, bool& took_newton) const;
    double model_fnorm(const Vector& s) const { return half_ss(axpy(1.0, multiply(jac_, s), f_)); }
    double radius_floor() const { return opts_.xtol * (1.0 + norm2(x_)); }

    RootResult finish(int code) const {
        RootResult r;
        r.x = x_;
        r.fvec = f_;
        r.termcd = code;
        r.fcnt = fcnt_;
        r.jcnt = jcnt_;
        r.iter = iter_;
        r.fnorm = half_ss(f_);
        r.message = std::string(termcd_message(code));
        return r;
    }

    const ProblemSpec& problem_;
    const RootOptions& opts_;
    VectorFunction fn_;

    Vector x_, f_;
    double fnorm_ = 0.0;
    DenseMatrix jac_;
    bool fresh_ = false;
    std::size_t fcnt_ = 0, jcnt_ = 0, iter_ = 0;
    double max_step_ = 0.0;
    double radius_ = 0.0;
    std::size_t consecutive_rejections_ = 0;
};

RootSolver::Direction RootSolver::direction() const {
    Direction d;
    d.gradient = multiply_transposed(jac_, f_);
    try {
        d.newton = newton_step(jac_, f_);
        if (!all_finite(*d.newton)) d.newton.reset();
    } catch (const SingularMatrixError&) {
        if (opts_.global == GlobalStrategy::none) throw;
    }
    const Vector jg = multiply(jac_, d.gradient);
    const double jg2 = sum_of_squares(jg);
    const double g2 = sum_of_squares(d.gradient);
    d.cauchy = jg2 > 0.0 ? scaled(d.gradient, -g2 / jg2) : scaled(d.gradient, -1.0);
    return d;
}

RootSolver::Trial RootSolver::line_search(const Direction& dir) {
    Vector d = dir.newton ? *dir.newton : dir.cauchy;
    const double len = norm2(d);
    if (len > max_step_) d = scaled(d, max_step_ / len);

    const double slope = dot(dir.gradient, d);
    Trial t;
    if (!(slope < 0.0)) return t;

    const double rel = relative_length(d, x_);
    const double lambda_min = rel > 0.0 ? opts_.xtol / rel : 0.0;

    double lambda = 1.0;
    double prev_lambda = 0.0, prev_fnorm = 0.0;
    bool have_prev = false;

    for (;;) {
        Vector xt = axpy(lambda, d, x_);
        auto ft = evaluate(xt);
        const double fn_t = ft ? half_ss(*ft) : std::numeric_limits<double>::infinity();

        if (ft && std::isfinite(fn_t) && fn_t <= fnorm_ + kArmijo * lambda * slope) {
            t.accepted = true;
            t.x = std::move(xt);
            t.f = std::move(*ft);
            t.fnorm = fn_t;
            t.slope = dot(dir.gradient, axpy(-1.0, x_, t.x));
            t.lambda = lambda;
            return t;
        }
        if (lambda < lambda_min) return t;

        double next;
        if (!std::isfinite(fn_t)) {
            next = 0.1 * lambda;
            have_prev = false;
        } else if (opts_.global == GlobalStrategy::gline) {
            next = 0.5 * lambda;
        } else if (opts_.global == GlobalStrategy::qline || !have_prev) {
            next = -slope * lambda * lambda / (2.0 * (fn_t - fnorm_ - slope * lambda));
        } else {
            // cubic through the last two trials
            const double t1 = fn_t - fnorm_ - lambda * slope;
            const double t2 = prev_fnorm - fnorm_ - prev_lambda * slope;
            const double den = lambda - prev_lambda;
            const double a = (t1 / (lambda * lambda) - t2 / (prev_lambda * prev_lambda)) / den;
            const double b =
                (-prev_lambda * t1 / (lambda * lambda) + lambda * t2 / (prev_lambda * prev_lambda)) / den;
            if (a == 0.0) {
                next = -slope / (2.0 * b);
            } else {
                const double disc = b * b - 3.0 * a * slope;
                next = disc < 0.0 ? 0.5 * lambda : (-b + std::sqrt(disc)) / (3.0 * a);
            }
        }
        if (!std::isfinite(next)) next = 0.5 * lambda;
        next = std::clamp(next, 0.1 * lambda, 0.5 * lambda);

        if (std::isfinite(fn_t)) {
            prev_lambda = lambda;
            prev_fnorm = fn_t;
            have_prev = true;
        }
        lambda = next;
    }
}

Vector RootSolver::dogleg_step(const Direction& dir, double radius, bool& took_newton) const {
    took_newton = false;
    const double g_norm = norm2(dir.gradient);
    if (dir.newton) {
        const double newton_len = norm2(*dir.newton);
        if (newton_len <= radius) {
            took_newton = true;
            return *dir.newton;
        }
    }
    const double cauchy_len = norm2(dir.cauchy);
    if (!dir.newton || cauchy_len >= radius) {
        if (cauchy_len <= radius) return dir.cauchy;
        return scaled(dir.gradient, -radius / g_norm);
    }

    Vector target = *dir.newton;
    if (opts_.global == GlobalStrategy::dbldog) {
        // eta * s_N with eta = 0.2 + 0.8 * |g|^4 / (|J g|^2 |f|^2)
        const double jg2 = sum_of_squares(multiply(jac_, dir.gradient));
        const double gamma = std::pow(g_norm, 4) / (jg2 * sum_of_squares(f_));
        const double eta = (1.0 - kDoglegBias) + kDoglegBias * std::min(gamma, 1.0);
        const double newton_len = norm2(*dir.newton);
        if (eta * newton_len <= radius) return scaled(*dir.newton, radius / newton_len);
        target = scaled(*dir.newton, eta);
    }
    // s = s_C + tau (target - s_C) with |s| = radius
    const Vector diff = axpy(-1.0, dir.cauchy, target);
    const double a = sum_of_squares(diff);
    const double b = 2.0 * dot(dir.cauchy, diff);
    const double c = cauchy_len * cauchy_len - radius * radius;
    const double tau = (-b + std::sqrt(std::max(b * b - 4.0 * a * c, 0.0))) / (2.0 * a);
    Vector s = axpy(std::clamp(tau, 0.0, 1.0), diff, dir.cauchy);
    const double len = norm2(s);
    if (len > radius) s = scaled(s, radius / len);
    return s;
}

Vector RootSolver::hook_step(const Direction& dir, double radius, bool& took_newton) const {
    took_newton = false;
    if (dir.newton && norm2(*dir.newton) <= radius) {
        took_newton = true;
        return *dir.newton;
    }
    const std::size_t n = x_.size();
    const std::size_t m = f_.size();

    // s(mu) minimizes |J s + f|^2 + mu |s|^2; w(mu) = (J^T J + mu I)^{-1} s(mu)
    auto shifted = [&](double mu, const Vector& top, const Vector& bottom) {
        DenseMatrix aug(m + n, n);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < n; ++j) aug(i, j) = jac_(i, j);
        const double root_mu = std::sqrt(mu);
        for (std::size_t j = 0; j < n; ++j) aug(m + j, j) = root_mu;
        Vector rhs(top);
        rhs.insert(rhs.end(), bottom.begin(), bottom.end());
        return solve_least_squares(aug, rhs);
    };
    const Vector neg_f = scaled(f_, -1.0);
    const Vector zeros_n(n, 0.0);

    const double g_norm = norm2(dir.gradient);
    double lo = 0.0;
    double hi = g_norm / radius;  // |s(mu)| <= |g| / mu
    double mu = dir.newton ? 0.5 * hi : 1e-3 * hi;
    Vector s;
    for (int k = 0; k < 40; ++k) {
        try {
            s = shifted(mu, neg_f, zeros_n);
        } catch (const SingularMatrixError&) {
            lo = mu;
            mu = 0.5 * (lo + hi);
            continue;
        }
        const double len = norm2(s);
        if (len <= radius && len >= 0.9 * radius) break;
        if (len > radius) lo = mu; else hi = mu;
        // Hebden update, kept inside the bracket
        const Vector w = shifted(mu, Vector(m, 0.0), scaled(s, 1.0 / std::sqrt(mu)));
        const double stw = dot(s, w);
        double next = mu + (len * len / stw) * ((len - radius) / radius);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        mu = next;
    }
    if (s.empty()) return dogleg_step(dir, radius, took_newton);
    const double len = norm2(s);
    if (len > radius) s = scaled(s, radius / len);
    return s;
}

RootSolver::Trial RootSolver::trust_region(const Direction& dir_in) {
    Direction dir = dir_in;
    for (;;) {
        const double floor = radius_floor();
        radius_ = std::max(radius_, floor);
        bool took_newton = false;
        const Vector s = opts_.global == GlobalStrategy::hook ? hook_step(dir, radius_, took_newton)
                                                               : dogleg_step(dir, radius_, took_newton);
        const double slope = dot(dir.gradient, s);
        const double s_len = norm2(s);
        Vector xt = axpy(1.0, s, x_);
        auto ft = evaluate(xt);
        const double fn_t = ft ? half_ss(*ft) : std::numeric_limits<double>::infinity();

        if (ft && std::isfinite(fn_t) && slope < 0.0 && fn_t <= fnorm_ + kArmijo * slope) {
            consecutive_rejections_ = 0;
            Trial t;
            t.accepted = true;
            t.radius = radius_;
            t.slope = slope;
            t.fnorm = fn_t;
            t.x = std::move(xt);
            t.f = std::move(*ft);

            const double predicted = model_fnorm(s) - fnorm_;
            const double ratio = predicted < 0.0 ? (fn_t - fnorm_) / predicted : 0.0;
            if (took_newton) radius_ = s_len;
            if (ratio >= 0.75 && s_len >= 0.99 * radius_) {
                radius_ = std::min(2.0 * radius_, max_step_);
            } else if (ratio < 0.1) {
                radius_ = 0.5 * radius_;
            }
            return t;
        }

        ++consecutive_rejections_;
        if (opts_.method == RootMethod::broyden && !fresh_ && consecutive_rejections_ >= 2) {
            refresh_jacobian();
            dir = direction();
            consecutive_rejections_ = 0;
            continue;
        }
        if (radius_ <= floor) return {};

        double next = 0.1 * s_len;
        if (std::isfinite(fn_t)) {
            const double den = 2.0 * (fn_t - fnorm_ - slope);
            if (den > 0.0) next = -slope * s_len / den;
            next = std::clamp(next, 0.1 * s_len, 0.5 * s_len);
        }
        radius_ = std::max(next, floor);
    }
}

RootResult RootSolver::run(const Vector& x0) {
    opts_.validate();
    if (problem_.n_params != problem_.n_residuals)
        throw DimensionError("solve_root needs a square system");
    if (x0.size() != problem_.n_params) throw DimensionError("solve_root: start has wrong length");
    if (!all_finite(x0)) throw InputError("solve_root: non-finite start");

    x_ = x0;
    f_ = problem_.evaluate(x_);
    if (!all_finite(f_)) throw InputError("solve_root: residual is not finite at the start");
    fnorm_ = half_ss(f_);
    if (norm_inf(f_) <= opts_.ftol) return finish(termcd::fcrit);

    max_step_ = 1e3 * std::max(norm2(x0), 1.0);
    try {
        refresh_jacobian();
        if (is_trust_region(opts_.global)) {
            const Direction d = direction();
            radius_ = std::clamp(norm2(d.cauchy), 1e-3, 1e3);
        }

        while (iter_ < opts_.max_iter) {
            ++iter_;
            Direction dir;
            try {
                dir = direction();
            } catch (const SingularMatrixError&) {
                // a stale secant matrix is not the Jacobian; retry with a fresh one
                if (opts_.method != RootMethod::broyden || fresh_) throw;
                refresh_jacobian();
                dir = direction();
            }
            if (!(norm2(dir.gradient) > 0.0) && opts_.global != GlobalStrategy::none)
                return finish(termcd::stalled);

            Trial t;
            if (opts_.global == GlobalStrategy::none) {
                if (!dir.newton) throw SingularMatrixError("solve_root: singular Jacobian", 0.0);
                Vector xt = axpy(1.0, *dir.newton, x_);
                auto ft = evaluate(xt);
                if (!ft) return finish(termcd::eval_error);
                t.accepted = true;
                t.slope = dot(dir.gradient, *dir.newton);
                t.fnorm = half_ss(*ft);
                t.x = std::move(xt);
                t.f = std::move(*ft);
            } else if (is_line_search(opts_.global)) {
                t = line_search(dir);
                if (!t.accepted && opts_.method == RootMethod::broyden && !fresh_) {
                    refresh_jacobian();
                    t = line_search(direction());
                }
                if (!t.accepted) return finish(termcd::stalled);
            } else {
                t = trust_region(dir);
                if (!t.accepted) return finish(termcd::tr_collapse);
            }

            const Vector s = axpy(-1.0, x_, t.x);
            if (opts_.observer) {
                RootStepRecord rec;
                rec.iter = iter_;
                rec.fnorm_before = fnorm_;
                rec.fnorm_after = t.fnorm;
                rec.slope = t.slope;
                rec.lambda = t.lambda;
                rec.step_norm = norm2(s);
                rec.radius = t.radius;
                rec.radius_floor = radius_floor();
                opts_.observer(rec);
            }

            const Vector y = axpy(-1.0, f_, t.f);
            x_ = std::move(t.x);
            f_ = std::move(t.f);
            fnorm_ = t.fnorm;

            if (norm_inf(f_) <= opts_.ftol) return finish(termcd::fcrit);
            if (relative_length(s, x_) <= opts_.xtol) return finish(termcd::xcrit);

            if (opts_.method == RootMethod::newton) {
                refresh_jacobian();
            } else {
                jac_ = broyden_update(jac_, s, y);
                fresh_ = false;
            }
        }
    } catch (const EvalFailure&) {
        return finish(termcd::eval_error);
    } catch (const DegenerateStepError&) {
        return finish(termcd::xcrit);
    }
    return finish(termcd::maxiter);
}

}  // namespace

RootResult solve_root(const ProblemSpec& problem, const Vector& x0, const RootOptions& opts) {
    RootSolver solver(problem, opts);
    return solver.run(x0);
}

}  // namespace nleq
