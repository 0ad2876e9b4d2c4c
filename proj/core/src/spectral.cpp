#include "nleq/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "nleq/errors.hpp"

namespace nleq {

void SpectralOptions::validate() const {
    if (!(sigma_min > 0.0 && sigma_min < sigma_max && std::isfinite(sigma_max)))
        throw InputError("spectral bounds must satisfy 0 < sigma_min < sigma_max < inf");
    if (memory < 1) throw InputError("memory M must be at least 1");
    if (history < 1) throw InputError("history depth must be at least 1");
    if (max_iter < 1) throw InputError("max_iter must be at least 1");
    if (!(tol > 0.0)) throw InputError("tol must be positive");
    if (!(0.0 < tau_min && tau_min <= tau_max && tau_max < 1.0))
        throw InputError("backtracking safeguards must satisfy 0 < tau_min <= tau_max < 1");
}

double clamp_spectral(double sigma, double lo, double hi) noexcept {
    if (std::isnan(sigma) || sigma == 0.0) return hi;
    const double mag = std::clamp(std::fabs(sigma), lo, hi);
    return std::copysign(mag, sigma);
}

namespace {

struct Point {
    Vector x, f;
    double merit = std::numeric_limits<double>::infinity();
};

class SpectralSolver {
public:
    SpectralSolver(const ProblemSpec& problem, const SpectralOptions& opts)
        : problem_(problem), opts_(opts) {}

    SpectralResult run(const Vector& x0);

private:
    bool evaluate(Point& p) {
        ++fevals_;
        p.f = problem_.evaluate(p.x);
        p.merit = all_finite(p.f) ? sum_of_squares(p.f) : std::numeric_limits<double>::infinity();
        return std::isfinite(p.merit);
    }

    bool converged(const Vector& f) const {
        const double n = static_cast<double>(f.size());
        return norm2(f) / std::sqrt(n) <= opts_.tol || norm_inf(f) <= opts_.tol;
    }

    Point step(double lambda, const Point& from, double sigma) const {
        Point p;
        p.x = from.x;
        for (std::size_t i = 0; i < p.x.size(); ++i) p.x[i] -= lambda * sigma * from.f[i];
        return p;
    }

    bool accelerate(const Point& trial, Point& out);
    void remember(const Point& from, const Point& to);

    const ProblemSpec& problem_;
    const SpectralOptions& opts_;
    std::size_t fevals_ = 0;
    std::deque<Vector> steps_, changes_;
};

void SpectralSolver::remember(const Point& from, const Point& to) {
    Vector s(from.x.size()), y(from.x.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        s[i] = to.x[i] - from.x[i];
        y[i] = to.f[i] - from.f[i];
    }
    steps_.push_back(std::move(s));
    changes_.push_back(std::move(y));
    while (steps_.size() > opts_.history) {
        steps_.pop_front();
        changes_.pop_front();
    }
}

// Multi-secant extrapolation: with S, Y the stored steps and residual
// changes, pick g minimizing |Y g - r(trial)| and move to trial - S g.
// Attempted once the history is full. A rejected extrapolation is halved up
// to three times toward the trial.
bool SpectralSolver::accelerate(const Point& trial, Point& out) {
    const std::size_t n = trial.x.size();
    const std::size_t p = steps_.size();
    if (p < opts_.history) return false;
    DenseMatrix y(n, p);
    for (std::size_t j = 0; j < p; ++j) y.set_column(j, changes_[j]);
    const Vector coef = solve_truncated_least_squares(y, trial.f, opts_.truncation);

    out.x = trial.x;
    for (std::size_t j = 0; j < p; ++j)
        for (std::size_t i = 0; i < n; ++i) out.x[i] -= coef[j] * steps_[j][i];
    if (!all_finite(out.x)) return false;
    if (evaluate(out) && out.merit < trial.merit) return true;
    const Vector full = out.x;
    for (int h = 1; h <= 3; ++h) {
        const double t = std::ldexp(1.0, -h);
        for (std::size_t i = 0; i < n; ++i) out.x[i] = trial.x[i] + t * (full[i] - trial.x[i]);
        if (evaluate(out) && out.merit < trial.merit) return true;
    }
    return false;
}

SpectralResult SpectralSolver::run(const Vector& x0) {
    opts_.validate();
    if (problem_.n_params != problem_.n_residuals)
        throw DimensionError("solve_spectral needs a square system");
    if (x0.size() != problem_.n_params) throw DimensionError("solve_spectral: start has wrong length");

    Point cur;
    cur.x = x0;
    if (!evaluate(cur)) throw EvaluationError("solve_spectral: residual not finite at the start", x0);

    Point best = cur;
    auto result = [&](bool ok, std::size_t iters, const char* msg) {
        SpectralResult r;
        const Point& chosen = ok ? cur : best;
        r.x = chosen.x;
        r.fvec = chosen.f;
        r.ss = chosen.merit;
        r.iterations = iters;
        r.fevals = fevals_;
        r.converged = ok;
        r.message = msg;
        return r;
    };
    if (converged(cur.f)) return result(true, 0, "Successful convergence");

    const double forcing0 = norm2(cur.f);
    double sigma = clamp_spectral(1.0 / std::max(1.0, forcing0), opts_.sigma_min, opts_.sigma_max);
    std::deque<double> merits{cur.merit};

    for (std::size_t k = 0; k < opts_.max_iter; ++k) {
        const double reference = *std::max_element(merits.begin(), merits.end());
        const double eta = forcing0 / ((1.0 + k) * (1.0 + k));

        // nonmonotone search over both signs of the spectral direction
        double a_plus = 1.0, a_minus = 1.0;
        Point trial;
        double lambda = 0.0;
        bool found = false;
        for (std::size_t b = 0; b <= opts_.max_backtracks && !found; ++b) {
            Point plus = step(a_plus, cur, sigma);
            evaluate(plus);
            if (plus.merit <= reference + eta - opts_.gamma * a_plus * a_plus * cur.merit) {
                trial = std::move(plus);
                lambda = a_plus;
                found = true;
                break;
            }
            Point minus = step(-a_minus, cur, sigma);
            evaluate(minus);
            if (minus.merit <= reference + eta - opts_.gamma * a_minus * a_minus * cur.merit) {
                trial = std::move(minus);
                lambda = -a_minus;
                found = true;
                break;
            }
            auto shrink = [&](double a, double trial_merit) {
                double next = a * a * cur.merit / (trial_merit + (2.0 * a - 1.0) * cur.merit);
                if (!std::isfinite(next)) next = opts_.tau_min * a;
                return std::clamp(next, opts_.tau_min * a, opts_.tau_max * a);
            };
            a_plus = shrink(a_plus, plus.merit);
            a_minus = shrink(a_minus, minus.merit);
        }
        if (!found) return result(false, k, "Line search failed");

        Point next = trial;
        bool accelerated = false;
        if (opts_.acceleration) {
            remember(cur, trial);
            // A rejected extrapolation still yields a secant pair off the
            // residual direction, which keeps the stored steps from collapsing.
            Point extrapolated;
            if (accelerate(trial, extrapolated)) {
                next = std::move(extrapolated);
                accelerated = true;
            } else if (std::isfinite(extrapolated.merit)) {
                remember(trial, extrapolated);
            }
        }

        if (opts_.observer) {
            SpectralStepRecord rec;
            rec.iter = k + 1;
            rec.merit = trial.merit;
            rec.reference = reference;
            rec.forcing = eta;
            rec.lambda = lambda;
            rec.previous_merit = cur.merit;
            rec.sigma = sigma;
            rec.accelerated = accelerated;
            rec.accepted_merit = next.merit;
            opts_.observer(rec);
        }

        double sts = 0.0, sty = 0.0;
        for (std::size_t i = 0; i < cur.x.size(); ++i) {
            const double s = next.x[i] - cur.x[i];
            const double y = next.f[i] - cur.f[i];
            sts += s * s;
            sty += s * y;
        }
        sigma = clamp_spectral(sts / sty, opts_.sigma_min, opts_.sigma_max);

        cur = std::move(next);
        if (cur.merit < best.merit) best = cur;
        merits.push_back(cur.merit);
        while (merits.size() > opts_.memory) merits.pop_front();

        if (converged(cur.f)) return result(true, k + 1, "Successful convergence");
    }
    return result(false, opts_.max_iter, "Maximum number of iterations exceeded");
}

}  // namespace

SpectralResult solve_spectral(const ProblemSpec& problem, const Vector& x0, const SpectralOptions& opts) {
    SpectralSolver solver(problem, opts);
    return solver.run(x0);
}

SpectralResult solve_spectral_accelerated(const ProblemSpec& problem, const Vector& x0,
                                          SpectralOptions opts) {
    opts.acceleration = true;
    return solve_spectral(problem, x0, opts);
}

}  // namespace nleq
