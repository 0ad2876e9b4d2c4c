#include "nleq/minimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "nleq/errors.hpp"

namespace nleq {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

std::string_view to_string(MinimizeMethod m) noexcept {
    switch (m) {
        case MinimizeMethod::vm: return "vm";
        case MinimizeMethod::cg: return "cg";
        case MinimizeMethod::neldermead: return "neldermead";
    }
    return "?";
}

MinimizeMethod parse_minimize_method(std::string_view name) {
    if (name == "vm") return MinimizeMethod::vm;
    if (name == "cg") return MinimizeMethod::cg;
    if (name == "neldermead" || name == "nm") return MinimizeMethod::neldermead;
    throw InputError("unknown minimizer '" + std::string(name) + "'");
}

double sumsq(const ProblemSpec& problem, const Vector& x, const std::optional<Vector>& rscale) {
    const Vector r = problem.evaluate(x);
    if (!rscale) return sum_of_squares(r);
    if (rscale->size() != r.size())
        throw DimensionError("sumsq: rscale length " + std::to_string(rscale->size()) +
                             " does not match " + std::to_string(r.size()) + " residuals");
    double s = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
        const double v = (*rscale)[i] * r[i];
        s += v * v;
    }
    return s;
}

ScaledObjective::ScaledObjective(ProblemSpec p, std::optional<Vector> scale)
    : problem(std::move(p)), rscale(std::move(scale)) {
    if (rscale && rscale->size() != problem.n_residuals)
        throw DimensionError("rscale must have one entry per residual");
}

void MinimizeOptions::validate(std::size_t n) const {
    gradient.validate();
    if (parscale) {
        if (parscale->size() != n) throw DimensionError("parscale must have one entry per parameter");
        for (double s : *parscale)
            if (!(s > 0.0 && std::isfinite(s))) throw InputError("parscale entries must be positive");
    }
    if (max_iter < 1 || max_feval < 1) throw InputError("budgets must be positive");
    if (gtol && !(*gtol >= 0.0)) throw InputError("gtol must be nonnegative");
    if (!(simplex_tol > 0.0)) throw InputError("simplex_tol must be positive");
    if (!(armijo > 0.0 && armijo < 1.0)) throw InputError("armijo constant must lie in (0, 1)");
}

double MinimizeOptions::gradient_tolerance(std::size_t n) const {
    return gtol ? *gtol : 1e-10 * std::sqrt(static_cast<double>(n));
}

namespace {

class Minimizer {
public:
    Minimizer(const ScaledObjective& obj, const MinimizeOptions& opts)
        : obj_(obj), opts_(opts), n_(obj.dimension()),
          scale_(opts.parscale ? *opts.parscale : Vector(obj.dimension(), 1.0)),
          gtol_(opts.gradient_tolerance(obj.dimension())) {}

    MinimizeResult run(const Vector& x0);

private:
    Vector to_x(const Vector& z) const {
        Vector x(n_);
        for (std::size_t i = 0; i < n_; ++i) x[i] = z[i] * scale_[i];
        return x;
    }

    // objective in scaled coordinates; non-finite values map to +inf
    double value(const Vector& z) {
        ++res_.fevals;
        const double v = obj_(to_x(z));
        return std::isfinite(v) ? v : kInf;
    }

    Vector gradient(const Vector& z, double fz) {
        ++res_.gevals;
        const ScalarFunction g = [this](const Vector& w) { return obj_(to_x(w)); };
        return fd_gradient(g, z, opts_.gradient, &fz);
    }

    bool budget_left() const { return res_.fevals < opts_.max_feval; }
    bool stationary(const Vector& g, double f) const { return norm_inf(g) <= gtol_ * (1.0 + std::fabs(f)); }

    // Backtracking from step t along d until f(z + t d) <= f + c t slope.
    // Returns false when the step no longer moves z or the budget runs out.
    bool line_search(const Vector& z, double f, const Vector& d, double slope, double& t,
                     Vector& zt, double& ft) {
        zt.resize(n_);
        while (budget_left()) {
            bool moved = false;
            for (std::size_t i = 0; i < n_; ++i) {
                zt[i] = z[i] + t * d[i];
                moved = moved || zt[i] != z[i];
            }
            if (!moved) return false;
            ft = value(zt);
            if (ft <= f + opts_.armijo * t * slope) {
                if (opts_.observer) opts_.observer({res_.iterations + 1, f, ft, t, slope});
                return true;
            }
            t *= 0.2;
        }
        return false;
    }

    void variable_metric(Vector z);
    void conjugate_gradient(Vector z);
    void nelder_mead(Vector z);

    void finish(const Vector& z, double f, bool converged, const char* msg) {
        res_.x = to_x(z);
        res_.value = f;
        res_.converged = converged;
        res_.message = msg;
    }

    const ScaledObjective& obj_;
    const MinimizeOptions& opts_;
    std::size_t n_;
    Vector scale_;
    double gtol_;
    MinimizeResult res_;
};

void Minimizer::variable_metric(Vector z) {
    double f = value(z);
    if (!std::isfinite(f)) throw EvaluationError("minimize: objective not finite at the start", to_x(z));
    Vector g = gradient(z, f);
    DenseMatrix h = DenseMatrix::identity(n_);
    bool fresh = true;

    for (res_.iterations = 0; res_.iterations < opts_.max_iter; ++res_.iterations) {
        if (stationary(g, f)) return finish(z, f, true, "Gradient below tolerance");
        if (!budget_left()) return finish(z, f, false, "Function evaluation limit reached");

        Vector d = multiply(h, g);
        for (double& v : d) v = -v;
        double slope = dot(g, d);
        if (!(slope < 0.0)) {
            h = DenseMatrix::identity(n_);
            fresh = true;
            for (std::size_t i = 0; i < n_; ++i) d[i] = -g[i];
            slope = -dot(g, g);
        }

        double t = 1.0, ft = 0.0;
        Vector zt;
        if (!line_search(z, f, d, slope, t, zt, ft)) {
            if (!budget_left()) return finish(z, f, false, "Function evaluation limit reached");
            if (fresh) return finish(z, f, false, "No acceptable step");
            h = DenseMatrix::identity(n_);
            fresh = true;
            continue;
        }

        Vector gt = gradient(zt, ft);
        Vector s(n_), y(n_);
        for (std::size_t i = 0; i < n_; ++i) {
            s[i] = zt[i] - z[i];
            y[i] = gt[i] - g[i];
        }
        const double sty = dot(s, y);
        if (sty > 1e-10 * norm2(s) * norm2(y)) {
            const Vector hy = multiply(h, y);
            const double yhy = dot(y, hy);
            const double a = (1.0 + yhy / sty) / sty;
            for (std::size_t i = 0; i < n_; ++i)
                for (std::size_t j = 0; j < n_; ++j)
                    h(i, j) += a * s[i] * s[j] - (hy[i] * s[j] + s[i] * hy[j]) / sty;
            fresh = false;
        }
        z = std::move(zt);
        f = ft;
        g = std::move(gt);
    }
    finish(z, f, stationary(g, f), "Iteration limit reached");
}

void Minimizer::conjugate_gradient(Vector z) {
    double f = value(z);
    if (!std::isfinite(f)) throw EvaluationError("minimize: objective not finite at the start", to_x(z));
    Vector g = gradient(z, f);
    Vector d(n_);
    for (std::size_t i = 0; i < n_; ++i) d[i] = -g[i];
    double t_prev = 1.0;
    std::size_t since_restart = 0;

    for (res_.iterations = 0; res_.iterations < opts_.max_iter; ++res_.iterations) {
        if (stationary(g, f)) return finish(z, f, true, "Gradient below tolerance");
        if (!budget_left()) return finish(z, f, false, "Function evaluation limit reached");

        double slope = dot(g, d);
        bool steepest = since_restart == 0;
        if (!(slope < 0.0)) {
            for (std::size_t i = 0; i < n_; ++i) d[i] = -g[i];
            slope = -dot(g, g);
            steepest = true;
        }
        double t = std::min(1.0, 2.0 * t_prev), ft = 0.0;
        if (steepest) t = std::max(t, 1.0);
        Vector zt;
        if (!line_search(z, f, d, slope, t, zt, ft)) {
            if (!budget_left()) return finish(z, f, false, "Function evaluation limit reached");
            if (steepest) return finish(z, f, false, "No acceptable step");
            since_restart = 0;
            for (std::size_t i = 0; i < n_; ++i) d[i] = -g[i];
            continue;
        }
        t_prev = t;

        Vector gt = gradient(zt, ft);
        double num = 0.0;
        for (std::size_t i = 0; i < n_; ++i) num += gt[i] * (gt[i] - g[i]);
        const double beta = std::max(0.0, num / dot(g, g));
        ++since_restart;
        const bool restart = since_restart >= n_ || !std::isfinite(beta);
        for (std::size_t i = 0; i < n_; ++i) d[i] = -gt[i] + (restart ? 0.0 : beta * d[i]);
        if (restart) since_restart = 0;

        z = std::move(zt);
        f = ft;
        g = std::move(gt);
    }
    finish(z, f, stationary(g, f), "Iteration limit reached");
}

void Minimizer::nelder_mead(Vector z) {
    const std::size_t m = n_ + 1;
    std::vector<Vector> v(m, z);
    Vector fv(m);
    fv[0] = value(z);
    if (!std::isfinite(fv[0])) throw EvaluationError("minimize: objective not finite at the start", to_x(z));
    for (std::size_t i = 0; i < n_; ++i) {
        v[i + 1][i] += 0.1 * std::max(std::fabs(z[i]), 1.0);
        fv[i + 1] = value(v[i + 1]);
    }

    std::vector<std::size_t> order(m);
    auto sort_simplex = [&] {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
        std::vector<Vector> nv(m);
        Vector nf(m);
        for (std::size_t i = 0; i < m; ++i) {
            nv[i] = std::move(v[order[i]]);
            nf[i] = fv[order[i]];
        }
        v = std::move(nv);
        fv = std::move(nf);
    };
    auto diameter = [&] {
        double d = 0.0;
        for (std::size_t i = 1; i < m; ++i)
            for (std::size_t k = 0; k < n_; ++k) d = std::max(d, std::fabs(v[i][k] - v[0][k]));
        return d;
    };
    auto blend = [&](const Vector& c, const Vector& w, double coef) {
        Vector p(n_);
        for (std::size_t k = 0; k < n_; ++k) p[k] = c[k] + coef * (w[k] - c[k]);
        return p;
    };

    for (res_.iterations = 0; res_.iterations < opts_.max_iter; ++res_.iterations) {
        sort_simplex();
        if (diameter() <= opts_.simplex_tol * (1.0 + norm_inf(v[0])))
            return finish(v[0], fv[0], true, "Simplex size below tolerance");
        if (!budget_left()) return finish(v[0], fv[0], false, "Function evaluation limit reached");

        Vector c(n_, 0.0);
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t k = 0; k < n_; ++k) c[k] += v[i][k] / static_cast<double>(n_);

        const Vector r = blend(c, v[n_], -1.0);
        const double fr = value(r);
        if (fr < fv[0]) {
            const Vector e = blend(c, v[n_], -2.0);
            const double fe = value(e);
            if (fe < fr) {
                v[n_] = e;
                fv[n_] = fe;
            } else {
                v[n_] = r;
                fv[n_] = fr;
            }
            continue;
        }
        if (fr < fv[n_ - 1]) {
            v[n_] = r;
            fv[n_] = fr;
            continue;
        }
        const bool outside = fr < fv[n_];
        const Vector k = outside ? blend(c, r, 0.5) : blend(c, v[n_], 0.5);
        const double fk = value(k);
        if (fk < (outside ? fr : fv[n_])) {
            v[n_] = k;
            fv[n_] = fk;
            continue;
        }
        for (std::size_t i = 1; i < m; ++i) {
            v[i] = blend(v[0], v[i], 0.5);
            fv[i] = value(v[i]);
        }
    }
    sort_simplex();
    finish(v[0], fv[0], false, "Iteration limit reached");
}

MinimizeResult Minimizer::run(const Vector& x0) {
    opts_.validate(n_);
    if (x0.size() != n_) throw DimensionError("minimize: start has wrong length");
    Vector z(n_);
    for (std::size_t i = 0; i < n_; ++i) z[i] = x0[i] / scale_[i];

    switch (opts_.method) {
        case MinimizeMethod::vm: variable_metric(std::move(z)); break;
        case MinimizeMethod::cg: conjugate_gradient(std::move(z)); break;
        case MinimizeMethod::neldermead: nelder_mead(std::move(z)); break;
    }

    const ScalarFunction g = [this](const Vector& x) { return obj_(x); };
    const double fx = res_.value;
    try {
        res_.kkt_gradient_norm = norm_inf(fd_gradient(g, res_.x, opts_.gradient, &fx));
    } catch (const EvaluationError&) {
        res_.kkt_gradient_norm = kInf;
    }
    return res_;
}

}  // namespace

MinimizeResult minimize(const ScaledObjective& objective, const Vector& x0, const MinimizeOptions& opts) {
    Minimizer m(objective, opts);
    return m.run(x0);
}

}  // namespace nleq
