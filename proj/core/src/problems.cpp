#include "nleq/problems.hpp"

#include <charconv>
#include <cmath>

#include "nleq/errors.hpp"

namespace nleq {

namespace {

void require_size(const Vector& v, std::size_t n, const char* what) {
    if (v.size() != n)
        throw DimensionError(std::string(what) + ": expected length " + std::to_string(n) +
                             ", got " + std::to_string(v.size()));
}

void require_min_size(const Vector& v, std::size_t n, const char* what) {
    if (v.size() < n)
        throw DimensionError(std::string(what) + ": need at least " + std::to_string(n) +
                             " parameters, got " + std::to_string(v.size()));
}

// Terms shared by the full and reduced forms; a,b,c,d,t,u,v,w as in the
// original statement of the problem.
Vector dgv_equations(double a, double b, double c, double d, double t, double u, double v,
                     double w, const Vector& s) {
    const double t2mv2 = t * t - v * v;
    const double u2mw2 = u * u - w * w;
    const double t2m3v2 = t * t - 3.0 * v * v;
    const double v2m3t2 = v * v - 3.0 * t * t;
    const double u2m3w2 = u * u - 3.0 * w * w;
    const double w2m3u2 = w * w - 3.0 * u * u;
    const double ctv = c * t * v, duw = d * u * w, atv = a * t * v, buw = b * u * w;
    const double at = a * t, bu = b * u, cv = c * v, dw = d * w;
    const double ct = c * t, av = a * v, du = d * u, bw = b * w;

    return {
        a + b - s[0],
        c + d - s[1],
        at + bu - cv - dw - s[2],
        av + bw + ct + du - s[3],
        a * t2mv2 - 2.0 * ctv + b * u2mw2 - 2.0 * duw - s[4],
        c * t2mv2 + 2.0 * atv + d * u2mw2 + 2.0 * buw - s[5],
        at * t2m3v2 + cv * v2m3t2 + bu * u2m3w2 + dw * w2m3u2 - s[6],
        ct * t2m3v2 - av * v2m3t2 + du * u2m3w2 - bw * w2m3u2 - s[7],
    };
}

Vector scaled(const Vector& x, double f) {
    Vector y = x;
    for (double& v : y) v *= f;
    return y;
}

std::size_t parse_size_suffix(std::string_view name, std::string_view key) {
    std::size_t n = 0;
    const char* first = key.data();
    const char* last = key.data() + key.size();
    auto [ptr, ec] = std::from_chars(first, last, n);
    if (ec != std::errc{} || ptr != last || key.empty()) throw UnknownProblemError(std::string(name));
    return n;
}

}  // namespace

// ---- ProblemSpec -------------------------------------------------------------

Vector ProblemSpec::evaluate(const Vector& x) const {
    require_size(x, n_params, "residual argument");
    Vector r = residual(x, rhs);
    require_size(r, n_residuals, "residual value");
    return r;
}

VectorFunction ProblemSpec::bound() const {
    // copies, so the callable stays valid if the problem moves
    return [spec = *this](const Vector& x) { return spec.evaluate(x); };
}

const Vector& ProblemSpec::start(std::string_view start_name) const {
    for (const auto& s : starts)
        if (s.name == start_name) return s.x;
    throw InputError("problem " + name + " has no start named " + std::string(start_name));
}

const Vector& ProblemSpec::default_start() const {
    if (starts.empty()) throw InputError("problem " + name + " has no starts");
    return starts.front().x;
}

// ---- Dennis-Gay-Vu -----------------------------------------------------------

DgvData dgv_prep(std::string_view pid, bool reduced) {
    DgvData d;
    d.pid = std::string(pid);
    d.reduced = reduced;
    if (pid == "791129") {
        d.sigma = {0.485, -0.0019, -0.0581, 0.015, 0.105, 0.0406, 0.167, -0.399};
        d.x0 = {0.299, 0.186, -0.0273, 0.0254, -0.474, 0.474, -0.0892, 0.0892};
        d.xstar = {-6.321349025e-3, 4.913213490e-1, -1.998156408e-3, 9.815640840e-5,
                   1.226569755e-1,  -1.003153205e-1, -4.023517593,   -2.071785527e-2};
    } else if (pid == "791226") {
        d.sigma = {-0.69, -0.044, -1.57, -1.31, -2.65, 2.0, -12.6, 9.48};
        d.x0 = {-0.3, -0.39, 0.3, -0.344, -1.2, 2.69, 1.59, -1.5};
        d.xstar = {-3.116266056e-1, -3.783733944e-1, 3.282442301e-1, -3.722442301e-1,
                   -1.282227094,    2.494300312,     1.554865879,    -1.384637843};
    } else if (pid == "0121a") {
        d.sigma = {-0.816, -0.017, -1.826, -0.754, -4.839, -3.259, -14.023, 15.467};
        d.x0 = {-0.41, -0.775, 0.03, -0.047, -2.565, 2.565, -0.754, 0.754};
        d.xstar = {3.099869097e-3, -8.190998691e-1, -2.239405352e-4, -1.677605946e-2,
                   2.681514498,    2.250215931,     -2.024170463e+1, 7.970982952e-1};
    } else if (pid == "0121b") {
        d.sigma = {-0.809, -0.021, -2.04, -0.614, -6.903, -2.934, -26.328, 18.639};
        d.x0 = {-0.056, -0.753, 0.026, -0.047, -2.991, 2.991, -0.568, 0.568};
        d.xstar = {9.034542990e-3, -8.180345430e-1, -4.450738446e-4, -2.055492616e-2,
                   2.773429036,    2.529477259,     -1.480097186e+1, 5.220468844e-1};
    } else if (pid == "0121c") {
        d.sigma = {-0.807, -0.021, -2.379, -0.364, -10.541, -1.961, -51.551, 21.053};
        d.x0 = {-0.074, -0.733, 0.013, -0.034, -3.632, 3.632, -0.289, 0.289};
        d.xstar = {5.140417418e-2, -8.584041742e-1, 1.047333626e-3, -2.204733363e-2,
                   2.861205288,    2.949155438,     -8.304243489,   -1.454992413e-1};
    } else {
        throw UnknownProblemError(std::string(pid));
    }
    if (reduced) d.x0 = dgv_reduce(d.x0);
    return d;
}

Vector dgv_full_residual(const Vector& x, const Vector& rhs) {
    require_size(x, 8, "dgv_full_residual x");
    require_size(rhs, 8, "dgv_full_residual rhs");
    return dgv_equations(x[0], x[1], x[2], x[3], x[4], x[5], x[6], x[7], rhs);
}

Vector dgv_reduced_residual(const Vector& x, const Vector& rhs) {
    require_size(x, 6, "dgv_reduced_residual x");
    require_size(rhs, 8, "dgv_reduced_residual rhs");
    const double b = rhs[0] - x[0];
    const double d = rhs[1] - x[1];
    Vector full = dgv_equations(x[0], b, x[1], d, x[2], x[3], x[4], x[5], rhs);
    return Vector(full.begin() + 2, full.end());
}

Vector dgv_reduce(const Vector& x_full) {
    require_size(x_full, 8, "dgv_reduce");
    return {x_full[0], x_full[2], x_full[4], x_full[5], x_full[6], x_full[7]};
}

Vector dgv_unreduce(const Vector& x_reduced, const Vector& sigma) {
    require_size(x_reduced, 6, "dgv_unreduce x");
    require_size(sigma, 8, "dgv_unreduce sigma");
    return {x_reduced[0], sigma[0] - x_reduced[0], x_reduced[1], sigma[1] - x_reduced[1],
            x_reduced[2], x_reduced[3],            x_reduced[4], x_reduced[5]};
}

// ---- other families ----------------------------------------------------------

Vector simple2_residual(const Vector& x) {
    require_size(x, 2, "simple2_residual");
    return {x[0] * x[0] + x[1] * x[1] - 2.0, std::exp(x[0] - 1.0) + x[1] * x[1] * x[1] - 2.0};
}

Vector trigexp_residual(const Vector& x) {
    require_min_size(x, 3, "trigexp_residual");
    const std::size_t n = x.size();
    Vector f(n);
    f[0] = 3.0 * x[0] * x[0] + 2.0 * x[1] - 5.0 + std::sin(x[0] - x[1]) * std::sin(x[0] + x[1]);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        f[i] = -x[i - 1] * std::exp(x[i - 1] - x[i]) + x[i] * (4.0 + 3.0 * x[i] * x[i]) +
               2.0 * x[i + 1] + std::sin(x[i] - x[i + 1]) * std::sin(x[i] + x[i + 1]) - 8.0;
    }
    f[n - 1] = -x[n - 2] * std::exp(x[n - 2] - x[n - 1]) + 4.0 * x[n - 1] - 3.0;
    return f;
}

Vector brent_residual(const Vector& x) {
    require_min_size(x, 3, "brent_residual");
    const std::size_t n = x.size();
    Vector f(n);
    f[0] = 3.0 * x[0] * (x[1] - 2.0 * x[0]) + x[1] * x[1] / 4.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double span = x[i + 1] - x[i - 1];
        f[i] = 3.0 * x[i] * (x[i + 1] - 2.0 * x[i] + x[i - 1]) + span * span / 4.0;
    }
    const double tail = 20.0 - x[n - 2];
    f[n - 1] = 3.0 * x[n - 1] * (20.0 - 2.0 * x[n - 1] + x[n - 2]) + tail * tail / 4.0;
    return f;
}

ProblemSpec make_dgv_problem(std::string_view pid, bool reduced) {
    const DgvData d = dgv_prep(pid, reduced);
    ProblemSpec p;
    p.name = std::string(reduced ? "dgv-reduced:" : "dgv-full:") + d.pid;
    p.n_params = reduced ? 6 : 8;
    p.n_residuals = p.n_params;
    p.residual = reduced ? ResidualFunction(dgv_reduced_residual) : ResidualFunction(dgv_full_residual);
    p.rhs = d.sigma;
    p.starts = {{"x0", d.x0}, {"x0x10", scaled(d.x0, 10.0)}, {"x0x100", scaled(d.x0, 100.0)}};
    p.known_solution = reduced ? dgv_reduce(d.xstar) : d.xstar;
    return p;
}

ProblemSpec make_simple2_problem() {
    ProblemSpec p;
    p.name = "simple2";
    p.n_params = 2;
    p.n_residuals = 2;
    p.residual = [](const Vector& x, const Vector&) { return simple2_residual(x); };
    // xstart3 sits next to the local minimum of the sum of squares; the other two
    // lead to the root (1,1) from either side of it.
    p.starts = {{"xstart1", {2.0, 0.5}}, {"xstart2", {2.5, -0.5}}, {"xstart3", {1.48508, -1.0886e-06}}};
    p.known_solution = Vector{1.0, 1.0};
    return p;
}

ProblemSpec make_trigexp_problem(std::size_t n) {
    if (n < 3) throw DimensionError("trigexp needs n >= 3");
    ProblemSpec p;
    p.name = "trigexp:" + std::to_string(n);
    p.n_params = n;
    p.n_residuals = n;
    p.residual = [](const Vector& x, const Vector&) { return trigexp_residual(x); };
    p.starts = {{"zeros", Vector(n, 0.0)}};
    p.known_solution = Vector(n, 1.0);
    return p;
}

ProblemSpec make_brent_problem(std::size_t n) {
    if (n < 3) throw DimensionError("brent needs n >= 3");
    ProblemSpec p;
    p.name = "brent:" + std::to_string(n);
    p.n_params = n;
    p.n_residuals = n;
    p.residual = [](const Vector& x, const Vector&) { return brent_residual(x); };
    p.starts = {{"ones", Vector(n, 1.0)}};
    return p;
}

// ---- registry ----------------------------------------------------------------

ProblemSpec make_problem(std::string_view name) {
    const auto colon = name.find(':');
    const std::string_view family = name.substr(0, colon);
    const std::string_view arg =
        colon == std::string_view::npos ? std::string_view{} : name.substr(colon + 1);

    try {
        if (family == "dgv-full" && colon != std::string_view::npos) return make_dgv_problem(arg, false);
        if (family == "dgv-reduced" && colon != std::string_view::npos) return make_dgv_problem(arg, true);
    } catch (const UnknownProblemError&) {
        throw UnknownProblemError(std::string(name));
    }
    if (family == "simple2" && colon == std::string_view::npos) return make_simple2_problem();
    if (family == "trigexp" || family == "brent") {
        std::size_t n = family == "trigexp" ? kTrigexpDefaultN : kBrentDefaultN;
        if (colon != std::string_view::npos) n = parse_size_suffix(name, arg);
        if (n < 3) throw UnknownProblemError(std::string(name));
        return family == "trigexp" ? make_trigexp_problem(n) : make_brent_problem(n);
    }
    throw UnknownProblemError(std::string(name));
}

std::vector<CatalogEntry> problem_catalog() {
    std::vector<std::string> names;
    for (auto pid : kDgvIds) names.push_back("dgv-full:" + std::string(pid));
    for (auto pid : kDgvIds) names.push_back("dgv-reduced:" + std::string(pid));
    names.push_back("simple2");
    names.push_back("trigexp:" + std::to_string(kTrigexpDefaultN));
    names.push_back("brent:" + std::to_string(kBrentDefaultN));

    std::vector<CatalogEntry> out;
    for (const auto& n : names) {
        const ProblemSpec p = make_problem(n);
        CatalogEntry e{p.name, p.n_params, p.n_residuals, {}};
        for (const auto& s : p.starts) e.starts.push_back(s.name);
        out.push_back(std::move(e));
    }
    return out;
}

}  // namespace nleq
