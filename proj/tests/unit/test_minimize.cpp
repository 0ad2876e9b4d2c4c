#include <gtest/gtest.h>

#include <cmath>

#include "nleq/errors.hpp"
#include "nleq/minimize.hpp"

using namespace nleq;

namespace {

// r_i = x_i - i, so sum(r^2) has its minimum at (1, 2, ..., n)
ProblemSpec shifted_quadratic(std::size_t n) {
    ProblemSpec p;
    p.name = "quad";
    p.n_params = n;
    p.n_residuals = n;
    p.residual = [](const Vector& x, const Vector&) {
        Vector r(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) r[i] = x[i] - static_cast<double>(i + 1);
        return r;
    };
    p.starts = {{"zeros", Vector(n, 0.0)}};
    return p;
}

}  // namespace

TEST(Sumsq, PlainScaledAndZeroScale) {
    const ProblemSpec p = make_problem("dgv-full:0121a");
    EXPECT_LE(sumsq(p, *p.known_solution), 1e-15);
    EXPECT_EQ(sumsq(p, p.default_start(), Vector(8, 0.0)), 0.0);
    EXPECT_THROW(sumsq(p, p.default_start(), Vector(3, 1.0)), DimensionError);
}

// Oracle: direct numpy substitution at the reduced start.
TEST(Sumsq, ResidualScaledReducedStartMatchesOracle) {
    const ProblemSpec p = make_problem("dgv-reduced:0121a");
    const double v = sumsq(p, p.default_start(), Vector{1e8, 1e8, 1e3, 1e3, 1, 1});
    EXPECT_NEAR(v, 3.901493244245052e16, 3.901493244245052e16 * 1e-12);
}

TEST(Sumsq, ObjectiveMatchesScaledCoordinates) {
    // parscale invariance: the scaled-coordinate objective at z is sumsq at z * parscale
    const ProblemSpec p = make_problem("dgv-reduced:0121a");
    const Vector ps{.001, .0001, 1, 1, 10, 1};
    MinimizeOptions o;
    o.parscale = ps;
    o.max_iter = 1;
    const MinimizeResult r = minimize(ScaledObjective(p), p.default_start(), o);
    EXPECT_EQ(r.value, sumsq(p, r.x));
}

TEST(MinimizeOptions, Validation) {
    MinimizeOptions o;
    o.parscale = Vector{1.0, 0.0};
    EXPECT_THROW(o.validate(2), InputError);
    o.parscale = Vector{1.0};
    EXPECT_THROW(o.validate(2), DimensionError);
    EXPECT_DOUBLE_EQ(MinimizeOptions{}.gradient_tolerance(4), 2e-10);
    EXPECT_EQ(parse_minimize_method("cg"), MinimizeMethod::cg);
    EXPECT_THROW(parse_minimize_method("lbfgs"), InputError);
}

TEST(Minimize, ConvexQuadraticAllMethods) {
    const ProblemSpec p = shifted_quadratic(5);
    for (MinimizeMethod m : {MinimizeMethod::vm, MinimizeMethod::cg, MinimizeMethod::neldermead}) {
        MinimizeOptions o;
        o.method = m;
        const MinimizeResult r = minimize(ScaledObjective(p), Vector(5, 0.0), o);
        EXPECT_TRUE(r.converged) << to_string(m);
        for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(r.x[i], i + 1.0, 1e-6) << to_string(m);
    }
}

TEST(Minimize, ArmijoAndDescentOnEveryStep) {
    for (const char* name : {"simple2", "dgv-reduced:0121a", "brent:10"}) {
        const ProblemSpec p = make_problem(name);
        for (MinimizeMethod m : {MinimizeMethod::vm, MinimizeMethod::cg}) {
            MinimizeOptions o;
            o.method = m;
            o.max_feval = 3000;
            std::size_t bad = 0;
            o.observer = [&](const MinimizeStepRecord& s) {
                if (!(s.slope < 0.0)) ++bad;
                if (!(s.f_after <= s.f_before + 1e-4 * s.step * s.slope)) ++bad;
            };
            minimize(ScaledObjective(p), p.default_start(), o);
            EXPECT_EQ(bad, 0u) << name << " " << to_string(m);
        }
    }
}

TEST(Minimize, ConvergedResultsPassThePostHocGradientCheck) {
    const ProblemSpec p = make_problem("trigexp:20");
    for (MinimizeMethod m : {MinimizeMethod::vm, MinimizeMethod::cg}) {
        MinimizeOptions o;
        o.method = m;
        const MinimizeResult r = minimize(ScaledObjective(p), p.default_start(), o);
        ASSERT_TRUE(r.converged) << to_string(m);
        const ScalarFunction f = [&](const Vector& x) { return sumsq(p, x); };
        const Vector g = fd_gradient(f, r.x, o.gradient);
        EXPECT_LE(norm_inf(g), o.gradient_tolerance(p.n_params) * (1 + std::fabs(r.value)));
        EXPECT_DOUBLE_EQ(r.kkt_gradient_norm, norm_inf(g));
    }
}

TEST(Minimize, Simple2TrapOrEscape) {
    const ProblemSpec p = make_problem("simple2");
    const MinimizeResult r = minimize(ScaledObjective(p), p.start("xstart3"));
    const bool trapped = std::fabs(r.value - 0.1833616547) <= 1e-6 && r.kkt_gradient_norm <= 1e-5;
    EXPECT_TRUE(trapped || r.value <= 1e-12) << r.value;
}

TEST(Minimize, ReducedDgvWithParscale) {
    const ProblemSpec p = make_problem("dgv-reduced:0121a");
    MinimizeOptions o;
    o.parscale = Vector{.001, .0001, 1, 1, 10, 1};
    const MinimizeResult r = minimize(ScaledObjective(p), p.default_start(), o);
    EXPECT_LE(r.value, 1e-14);
    EXPECT_NEAR(r.x[0], 0.0030999, 1e-5);
    EXPECT_NEAR(r.x[1], -2.2394e-4, 1e-5);
}

TEST(Minimize, NelderMeadDeterministicAndSimplexBound) {
    const ProblemSpec p = make_problem("simple2");
    MinimizeOptions o;
    o.method = MinimizeMethod::neldermead;
    const MinimizeResult a = minimize(ScaledObjective(p), p.start("xstart2"), o);
    const MinimizeResult b = minimize(ScaledObjective(p), p.start("xstart2"), o);
    EXPECT_EQ(a.x, b.x);
    EXPECT_EQ(a.fevals, b.fevals);
    EXPECT_TRUE(a.converged);
    EXPECT_EQ(a.gevals, 0u);
}

TEST(Minimize, BudgetExhaustionIsNotConvergence) {
    const ProblemSpec p = make_problem("dgv-full:0121a");
    MinimizeOptions o;
    o.max_feval = 50;
    const MinimizeResult r = minimize(ScaledObjective(p), p.default_start(), o);
    EXPECT_FALSE(r.converged);
    EXPECT_LE(r.fevals, 50u + 1u);
}

TEST(Minimize, NonFiniteStartThrows) {
    ProblemSpec p = make_problem("simple2");
    p.residual = [](const Vector&, const Vector&) { return Vector{NAN, 0.0}; };
    EXPECT_THROW(minimize(ScaledObjective(p), {1.0, 1.0}), EvaluationError);
}
