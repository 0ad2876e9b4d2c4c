#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "nleq/errors.hpp"
#include "nleq/rootfind.hpp"

using namespace nleq;

TEST(RootNames, RoundTrip) {
    for (GlobalStrategy g : kAllGlobals) EXPECT_EQ(parse_global_strategy(to_string(g)), g);
    EXPECT_EQ(parse_root_method("newton"), RootMethod::newton);
    EXPECT_EQ(parse_root_method("Broyden"), RootMethod::broyden);
    EXPECT_THROW(parse_global_strategy("wolfe"), InputError);
    EXPECT_EQ(termcd_message(4), "Maxiter");
}

TEST(RootOptions, Defaults) {
    const RootOptions o;
    EXPECT_EQ(o.max_iter, 150u);
    EXPECT_EQ(o.jacobian.kind, DiffScheme::central);
    RootOptions bad;
    bad.ftol = 0.0;
    EXPECT_THROW(bad.validate(), InputError);
}

// Oracle: numpy solve with the analytic Jacobian at (2, 0.5).
TEST(NewtonStep, Simple2MatchesOracle) {
    const DenseMatrix j{{4.0, 1.0}, {std::exp(1.0), 0.75}};
    const Vector r = simple2_residual({2.0, 0.5});
    const Vector d = newton_step(j, r);
    EXPECT_NEAR(d[0], -2.9966763127959117, 1e-12);
    EXPECT_NEAR(d[1], 9.736705251183647, 1e-12);
}

TEST(Broyden, SecantConditionHolds) {
    std::mt19937 gen(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        DenseMatrix b(4, 4);
        Vector s(4), y(4);
        for (std::size_t i = 0; i < 4; ++i) {
            s[i] = u(gen);
            y[i] = u(gen);
            for (std::size_t k = 0; k < 4; ++k) b(i, k) = u(gen);
        }
        const Vector bs = multiply(broyden_update(b, s, y), s);
        for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(bs[i], y[i], 1e-12);
    }
    EXPECT_THROW(broyden_update(DenseMatrix::identity(2), {0.0, 0.0}, {1.0, 1.0}), DegenerateStepError);
}

TEST(SolveRoot, AlreadyAtRootStopsImmediately) {
    const ProblemSpec p = make_problem("simple2");
    RootOptions o;
    o.method = RootMethod::newton;
    o.global = GlobalStrategy::none;
    const RootResult r = solve_root(p, {1.0, 1.0}, o);
    EXPECT_EQ(r.termcd, termcd::fcrit);
    EXPECT_LE(r.iter, 1u);
}

TEST(SolveRoot, Simple2FromXstart2SolvedOrTrapped) {
    // line searches reach the root; trust regions may stop at the local minimum
    const ProblemSpec p = make_problem("simple2");
    for (RootMethod m : {RootMethod::newton, RootMethod::broyden})
        for (GlobalStrategy g : kAllGlobals) {
            if (g == GlobalStrategy::none) continue;
            RootOptions o;
            o.method = m;
            o.global = g;
            const RootResult r = solve_root(p, p.start("xstart2"), o);
            const std::string tag = std::string(to_string(m)) + "/" + std::string(to_string(g));
            if (is_line_search(g)) {
                EXPECT_EQ(r.termcd, termcd::fcrit) << tag;
                EXPECT_LE(norm_inf(r.fvec), 1e-8) << tag;
            } else {
                const double ss = sum_of_squares(r.fvec);
                EXPECT_TRUE(r.termcd == termcd::fcrit || std::fabs(ss - 0.1833616547) <= 1e-6) << tag << " " << ss;
            }
        }
}

TEST(SolveRoot, FnormIsHalfSumOfSquaresAndArmijoHolds) {
    for (const char* name : {"simple2", "dgv-full:0121a", "dgv-reduced:0121a", "brent:20"}) {
        const ProblemSpec p = make_problem(name);
        for (RootMethod m : {RootMethod::newton, RootMethod::broyden})
            for (GlobalStrategy g : kAllGlobals) {
                RootOptions o;
                o.method = m;
                o.global = g;
                std::size_t violations = 0;
                o.observer = [&](const RootStepRecord& s) {
                    if (is_line_search(g) && !(s.fnorm_after <= s.fnorm_before + 1e-4 * s.lambda * s.slope))
                        ++violations;
                };
                RootResult r;
                try {
                    r = solve_root(p, p.default_start(), o);
                } catch (const SingularMatrixError&) {
                    continue;
                }
                EXPECT_EQ(violations, 0u) << name << " " << to_string(m) << "/" << to_string(g);
                if (r.termcd != termcd::eval_error) {
                    EXPECT_DOUBLE_EQ(r.fnorm, 0.5 * sum_of_squares(r.fvec)) << name;
                }
            }
    }
}

TEST(SolveRoot, TrustRadiusStaysAboveFloorOrCollapses) {
    const ProblemSpec p = make_problem("simple2");
    RootOptions o;
    o.method = RootMethod::newton;
    o.global = GlobalStrategy::dbldog;
    bool ok = true;
    o.observer = [&](const RootStepRecord& s) { ok = ok && s.radius > 0.0; };
    const RootResult r = solve_root(p, p.start("xstart3"), o);
    EXPECT_TRUE(ok);
    EXPECT_TRUE(r.termcd == termcd::fcrit || r.termcd == termcd::tr_collapse || r.termcd == termcd::xcrit);
}

TEST(SolveRoot, PureNewtonDivergenceIsAnEvalError) {
    const ProblemSpec p = make_problem("simple2");
    RootOptions o;
    o.method = RootMethod::newton;
    o.global = GlobalStrategy::none;
    const RootResult r = solve_root(p, p.start("xstart1"), o);
    EXPECT_EQ(r.termcd, termcd::eval_error);
    EXPECT_TRUE(all_finite(r.x));
}

TEST(SolveRoot, IterationCapIsHonoured) {
    const ProblemSpec p = make_problem("dgv-full:0121a");
    RootOptions o;
    o.method = RootMethod::broyden;
    o.global = GlobalStrategy::pwldog;
    o.max_iter = 7;
    const RootResult r = solve_root(p, p.default_start(), o);
    EXPECT_LE(r.iter, 7u);
    if (r.termcd == termcd::maxiter) {
        EXPECT_EQ(r.iter, 7u);
    }
}

TEST(SolveRoot, InputErrors) {
    const ProblemSpec p = make_problem("simple2");
    EXPECT_THROW(solve_root(p, {1.0}), DimensionError);
    EXPECT_THROW(solve_root(p, {NAN, 1.0}), InputError);
    ProblemSpec rect = p;
    rect.n_residuals = 3;
    EXPECT_THROW(solve_root(rect, {1.0, 1.0}), DimensionError);
}
