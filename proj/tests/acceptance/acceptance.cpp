// Acceptance checks: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "nleq/harness.hpp"

using namespace nleq;

namespace {

struct Check {
    bool ok = true;
    std::ostringstream note;

    void require(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            note << " [failed: " << what << "]";
        }
    }
};

const std::vector<GlobalStrategy> kGlobals(std::begin(kAllGlobals), std::end(kAllGlobals));
const std::vector<RootMethod> kBoth = {RootMethod::newton, RootMethod::broyden};

NamedStart named(const ProblemSpec& p, const char* s) { return {s, p.start(s)}; }

void criterion1(Check& c) {
    double worst = 0.0;
    for (std::string_view pid : kDgvIds)
        for (bool reduced : {false, true}) {
            const ProblemSpec p = make_dgv_problem(pid, reduced);
            const double ss = sum_of_squares(p.evaluate(*p.known_solution));
            worst = std::max(worst, ss);
            c.require(ss <= 1e-12, p.name);
        }
    c.note << " max sumsq " << worst;
}

void criterion2(Check& c) {
    const ProblemSpec p = make_problem("dgv-full:0121a");
    const CascadeResult r = run_cascade(
        p, named(p, "x0"), kBoth,
        {GlobalStrategy::qline, GlobalStrategy::cline, GlobalStrategy::gline, GlobalStrategy::pwldog,
         GlobalStrategy::dbldog, GlobalStrategy::hook, GlobalStrategy::none});
    c.require(r.winner.has_value(), "winner exists");
    if (!r.winner) return;
    c.require(r.winner->sumsq <= 1e-16, "sumsq <= 1e-16");
    for (std::size_t i = 0; i < 8; ++i)
        c.require(std::fabs(r.result->x[i] - (*p.known_solution)[i]) <= 1e-4, "x within 1e-4");
    c.note << " winner " << to_string(r.winner->method) << "/" << to_string(r.winner->global) << " sumsq "
           << r.winner->sumsq;
}

void criterion3(Check& c) {
    const ProblemSpec p = make_problem("dgv-full:0121a");
    c.require(RootOptions{}.max_iter == 150, "default cap 150");
    const GridReport g = run_grid(p, named(p, "x0"), kBoth, kGlobals);
    c.require(g.rows.size() == 14, "14 rows");
    for (const GridRow& r : g.rows) {
        const std::string tag = std::string(to_string(r.method)) + "/" + std::string(to_string(r.global));
        if (r.method == RootMethod::newton) {
            c.require(r.result.termcd == 1 && r.result.fnorm <= 1e-16, tag);
            if (r.global == GlobalStrategy::none) {
                c.require(r.result.iter <= 40, "Newton/none iterations");
                c.note << " Newton/none iter " << r.result.iter;
            }
        } else if (is_line_search(r.global)) {
            c.require(r.result.termcd == 1, tag);
        } else if (is_trust_region(r.global)) {
            c.require(r.result.termcd == 1 || (r.result.termcd == 4 && r.result.iter == 150), tag);
        }
    }
}

void criterion4(Check& c) {
    const ProblemSpec full = make_problem("dgv-full:0121a");
    const LsqResult a = solve_lsq(full, full.default_start());
    c.require(a.ss <= 1e-12, "full sumsq");
    c.require(a.singvals.front() / a.singvals.back() >= 1e5, "span ratio");
    c.require(std::fabs(a.singvals.front() - 8523.0) <= 0.02 * 8523.0, "full largest singval");
    const ProblemSpec red = make_problem("dgv-reduced:0121a");
    const LsqResult b = solve_lsq(red, red.default_start());
    c.require(b.ss <= 1e-12, "reduced sumsq");
    c.require(std::fabs(b.singvals.front() - 8515.0) <= 0.02 * 8515.0, "reduced largest singval");
    c.note << " full ss " << a.ss << " sv " << a.singvals.front() << ".." << a.singvals.back() << "; reduced ss "
           << b.ss << " sv " << b.singvals.front() << ".." << b.singvals.back();
}

void criterion5(Check& c) {
    const ProblemSpec full = make_problem("dgv-full:0121a");
    const SpectralResult plain = solve_spectral(full, full.default_start());
    c.require(!plain.converged, "plain DF-SANE does not converge");
    SpectralOptions o;
    o.history = 25;
    o.max_iter = 200000;
    for (const char* name : {"dgv-full:0121a", "dgv-reduced:0121a"}) {
        const ProblemSpec p = make_problem(name);
        const SpectralResult r = solve_spectral_accelerated(p, p.default_start(), o);
        c.require(r.converged && r.ss <= 1e-10, std::string("accelerated ") + name);
        c.note << " " << name << " ss " << r.ss << " in " << r.iterations << " it;";
    }
}

void criterion6(Check& c) {
    const ProblemSpec p = make_problem("trigexp:500");
    RootOptions ro;
    ro.method = RootMethod::newton;
    const double newton = 2.0 * solve_root(p, p.default_start(), ro).fnorm;
    const double lm = solve_lsq(p, p.default_start()).ss;
    const double plain = solve_spectral(p, p.default_start()).ss;
    const double accel = solve_spectral_accelerated(p, p.default_start()).ss;
    c.require(newton <= 1e-10, "Newton");
    c.require(lm <= 1e-10, "LM");
    c.require(plain <= 1e-10, "DF-SANE");
    c.require(accel <= 1e-10, "accelerated DF-SANE");
    c.note << " Newton " << newton << " LM " << lm << " spectral " << plain << " accel " << accel;
}

void criterion7(Check& c) {
    const ProblemSpec p = make_problem("brent:50");
    for (GlobalStrategy g : {GlobalStrategy::cline, GlobalStrategy::qline, GlobalStrategy::gline}) {
        RootOptions o;
        o.method = RootMethod::newton;
        o.global = g;
        const RootResult r = solve_root(p, p.default_start(), o);
        c.require(2.0 * r.fnorm <= 1e-12, std::string("Newton/") + std::string(to_string(g)));
    }
    SpectralOptions o;
    o.memory = 200;
    o.max_iter = 5000;
    const SpectralResult r = solve_spectral(p, p.default_start(), o);
    c.require(r.ss <= 1e-10, "DF-SANE M=200");
    c.note << " DF-SANE M=200 ss " << r.ss << " in " << r.iterations << " it";
}

void criterion8(Check& c) {
    const ProblemSpec p = make_problem("simple2");
    const MinimizeResult r = minimize(ScaledObjective(p), p.start("xstart3"));
    const bool trapped = std::fabs(r.value - 0.1833616547) <= 1e-6 && r.kkt_gradient_norm <= 1e-5;
    c.require(trapped || r.value <= 1e-12, "vm trap or escape");
    const ComparisonTable t = run_comparison(
        {p}, {}, {SolverConfig::make(SolverFamily::root), SolverConfig::make(SolverFamily::spectral),
                  SolverConfig::make(SolverFamily::lsq), SolverConfig::make(SolverFamily::minimize)});
    std::size_t at_trap = 0;
    for (const ComparisonRow& row : t.rows) at_trap += std::fabs(row.sumsq - 0.1833616547) <= 1e-6;
    c.require(at_trap >= 1, "comparison row at the trap value");
    c.note << " vm value " << r.value << " kkt " << r.kkt_gradient_norm << "; trap rows " << at_trap;
}

void criterion9(Check& c) {
    const ProblemSpec p = make_problem("dgv-reduced:0121a");
    MinimizeOptions o;
    o.parscale = Vector{.001, .0001, 1, 1, 10, 1};
    const MinimizeResult r = minimize(ScaledObjective(p), p.default_start(), o);
    c.require(r.value <= 1e-14, "value <= 1e-14");
    c.require(std::fabs(r.x[0] - 0.0030999) <= 1e-5 && std::fabs(r.x[1] + 2.2394e-4) <= 1e-5, "parameters");
    c.note << " value " << r.value << " x " << r.x[0] << ", " << r.x[1];
}

void criterion10(Check& c) {
    // secant condition
    std::mt19937 gen(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double secant = 0.0;
    for (int t = 0; t < 100; ++t) {
        DenseMatrix b(5, 5);
        Vector s(5), y(5);
        for (std::size_t i = 0; i < 5; ++i) {
            s[i] = u(gen);
            y[i] = u(gen);
            for (std::size_t k = 0; k < 5; ++k) b(i, k) = u(gen);
        }
        const Vector bs = multiply(broyden_update(b, s, y), s);
        for (std::size_t i = 0; i < 5; ++i) secant = std::max(secant, std::fabs(bs[i] - y[i]));
    }
    c.require(secant <= 1e-12, "secant condition");

    // Armijo on every accepted line-search step, fnorm identity on every result
    std::size_t steps = 0, armijo_bad = 0, fnorm_bad = 0;
    for (const char* name : {"simple2", "dgv-full:0121a", "dgv-reduced:0121a", "brent:50", "trigexp:50"}) {
        const ProblemSpec p = make_problem(name);
        for (const NamedStart& st : p.starts)
            for (RootMethod m : kBoth)
                for (GlobalStrategy g : kGlobals) {
                    RootOptions o;
                    o.method = m;
                    o.global = g;
                    o.observer = [&](const RootStepRecord& s) {
                        if (!is_line_search(g)) return;
                        ++steps;
                        if (!(s.fnorm_after <= s.fnorm_before + 1e-4 * s.lambda * s.slope)) ++armijo_bad;
                    };
                    try {
                        const RootResult r = solve_root(p, st.x, o);
                        if (r.termcd != termcd::eval_error && r.fnorm != 0.5 * sum_of_squares(r.fvec)) ++fnorm_bad;
                    } catch (const std::exception&) {
                    }
                }
    }
    c.require(armijo_bad == 0, "Armijo");
    c.require(fnorm_bad == 0, "fnorm identity");

    // finite-difference gradient of sumsq against 2 J^T r
    double worst = 0.0;
    for (const CatalogEntry& e : problem_catalog()) {
        const ProblemSpec p = make_problem(e.name);
        for (const NamedStart& st : p.starts) {
            const Vector r = p.evaluate(st.x);
            const DenseMatrix j = fd_jacobian(p.bound(), st.x, JacobianScheme::central(), &r);
            Vector g = multiply_transposed(j, r);
            for (double& v : g) v *= 2.0;
            const ScalarFunction f = [&](const Vector& x) { return sumsq(p, x); };
            const Vector gf = fd_gradient(f, st.x, JacobianScheme::central());
            const double scale = std::max(norm_inf(g), 1e-300);
            for (std::size_t i = 0; i < g.size(); ++i) worst = std::max(worst, std::fabs(gf[i] - g[i]) / scale);
        }
    }
    c.require(worst <= 1e-4, "FD gradient vs 2 J^T r");

    // parallel grid equals sequential grid
    bool same = true;
    for (const char* name : {"dgv-full:0121a", "simple2", "brent:50"}) {
        const ProblemSpec p = make_problem(name);
        const NamedStart st{"start", p.default_start()};
        const GridReport a = run_grid(p, st, kBoth, kGlobals, {}, false);
        const GridReport b = run_grid(p, st, kBoth, kGlobals, {}, true);
        for (std::size_t i = 0; i < a.rows.size(); ++i) {
            const RootResult& x = a.rows[i].result;
            const RootResult& y = b.rows[i].result;
            const bool fn = (std::isnan(x.fnorm) && std::isnan(y.fnorm)) || x.fnorm == y.fnorm;
            same = same && fn && x.x == y.x && x.termcd == y.termcd && x.fcnt == y.fcnt && x.iter == y.iter;
        }
    }
    c.require(same, "parallel grid == sequential grid");
    c.note << " secant " << secant << "; " << steps << " line-search steps checked; gradient rel err " << worst;
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<void(Check&)>>> criteria = {
        {"DGV published solutions have near-zero residuals", criterion1},
        {"Newton cascade on DGV 0121a full", criterion2},
        {"Method/global grid shape on DGV 0121a full", criterion3},
        {"Levenberg-Marquardt on DGV 0121a with singular values", criterion4},
        {"Plain vs accelerated spectral solvers on DGV 0121a", criterion5},
        {"trigexp n=500 with Newton, LM and both spectral solvers", criterion6},
        {"Brent n=50 with Newton line searches and DF-SANE M=200", criterion7},
        {"simple2 local-minimum trap", criterion8},
        {"Variable-metric minimizer with parscale on reduced DGV", criterion9},
        {"Property suites", criterion10},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Check c;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            criteria[i].second(c);
        } catch (const std::exception& e) {
            c.ok = false;
            c.note << " [exception: " << e.what() << "]";
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("%s criterion %zu: %s (%.2fs)%s\n", c.ok ? "PASS" : "FAIL", i + 1, criteria[i].first, secs,
                    c.note.str().c_str());
        std::fflush(stdout);
        failures += !c.ok;
    }
    return failures == 0 ? 0 : 1;
}
