#include "nleq/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <future>
#include <limits>

#include "nleq/errors.hpp"

namespace nleq {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

using Clock = std::chrono::steady_clock;

double elapsed_us(Clock::time_point t0) {
    return std::chrono::duration<double, std::micro>(Clock::now() - t0).count();
}

RootResult failed_root(const Vector& x0, const std::string& what) {
    RootResult r;
    r.x = x0;
    r.termcd = termcd::eval_error;
    r.fnorm = kNaN;
    r.message = what;
    return r;
}

// Runs solve_root, turning any exception into a termcd -1 result.
RootResult guarded_root(const ProblemSpec& problem, const Vector& x0, const RootOptions& opts) {
    try {
        return solve_root(problem, x0, opts);
    } catch (const std::exception& e) {
        return failed_root(x0, e.what());
    }
}

void check_pairs(const ProblemSpec& problem, const std::vector<RootMethod>& methods,
                 const std::vector<GlobalStrategy>& globals) {
    if (methods.empty()) throw InputError("method list is empty");
    if (globals.empty()) throw InputError("global strategy list is empty");
    if (problem.n_params != problem.n_residuals)
        throw DimensionError("problem " + problem.name + " is not square");
}

}  // namespace

GridReport run_grid(const ProblemSpec& problem, const NamedStart& start,
                    const std::vector<RootMethod>& methods,
                    const std::vector<GlobalStrategy>& globals, const RootOptions& opts,
                    bool parallel) {
    check_pairs(problem, methods, globals);
    opts.validate();

    GridReport report;
    report.problem = problem.name;
    report.start = start.name;
    for (RootMethod m : methods)
        for (GlobalStrategy g : globals) report.rows.push_back({m, g, {}, 0.0});

    auto cell = [&](GridRow& row) {
        RootOptions o = opts;
        o.method = row.method;
        o.global = row.global;
        const auto t0 = Clock::now();
        row.result = guarded_root(problem, start.x, o);
        row.wall_us = elapsed_us(t0);
    };

    if (parallel) {
        std::vector<std::future<void>> tasks;
        tasks.reserve(report.rows.size());
        for (GridRow& row : report.rows) tasks.push_back(std::async(std::launch::async, cell, std::ref(row)));
        for (auto& t : tasks) t.get();
    } else {
        for (GridRow& row : report.rows) cell(row);
    }
    return report;
}

CascadeResult run_cascade(const ProblemSpec& problem, const NamedStart& start,
                          const std::vector<RootMethod>& methods,
                          const std::vector<GlobalStrategy>& globals, const RootOptions& opts) {
    CascadeResult out;
    out.problem = problem.name;
    out.start = start.name;
    for (RootMethod m : methods) {
        for (GlobalStrategy g : globals) {
            RootOptions o = opts;
            o.method = m;
            o.global = g;
            RootResult r = guarded_root(problem, start.x, o);
            out.trace.push_back({m, g, r.termcd, 2.0 * r.fnorm, r.message});
            if (r.termcd == termcd::fcrit) {
                out.winner = out.trace.back();
                out.result = std::move(r);
                return out;
            }
        }
    }
    return out;
}

std::string_view to_string(SolverFamily f) noexcept {
    switch (f) {
        case SolverFamily::root: return "root";
        case SolverFamily::spectral: return "spectral";
        case SolverFamily::spectral_accel: return "spectral-accel";
        case SolverFamily::lsq: return "lsq";
        case SolverFamily::minimize: return "minimize";
    }
    return "?";
}

SolverFamily parse_solver_family(std::string_view name) {
    for (SolverFamily f : {SolverFamily::root, SolverFamily::spectral, SolverFamily::spectral_accel,
                           SolverFamily::lsq, SolverFamily::minimize})
        if (name == to_string(f)) return f;
    throw InputError("unknown solver family: " + std::string(name));
}

SolverConfig SolverConfig::make(SolverFamily family) {
    SolverConfig c;
    c.family = family;
    if (family == SolverFamily::spectral_accel) c.spectral.acceleration = true;
    return c;
}

std::string SolverConfig::display_label() const {
    if (!label.empty()) return label;
    std::string s(to_string(family));
    switch (family) {
        case SolverFamily::root:
            return s + ":" + std::string(to_string(root.method)) + "/" + std::string(to_string(root.global));
        case SolverFamily::minimize: return s + ":" + std::string(to_string(minimize.method));
        default: return s;
    }
}

ComparisonRow run_solver(const ProblemSpec& problem, const NamedStart& start, const SolverConfig& solver) {
    ComparisonRow row;
    row.problem = problem.name;
    row.start = start.name;
    row.solver = solver.display_label();
    row.family = solver.family;
    row.x = start.x;
    row.sumsq = kNaN;

    const auto t0 = Clock::now();
    try {
        switch (solver.family) {
            case SolverFamily::root: {
                RootResult r = solve_root(problem, start.x, solver.root);
                row.x = r.x;
                row.converged = r.termcd == termcd::fcrit;
                row.message = r.message;
                row.detail = std::move(r);
                break;
            }
            case SolverFamily::spectral:
            case SolverFamily::spectral_accel: {
                SpectralOptions o = solver.spectral;
                o.acceleration = solver.family == SolverFamily::spectral_accel;
                SpectralResult r = solve_spectral(problem, start.x, o);
                row.x = r.x;
                row.converged = r.converged;
                row.message = r.message;
                row.detail = std::move(r);
                break;
            }
            case SolverFamily::lsq: {
                LsqResult r = solve_lsq(problem, start.x, solver.lsq);
                row.x = r.x;
                row.converged = !r.budget_exhausted;
                row.message = r.message;
                row.detail = std::move(r);
                break;
            }
            case SolverFamily::minimize: {
                MinimizeResult r = minimize(ScaledObjective(problem, solver.rscale), start.x, solver.minimize);
                row.x = r.x;
                row.converged = r.converged;
                row.message = r.message;
                row.detail = std::move(r);
                break;
            }
        }
        row.wall_us = elapsed_us(t0);
        row.sumsq = sumsq(problem, row.x);
    } catch (const std::exception& e) {
        row.wall_us = elapsed_us(t0);
        row.converged = false;
        row.message = e.what();
    }
    return row;
}

ComparisonTable run_comparison(const std::vector<ProblemSpec>& problems,
                               const std::vector<std::string>& starts,
                               const std::vector<SolverConfig>& solvers, std::size_t reps) {
    ComparisonTable table;
    for (const ProblemSpec& p : problems) {
        std::vector<NamedStart> chosen;
        if (starts.empty()) {
            chosen = p.starts;
        } else {
            for (const std::string& s : starts) chosen.push_back({s, p.start(s)});
        }
        for (const NamedStart& st : chosen) {
            for (const SolverConfig& solver : solvers) {
                ComparisonRow row = run_solver(p, st, solver);
                if (reps > 0) {
                    Timing t;
                    t.reps = reps;
                    t.min_us = std::numeric_limits<double>::infinity();
                    double total = 0.0;
                    for (std::size_t k = 0; k < reps; ++k) {
                        const double us = run_solver(p, st, solver).wall_us;
                        t.min_us = std::min(t.min_us, us);
                        t.max_us = std::max(t.max_us, us);
                        total += us;
                    }
                    t.mean_us = std::clamp(total / static_cast<double>(reps), t.min_us, t.max_us);
                    row.timing = t;
                }
                table.rows.push_back(std::move(row));
            }
        }
    }
    return table;
}

}  // namespace nleq
