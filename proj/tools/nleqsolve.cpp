// nleqsolve: command-line front end for the nleq solvers.
//
// Exit status: 0 success, 1 non-convergence under --strict (or a solver
// failure outside the harness), 2 usage error.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nleq/errors.hpp"
#include "nleq/harness.hpp"
#include "nleq/report.hpp"

namespace {

using namespace nleq;

constexpr int kExitOk = 0;
constexpr int kExitNotConverged = 1;
constexpr int kExitUsage = 2;

struct Flags {
    std::vector<std::string> problems;
    std::string start;
    std::string method;
    std::string global;
    std::string solver = "root";
    std::string jac = "central";
    std::optional<std::size_t> maxiter;
    std::optional<double> ftol;
    std::optional<double> tol;
    std::optional<std::size_t> memory;
    std::optional<std::size_t> history;
    std::string parscale;
    std::string rscale;
    std::string format = "table";
    std::size_t reps = 0;
    bool parallel = false;
    bool strict = false;
};

std::vector<std::string> split(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream in(s);
    std::string tok;
    while (std::getline(in, tok, ','))
        if (!tok.empty()) out.push_back(tok);
    return out;
}

// Every token a real number: an inline vector. Otherwise nullopt.
std::optional<Vector> parse_vector(const std::string& s) {
    const auto toks = split(s);
    if (toks.empty()) return std::nullopt;
    Vector v;
    for (const std::string& t : toks) {
        char* end = nullptr;
        const double d = std::strtod(t.c_str(), &end);
        if (end == t.c_str() || *end != '\0') return std::nullopt;
        v.push_back(d);
    }
    return v;
}

Vector require_vector(const std::string& flag, const std::string& s) {
    auto v = parse_vector(s);
    if (!v) throw InputError(flag + ": expected comma-separated reals, got '" + s + "'");
    return *v;
}

// Named starts or one inline vector; empty means the problem's default start.
std::vector<NamedStart> resolve_starts(const ProblemSpec& p, const std::string& spec, bool all_if_empty) {
    if (spec.empty()) {
        if (all_if_empty) return p.starts;
        return {p.starts.front()};
    }
    if (auto v = parse_vector(spec)) {
        if (v->size() != p.n_params)
            throw InputError("--start: " + std::to_string(v->size()) + " values for a problem with " +
                             std::to_string(p.n_params) + " parameters");
        return {{"inline", *v}};
    }
    std::vector<NamedStart> out;
    for (const std::string& name : split(spec)) out.push_back({name, p.start(name)});
    return out;
}

JacobianScheme gradient_scheme(DiffScheme kind) {
    return kind == DiffScheme::central ? kDefaultGradient : JacobianScheme::of(kind);
}

RootOptions root_options(const Flags& f) {
    RootOptions o;
    o.jacobian = JacobianScheme::of(parse_diff_scheme(f.jac));
    if (f.maxiter) o.max_iter = *f.maxiter;
    if (f.ftol) o.ftol = *f.ftol;
    return o;
}

// Builds one solver configuration per family named in --solver.
std::vector<SolverConfig> solver_configs(const Flags& f) {
    std::vector<SolverConfig> out;
    const DiffScheme kind = parse_diff_scheme(f.jac);
    for (const std::string& name : split(f.solver)) {
        SolverConfig c = SolverConfig::make(parse_solver_family(name));
        c.root = root_options(f);
        if (!f.method.empty()) {
            if (c.family == SolverFamily::root) c.root.method = parse_root_method(f.method);
            if (c.family == SolverFamily::minimize) c.minimize.method = parse_minimize_method(f.method);
        }
        if (!f.global.empty()) c.root.global = parse_global_strategy(f.global);
        if (f.maxiter) {
            c.spectral.max_iter = *f.maxiter;
            c.minimize.max_iter = *f.maxiter;
            c.lsq.max_jac = *f.maxiter;
        }
        if (f.tol) {
            c.spectral.tol = *f.tol;
            c.lsq.tol = *f.tol;
            c.minimize.gtol = *f.tol;
        }
        if (f.memory) c.spectral.memory = *f.memory;
        if (f.history) c.spectral.history = *f.history;
        c.lsq.jacobian = JacobianScheme::of(kind);
        c.minimize.gradient = gradient_scheme(kind);
        if (!f.parscale.empty()) c.minimize.parscale = require_vector("--parscale", f.parscale);
        if (!f.rscale.empty()) c.rscale = require_vector("--rscale", f.rscale);
        out.push_back(std::move(c));
    }
    if (out.empty()) throw InputError("--solver: no solver given");
    return out;
}

template <class T, class Parse>
std::vector<T> parse_list(const std::string& s, Parse parse, std::vector<T> fallback) {
    if (s.empty()) return fallback;
    std::vector<T> out;
    for (const std::string& t : split(s)) out.push_back(parse(t));
    return out;
}

const ProblemSpec single_problem(const Flags& f) {
    if (f.problems.size() != 1) throw InputError("--problem: exactly one problem expected");
    return make_problem(f.problems.front());
}

int cmd_list(const Flags& f) {
    std::cout << format_catalog(problem_catalog(), parse_output_format(f.format));
    return kExitOk;
}

int cmd_solve(const Flags& f) {
    const OutputFormat fmt = parse_output_format(f.format);
    const ProblemSpec p = single_problem(f);
    const auto solvers = solver_configs(f);
    if (solvers.size() != 1) throw InputError("--solver: solve takes a single solver");
    ComparisonTable t;
    bool ok = true;
    for (const NamedStart& s : resolve_starts(p, f.start, false)) {
        ComparisonRow row = run_solver(p, s, solvers.front());
        ok = ok && row.converged;
        t.rows.push_back(std::move(row));
    }
    std::cout << format_comparison(t, fmt);
    return f.strict && !ok ? kExitNotConverged : kExitOk;
}

const std::vector<RootMethod> kDefaultMethods = {RootMethod::newton, RootMethod::broyden};

int cmd_grid(const Flags& f) {
    const OutputFormat fmt = parse_output_format(f.format);
    const ProblemSpec p = single_problem(f);
    const auto methods = parse_list(f.method, parse_root_method, kDefaultMethods);
    const auto globals = parse_list(f.global, parse_global_strategy,
                                    std::vector<GlobalStrategy>(std::begin(kAllGlobals), std::end(kAllGlobals)));
    bool ok = true;
    for (const NamedStart& s : resolve_starts(p, f.start, false)) {
        const GridReport r = run_grid(p, s, methods, globals, root_options(f), f.parallel);
        for (const GridRow& row : r.rows) ok = ok && row.result.termcd == termcd::fcrit;
        std::cout << format_grid(r, fmt);
    }
    return f.strict && !ok ? kExitNotConverged : kExitOk;
}

int cmd_cascade(const Flags& f) {
    const OutputFormat fmt = parse_output_format(f.format);
    const ProblemSpec p = single_problem(f);
    const auto methods = parse_list(f.method, parse_root_method, kDefaultMethods);
    const auto globals = parse_list(
        f.global, parse_global_strategy,
        std::vector<GlobalStrategy>{GlobalStrategy::qline, GlobalStrategy::cline, GlobalStrategy::gline,
                                    GlobalStrategy::pwldog, GlobalStrategy::dbldog, GlobalStrategy::hook,
                                    GlobalStrategy::none});
    bool ok = true;
    for (const NamedStart& s : resolve_starts(p, f.start, false)) {
        const CascadeResult c = run_cascade(p, s, methods, globals, root_options(f));
        ok = ok && c.winner.has_value();
        std::cout << format_cascade(c, fmt);
    }
    return f.strict && !ok ? kExitNotConverged : kExitOk;
}

int cmd_compare(const Flags& f) {
    const OutputFormat fmt = parse_output_format(f.format);
    if (f.problems.empty()) throw InputError("--problem: at least one problem expected");
    const auto solvers = solver_configs(f);
    ComparisonTable all;
    for (const std::string& name : f.problems) {
        const ProblemSpec p = make_problem(name);
        for (const NamedStart& s : resolve_starts(p, f.start, true)) {
            for (const SolverConfig& c : solvers) {
                ProblemSpec one = p;
                one.starts = {s};
                ComparisonTable part = run_comparison({one}, {}, {c}, f.reps);
                for (auto& row : part.rows) all.rows.push_back(std::move(row));
            }
        }
    }
    bool ok = true;
    for (const ComparisonRow& r : all.rows) ok = ok && r.converged;
    std::cout << format_comparison(all, fmt);
    return f.strict && !ok ? kExitNotConverged : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Solvers for nonlinear equation systems"};
    app.require_subcommand(1);
    Flags f;

    auto add_common = [&](CLI::App* sub, bool many_problems) {
        if (many_problems)
            sub->add_option("--problem", f.problems, "Problem keys (repeat or comma separate)")
                ->delimiter(',')
                ->required();
        else
            sub->add_option("--problem", f.problems, "Problem key, e.g. dgv-full:0121a")->required()->expected(1);
        sub->add_option("--start", f.start, "Start name(s) or an inline comma-separated vector");
        sub->add_option("--format", f.format, "Output format")->check(CLI::IsMember({"table", "csv", "json"}));
        sub->add_flag("--strict", f.strict, "Exit 1 when a run does not converge");
        sub->add_option("--jac", f.jac, "Finite-difference scheme")
            ->check(CLI::IsMember({"forward", "backward", "central"}));
        sub->add_option("--maxiter", f.maxiter, "Iteration limit");
    };
    auto add_root = [&](CLI::App* sub) {
        sub->add_option("--method", f.method, "newton, broyden (comma list for grid/cascade)");
        sub->add_option("--global", f.global, "cline, qline, gline, pwldog, dbldog, hook, none");
        sub->add_option("--ftol", f.ftol, "Residual tolerance for root finding");
    };
    auto add_solver = [&](CLI::App* sub) {
        sub->add_option("--solver", f.solver, "root, spectral, spectral-accel, lsq, minimize");
        sub->add_option("--tol", f.tol, "Spectral / least-squares / gradient tolerance");
        sub->add_option("--M", f.memory, "Nonmonotone memory for the spectral solvers");
        sub->add_option("--history", f.history, "Secant history depth for spectral-accel");
        sub->add_option("--parscale", f.parscale, "Minimizer parameter scaling, comma-separated");
        sub->add_option("--rscale", f.rscale, "Minimizer residual scaling, comma-separated");
        sub->add_option("--reps", f.reps, "Timing repetitions");
    };

    auto* list = app.add_subcommand("list", "List registered problems and starts");
    list->add_option("--format", f.format, "Output format")->check(CLI::IsMember({"table", "csv", "json"}));

    auto* solve = app.add_subcommand("solve", "Run one solver");
    add_common(solve, false);
    add_root(solve);
    add_solver(solve);

    auto* grid = app.add_subcommand("grid", "Run every method/global pair");
    add_common(grid, false);
    add_root(grid);
    grid->add_flag("--parallel", f.parallel, "Run grid cells concurrently");

    auto* cascade = app.add_subcommand("cascade", "Try method/global pairs until one succeeds");
    add_common(cascade, false);
    add_root(cascade);

    auto* compare = app.add_subcommand("compare", "Compare solver families over starts");
    add_common(compare, true);
    add_root(compare);
    add_solver(compare);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*list) return cmd_list(f);
        if (*solve) return cmd_solve(f);
        if (*grid) return cmd_grid(f);
        if (*cascade) return cmd_cascade(f);
        return cmd_compare(f);
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const DimensionError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNotConverged;
    }
}
