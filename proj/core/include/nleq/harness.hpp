#pragma once

// Batch runs over solvers and starts:
//
//   run_grid        every (method, global) pair of the root finder
//   run_cascade     pairs in order until the first residual-criterion success
//   run_comparison  configured solver families over problems and starts, with
//                   optional repeated timing
//
// A solver that throws produces a row instead of aborting the batch.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "nleq/lsq.hpp"
#include "nleq/minimize.hpp"
#include "nleq/problems.hpp"
#include "nleq/rootfind.hpp"
#include "nleq/spectral.hpp"

namespace nleq {

// ---- grid --------------------------------------------------------------------

struct GridRow {
    RootMethod method = RootMethod::newton;
    GlobalStrategy global = GlobalStrategy::cline;
    RootResult result;      // termcd -1 and fnorm NaN when the solver threw
    double wall_us = 0.0;
};

struct GridReport {
    std::string problem;
    std::string start;
    std::vector<GridRow> rows;  // request order: methods outer, globals inner
};

/// Throws InputError for an empty method or global list and DimensionError
/// for a non-square problem. With parallel set the cells run concurrently;
/// opts.observer must then be safe to call from several threads.
GridReport run_grid(const ProblemSpec& problem, const NamedStart& start,
                    const std::vector<RootMethod>& methods,
                    const std::vector<GlobalStrategy>& globals, const RootOptions& opts = {},
                    bool parallel = false);

// ---- cascade -----------------------------------------------------------------

struct CascadeAttempt {
    RootMethod method = RootMethod::newton;
    GlobalStrategy global = GlobalStrategy::cline;
    int termcd = 0;
    double sumsq = 0.0;   // sum(r^2) at the returned point, NaN on a throw
    std::string message;
};

struct CascadeResult {
    std::string problem;
    std::string start;
    std::optional<CascadeAttempt> winner;
    std::optional<RootResult> result;     // the winning run
    std::vector<CascadeAttempt> trace;
};

/// Methods form the outer loop and globals the inner one. Stops at the first
/// termcd 1. Never throws for solver failures.
CascadeResult run_cascade(const ProblemSpec& problem, const NamedStart& start,
                          const std::vector<RootMethod>& methods,
                          const std::vector<GlobalStrategy>& globals, const RootOptions& opts = {});

// ---- comparison --------------------------------------------------------------

enum class SolverFamily { root, spectral, spectral_accel, lsq, minimize };

std::string_view to_string(SolverFamily f) noexcept;
SolverFamily parse_solver_family(std::string_view name);

struct SolverConfig {
    std::string label;
    SolverFamily family = SolverFamily::root;
    RootOptions root;
    SpectralOptions spectral;
    LsqOptions lsq;
    MinimizeOptions minimize;
    std::optional<Vector> rscale;   // minimizer objective scaling only

    /// Label defaults to the family name plus the distinguishing option.
    static SolverConfig make(SolverFamily family);
    std::string display_label() const;
};

struct Timing {
    std::size_t reps = 0;
    double min_us = 0.0;
    double mean_us = 0.0;
    double max_us = 0.0;
};

using SolverDetail = std::variant<std::monostate, RootResult, SpectralResult, LsqResult, MinimizeResult>;

struct ComparisonRow {
    std::string problem;
    std::string start;
    std::string solver;
    SolverFamily family = SolverFamily::root;
    Vector x;
    double sumsq = 0.0;   // of the unscaled residuals at x, NaN on a throw
    bool converged = false;
    std::string message;
    double wall_us = 0.0;
    std::optional<Timing> timing;
    SolverDetail detail;
};

struct ComparisonTable {
    std::vector<ComparisonRow> rows;  // problems outer, starts, then solvers
};

/// Runs one solver on one start and recomputes sum(r^2) from the problem.
ComparisonRow run_solver(const ProblemSpec& problem, const NamedStart& start, const SolverConfig& solver);

/// An empty start list means every registered start of each problem; a named
/// start missing from a problem throws InputError. reps > 0 adds a timing
/// block measured over that many extra runs on a monotonic clock.
ComparisonTable run_comparison(const std::vector<ProblemSpec>& problems,
                               const std::vector<std::string>& starts,
                               const std::vector<SolverConfig>& solvers, std::size_t reps = 0);

}  // namespace nleq
