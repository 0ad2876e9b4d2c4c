#pragma once

// Test problems for nonlinear equation solvers and a registry that builds
// them by name:
//
//   dgv-full:<pid>     Dennis-Gay-Vu, 8 parameters
//   dgv-reduced:<pid>  Dennis-Gay-Vu with the two linear equations eliminated
//   simple2            two equations, root (1,1), local-minimum trap nearby
//   trigexp[:n]        banded trigonometric/exponential system (default n=500)
//   brent[:n]          Abbott-Brent tridiagonal system (default n=50)

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nleq/numlinalg.hpp"

namespace nleq {

struct NamedStart {
    std::string name;
    Vector x;
};

/// Residual of a problem given the parameters and the right-hand side.
using ResidualFunction = std::function<Vector(const Vector& x, const Vector& rhs)>;

struct ProblemSpec {
    std::string name;
    std::size_t n_params = 0;
    std::size_t n_residuals = 0;
    ResidualFunction residual;
    Vector rhs;
    std::vector<NamedStart> starts;
    std::optional<Vector> known_solution;

    /// r(x). Throws DimensionError if x or the returned vector has the wrong length.
    Vector evaluate(const Vector& x) const;
    /// r bound to this problem's rhs, for the generic numerics.
    VectorFunction bound() const;

    /// Throws InputError for an unknown start name.
    const Vector& start(std::string_view start_name) const;
    const Vector& default_start() const;
};

// ---- Dennis-Gay-Vu -----------------------------------------------------------

inline constexpr std::array<std::string_view, 5> kDgvIds = {"791129", "791226", "0121a", "0121b",
                                                            "0121c"};

struct DgvData {
    std::string pid;
    Vector sigma;  // sigmax, sigmay, sigmaa, sigmab, sigmac, sigmad, sigmae, sigmaf
    Vector x0;     // 8 entries, or 6 when reduced
    Vector xstar;  // always the full 8-entry published solution
    bool reduced = false;
};

/// Data for one of the five published data sets. Throws UnknownProblemError.
DgvData dgv_prep(std::string_view pid, bool reduced = false);

Vector dgv_full_residual(const Vector& x, const Vector& rhs);
Vector dgv_reduced_residual(const Vector& x, const Vector& rhs);

/// Full -> reduced: keeps a, c, t, u, v, w (indices 1,3,5,6,7,8).
Vector dgv_reduce(const Vector& x_full);
/// Reduced -> full, recovering b = sigmax - a and d = sigmay - c.
Vector dgv_unreduce(const Vector& x_reduced, const Vector& sigma);

// ---- other families ----------------------------------------------------------

Vector simple2_residual(const Vector& x);
Vector trigexp_residual(const Vector& x);
Vector brent_residual(const Vector& x);

inline constexpr std::size_t kTrigexpDefaultN = 500;
inline constexpr std::size_t kBrentDefaultN = 50;

ProblemSpec make_dgv_problem(std::string_view pid, bool reduced);
ProblemSpec make_simple2_problem();
ProblemSpec make_trigexp_problem(std::size_t n = kTrigexpDefaultN);
ProblemSpec make_brent_problem(std::size_t n = kBrentDefaultN);

// ---- registry ----------------------------------------------------------------

/// Builds a problem from its registry key. Throws UnknownProblemError.
ProblemSpec make_problem(std::string_view name);

struct CatalogEntry {
    std::string name;
    std::size_t n_params;
    std::size_t n_residuals;
    std::vector<std::string> starts;
};

/// Every registry key at its default size.
std::vector<CatalogEntry> problem_catalog();

}  // namespace nleq
