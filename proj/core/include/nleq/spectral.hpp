#pragma once

// Derivative-free spectral residual iteration (DF-SANE):
//
//   x+ = x - lambda * sigma_k * r(x),   sigma_k = (s^T s) / (s^T y)
//
// with a nonmonotone line search that tries both signs of the direction and
// accepts against the worst of the last M merit values plus a summable
// forcing term. The accelerated variant extrapolates each trial point with a
// multi-secant model built from the p most recent (step, residual-change)
// pairs once that many are stored.

#include <cstddef>
#include <functional>
#include <string>

#include "nleq/numlinalg.hpp"
#include "nleq/problems.hpp"

namespace nleq {

/// One accepted line-search point, reported to SpectralOptions::observer.
struct SpectralStepRecord {
    std::size_t iter = 0;
    double merit = 0.0;          // sum(r^2) at the accepted line-search point
    double reference = 0.0;      // max of the previous M merit values
    double forcing = 0.0;        // eta_k
    double lambda = 0.0;         // accepted step multiplier (either sign)
    double previous_merit = 0.0; // merit at the current iterate
    double sigma = 0.0;          // spectral coefficient used for the step
    bool accelerated = false;    // extrapolated point replaced the trial point
    double accepted_merit = 0.0; // merit of the point the iteration moved to
};

struct SpectralOptions {
    std::size_t memory = 10;       // M
    std::size_t max_iter = 1500;
    double tol = 1e-7;
    double sigma_min = 1e-10;
    double sigma_max = 1e10;
    bool acceleration = false;
    std::size_t history = 6;       // p, used only with acceleration
    double gamma = 1e-4;
    double tau_min = 0.1;
    double tau_max = 0.5;
    double truncation = 1e-12;     // relative singular-value cutoff for the secant fit
    std::size_t max_backtracks = 100;
    std::function<void(const SpectralStepRecord&)> observer;

    /// Throws InputError when the bounds or counts are invalid.
    void validate() const;
};

struct SpectralResult {
    Vector x;
    Vector fvec;
    double ss = 0.0;
    std::size_t iterations = 0;
    std::size_t fevals = 0;
    bool converged = false;
    std::string message;
};

/// Plain or accelerated run depending on opts.acceleration. Returns the best
/// iterate with converged = false when the tolerance is not reached.
///
/// Throws EvaluationError if the residual is not finite at x0.
SpectralResult solve_spectral(const ProblemSpec& problem, const Vector& x0,
                              const SpectralOptions& opts = {});

/// Same as solve_spectral with acceleration forced on.
SpectralResult solve_spectral_accelerated(const ProblemSpec& problem, const Vector& x0,
                                          SpectralOptions opts = {});

/// Clamps |sigma| into [lo, hi], keeping its sign; zero or NaN maps to hi.
double clamp_spectral(double sigma, double lo, double hi) noexcept;

}  // namespace nleq
