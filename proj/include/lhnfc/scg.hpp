#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace lhnfc {

using Objective = std::function<double(std::span<const double>)>;
using GradientFn = std::function<void(std::span<const double>, std::span<double>)>;

struct ScgOptions {
    int max_iter = 500;
    double grad_tol = 1e-6;        // terminate when ||gradient||_2 drops below
    double obj_tol = 1e-10;        // terminate when an accepted step changes f by less
    double initial_lambda = 1e-6;  // Moller's model-trust scale
    double sigma_step = 1e-4;      // perturbation for the directional curvature probe
    bool check_gradient = false;   // finite-difference self-check at theta0
    double check_step = 1e-5;
    double check_tol = 1e-3;
};

enum class ScgStop {
    gradient_tolerance,
    objective_tolerance,
    max_iterations,
    stalled,            // trust-region scale blew up, no progress possible
    aborted_nonfinite,  // objective or gradient went non-finite at an accepted point
};

std::string to_string(ScgStop reason);

struct ScgHistoryEntry {
    int iteration = 0;
    double objective = 0.0;
    double grad_norm = 0.0;
};

struct ScgResult {
    std::vector<double> theta;
    double objective = 0.0;
    int iterations = 0;
    ScgStop reason = ScgStop::max_iterations;
    std::vector<ScgHistoryEntry> history;   // one entry per iteration, non-increasing objective
    bool gradient_check_failed = false;     // set when check_gradient found a mismatch at theta0
};

// Moller-style scaled conjugate gradient over an unconstrained parameter
// vector. Deterministic given (theta0, options): no internal randomness, no
// line searches, one curvature probe and at most one trial point per
// iteration. Failed (uphill) trial steps are rejected, so the accepted
// objective sequence never increases. Non-finite values at a trial point are
// treated as a rejected step; at an accepted point they abort with the
// current iterate.
ScgResult minimize(const Objective& f, const GradientFn& grad, std::vector<double> theta0,
                   const ScgOptions& options = {});

// Central-difference check of grad against f. Returns the largest
// per-coordinate deviation relative to the largest gradient magnitude
// (max |analytic - numeric| / max(||analytic||_inf, ||numeric||_inf, tiny)).
double grad_check(const Objective& f, const GradientFn& grad, std::span<const double> theta,
                  double h);

}  // namespace lhnfc
