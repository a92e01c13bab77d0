#include "lhnfc/scg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lhnfc {

std::string to_string(ScgStop reason) {
    switch (reason) {
        case ScgStop::gradient_tolerance: return "gradient-tolerance";
        case ScgStop::objective_tolerance: return "objective-tolerance";
        case ScgStop::max_iterations: return "max-iterations";
        case ScgStop::stalled: return "stalled";
        case ScgStop::aborted_nonfinite: return "aborted-nonfinite";
    }
    return "unknown";
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

bool all_finite(std::span<const double> a) {
    for (double v : a) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

constexpr double kLambdaMax = 1e100;

}  // namespace

ScgResult minimize(const Objective& f, const GradientFn& grad, std::vector<double> theta0,
                   const ScgOptions& options) {
    const int n = static_cast<int>(theta0.size());
    ScgResult result;
    result.theta = std::move(theta0);
    if (n == 0) throw std::runtime_error("scg: empty parameter vector");

    std::vector<double> g(n);          // gradient at current point
    std::vector<double> r(n);          // -g, steepest descent
    std::vector<double> p(n);          // search direction
    std::vector<double> g_probe(n);    // gradient at curvature probe
    std::vector<double> trial(n);
    std::vector<double> g_new(n);

    double f_now = f(result.theta);
    grad(result.theta, g);
    if (!std::isfinite(f_now) || !all_finite(g)) {
        result.objective = f_now;
        result.reason = ScgStop::aborted_nonfinite;
        return result;
    }
    if (options.check_gradient) {
        double dev = grad_check(f, grad, result.theta, options.check_step);
        if (!(dev <= options.check_tol)) {
            result.gradient_check_failed = true;
            result.objective = f_now;
            result.reason = ScgStop::aborted_nonfinite;
            return result;
        }
    }
    for (int i = 0; i < n; ++i) {
        r[i] = -g[i];
        p[i] = r[i];
    }

    double lambda = options.initial_lambda;
    double lambda_bar = 0.0;
    bool success = true;
    double delta = 0.0;   // directional curvature p'Hp estimate, refreshed after accepted steps
    result.objective = f_now;

    for (int k = 1; k <= options.max_iter; ++k) {
        const double p_norm2 = dot(p, p);
        const double grad_norm = norm2(r);
        if (grad_norm <= options.grad_tol || p_norm2 == 0.0) {
            result.reason = ScgStop::gradient_tolerance;
            result.history.push_back({k, f_now, grad_norm});
            break;
        }

        if (success) {
            // Second-order information along p via a one-sided gradient probe.
            const double sigma = options.sigma_step / std::sqrt(p_norm2);
            for (int i = 0; i < n; ++i) trial[i] = result.theta[i] + sigma * p[i];
            grad(trial, g_probe);
            if (!all_finite(g_probe)) {
                result.reason = ScgStop::aborted_nonfinite;
                result.history.push_back({k, f_now, grad_norm});
                break;
            }
            delta = 0.0;
            for (int i = 0; i < n; ++i) delta += p[i] * (g_probe[i] - g[i]);
            delta /= sigma;
        }

        // Scale the curvature and force it positive definite.
        double delta_k = delta + (lambda - lambda_bar) * p_norm2;
        if (delta_k <= 0.0) {
            lambda_bar = 2.0 * (lambda - delta_k / p_norm2);
            delta_k = -delta_k + lambda * p_norm2;
            lambda = lambda_bar;
        }

        const double mu = dot(p, r);
        const double alpha = mu / delta_k;

        for (int i = 0; i < n; ++i) trial[i] = result.theta[i] + alpha * p[i];
        const double f_trial = f(trial);
        const double comparison =
            std::isfinite(f_trial) ? 2.0 * delta_k * (f_now - f_trial) / (mu * mu) : -1.0;

        if (comparison >= 0.0) {
            // Accepted step.
            const double f_prev = f_now;
            result.theta.swap(trial);
            f_now = f_trial;
            grad(result.theta, g_new);
            if (!all_finite(g_new) || !std::isfinite(f_now)) {
                result.objective = f_now;
                result.reason = ScgStop::aborted_nonfinite;
                result.history.push_back({k, f_now, grad_norm});
                result.iterations = k;
                return result;
            }
            g.swap(g_new);

            std::vector<double>& r_new = g_new;   // reuse storage
            for (int i = 0; i < n; ++i) r_new[i] = -g[i];

            lambda_bar = 0.0;
            success = true;
            if (k % n == 0) {
                p = r_new;   // periodic restart along steepest descent
            } else {
                double beta = (dot(r_new, r_new) - dot(r_new, r)) / mu;
                for (int i = 0; i < n; ++i) p[i] = r_new[i] + beta * p[i];
            }
            r = r_new;
            if (comparison >= 0.75) lambda *= 0.25;

            const double new_grad_norm = norm2(r);
            result.history.push_back({k, f_now, new_grad_norm});
            result.iterations = k;
            if (new_grad_norm <= options.grad_tol) {
                result.reason = ScgStop::gradient_tolerance;
                break;
            }
            if (std::abs(f_prev - f_now) <= options.obj_tol) {
                result.reason = ScgStop::objective_tolerance;
                break;
            }
        } else {
            lambda_bar = lambda;
            success = false;
            result.history.push_back({k, f_now, grad_norm});
            result.iterations = k;
        }

        if (comparison < 0.25) {
            lambda += delta_k * (1.0 - comparison) / p_norm2;
        }
        if (lambda > kLambdaMax) {
            result.reason = ScgStop::stalled;
            break;
        }
        if (k == options.max_iter) result.reason = ScgStop::max_iterations;
    }

    result.objective = f_now;
    return result;
}

double grad_check(const Objective& f, const GradientFn& grad, std::span<const double> theta,
                  double h) {
    if (!(h > 0.0)) throw std::runtime_error("grad_check: step h must be positive");
    const int n = static_cast<int>(theta.size());
    std::vector<double> analytic(n);
    grad(theta, analytic);

    std::vector<double> point(theta.begin(), theta.end());
    std::vector<double> numeric(n);
    for (int i = 0; i < n; ++i) {
        const double saved = point[i];
        point[i] = saved + h;
        const double f_plus = f(point);
        point[i] = saved - h;
        const double f_minus = f(point);
        point[i] = saved;
        numeric[i] = (f_plus - f_minus) / (2.0 * h);
    }

    double scale = 1e-12;
    for (int i = 0; i < n; ++i) {
        scale = std::max({scale, std::abs(analytic[i]), std::abs(numeric[i])});
    }
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
        worst = std::max(worst, std::abs(analytic[i] - numeric[i]) / scale);
    }
    return worst;
}

}  // namespace lhnfc
