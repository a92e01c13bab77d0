#include "lhnfc/train.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lhnfc {

namespace {

// Clamps applied when reading raw parameters into the unconstrained vector.
// They keep the inverse transforms finite; values this close to a bound are
// indistinguishable for the classifier anyway.
constexpr double kHedgeMargin01 = 1e-4;   // constrained01: hedge in [margin, 1-margin]
constexpr double kPositiveFloor = 1e-6;   // softplus-mapped quantities

double softplus(double t) {
    if (t > 0.0) return t + std::log1p(std::exp(-t));
    return std::log1p(std::exp(t));
}

// d softplus / dt
double sigmoid(double t) {
    if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
    double e = std::exp(t);
    return e / (1.0 + e);
}

double softplus_inv(double y) {
    // log(exp(y) - 1); for large y the -1 is lost to rounding and y itself
    // is already the answer to double precision.
    if (y > 30.0) return y;
    return std::log(std::expm1(y));
}

double logit(double p) { return std::log(p / (1.0 - p)); }

void check_data(const RuleBase& rb, ConstMatrixView X, const std::vector<int>& labels) {
    if (X.cols != rb.feature_count)
        throw std::runtime_error("train: matrix has " + std::to_string(X.cols) +
                                 " columns, rulebase expects " + std::to_string(rb.feature_count));
    if (X.rows != static_cast<int>(labels.size()))
        throw std::runtime_error("train: " + std::to_string(X.rows) + " rows vs " +
                                 std::to_string(labels.size()) + " labels");
    if (X.rows == 0) throw std::runtime_error("train: no samples");
    for (int s = 0; s < X.rows; ++s) {
        if (labels[s] < 1 || labels[s] > rb.class_count)
            throw std::runtime_error("train: label " + std::to_string(labels[s]) +
                                     " at row " + std::to_string(s) + " outside 1.." +
                                     std::to_string(rb.class_count));
    }
}

}  // namespace

std::string to_string(HedgeMode mode) {
    switch (mode) {
        case HedgeMode::constrained01: return "constrained01";
        case HedgeMode::nonneg_unconstrained: return "nonneg";
    }
    return "?";
}

HedgeMode hedge_mode_from_string(std::string_view s) {
    if (s == "constrained01") return HedgeMode::constrained01;
    if (s == "nonneg") return HedgeMode::nonneg_unconstrained;
    throw std::runtime_error("unknown hedge mode '" + std::string(s) +
                             "' (expected constrained01 or nonneg)");
}

double cost(const RuleBase& rb, ConstMatrixView X, const std::vector<int>& labels) {
    check_data(rb, X, labels);
    ForwardTrace trace = forward(rb, X);
    double total = 0.0;
    for (int s = 0; s < X.rows; ++s) {
        double half_sq = 0.0;
        for (int k = 0; k < rb.class_count; ++k) {
            double target = (labels[s] == k + 1) ? 1.0 : 0.0;
            double err = target - trace.normalized_at(s, k);
            half_sq += 0.5 * err * err;
        }
        total += half_sq;
    }
    return total / X.rows;
}

ParamGrad cost_grad(const RuleBase& rb, ConstMatrixView X, const std::vector<int>& labels,
                    double* cost_out) {
    check_data(rb, X, labels);
    const int U = rb.rule_count;
    const int D = rb.feature_count;
    const int K = rb.class_count;

    ParamGrad g;
    g.d_centers.assign(static_cast<size_t>(U) * D, 0.0);
    g.d_widths.assign(static_cast<size_t>(U) * D, 0.0);
    g.d_hedges.assign(static_cast<size_t>(U) * D, 0.0);
    g.d_weights.assign(static_cast<size_t>(U) * K, 0.0);

    ForwardTrace trace = forward(rb, X);
    const std::vector<int> active = rb.active_features();

    double total_cost = 0.0;
    std::vector<double> err(K);   // h - t
    std::vector<double> q(K);     // dE_s/dO_l
    for (int s = 0; s < X.rows; ++s) {
        double delta = 0.0;
        for (int k = 0; k < K; ++k) delta += trace.weighted_at(s, k);

        double half_sq = 0.0;
        double err_dot_h = 0.0;
        for (int k = 0; k < K; ++k) {
            double h = trace.normalized_at(s, k);
            err[k] = h - ((labels[s] == k + 1) ? 1.0 : 0.0);
            half_sq += 0.5 * err[k] * err[k];
            err_dot_h += err[k] * h;
        }
        total_cost += half_sq;

        // Below the normalizer floor the outputs were replaced by a uniform
        // row; that plateau has no useful slope, so the sample is skipped.
        if (delta <= kDeltaFloor) continue;

        for (int l = 0; l < K; ++l) q[l] = (err[l] - err_dot_h) / delta;

        for (int i = 0; i < U; ++i) {
            const double beta = trace.beta_at(s, i);
            double r_i = 0.0;   // dE_s/dbeta_i
            for (int l = 0; l < K; ++l) {
                g.d_weights[static_cast<size_t>(i) * K + l] += beta * q[l];
                r_i += q[l] * rb.weight(i, l);
            }
            if (beta == 0.0 || r_i == 0.0) continue;
            const double rb_term = r_i * beta;
            for (int j : active) {
                const double sigma = std::max(rb.width(i, j), kSigmaMin);
                const double dx = X(s, j) - rb.center(i, j);
                const double p = rb.hedge(i, j);
                const size_t ij = static_cast<size_t>(i) * D + j;
                g.d_hedges[ij] += rb_term * trace.log_mu_at(s, i, j);
                g.d_centers[ij] += rb_term * p * dx / (sigma * sigma);
                g.d_widths[ij] += rb_term * p * dx * dx / (sigma * sigma * sigma);
            }
        }
    }

    const double inv_n = 1.0 / X.rows;
    for (double& v : g.d_centers) v *= inv_n;
    for (double& v : g.d_widths) v *= inv_n;
    for (double& v : g.d_hedges) v *= inv_n;
    for (double& v : g.d_weights) v *= inv_n;
    if (cost_out) *cost_out = total_cost * inv_n;
    return g;
}

TrainingProblem::TrainingProblem(const RuleBase& rb0, ConstMatrixView X, std::vector<int> labels,
                                 HedgeMode mode, TrainableSet trainable)
    : base_(rb0), labels_(std::move(labels)), mode_(mode), trainable_(trainable) {
    base_.validate();
    check_data(base_, X, labels_);
    xs_.assign(X.data, X.data + static_cast<size_t>(X.rows) * X.cols);
    active_ = base_.active_features();
    if (active_.empty()) throw std::runtime_error("train: no active features");
    if (!trainable_.any()) throw std::runtime_error("train: nothing marked trainable");

    const int ua = base_.rule_count * static_cast<int>(active_.size());
    int off = 0;
    if (trainable_.centers) { off_centers_ = off; off += ua; }
    if (trainable_.widths) { off_widths_ = off; off += ua; }
    if (trainable_.hedges) { off_hedges_ = off; off += ua; }
    if (trainable_.weights) { off_weights_ = off; off += base_.rule_count * base_.class_count; }
    dimension_ = off;
}

ConstMatrixView TrainingProblem::view() const {
    return {xs_.data(), static_cast<int>(labels_.size()), base_.feature_count};
}

std::vector<double> TrainingProblem::initial_theta() const {
    std::vector<double> theta(static_cast<size_t>(dimension_));
    const int A = static_cast<int>(active_.size());
    for (int i = 0; i < base_.rule_count; ++i) {
        for (int a = 0; a < A; ++a) {
            const int j = active_[a];
            const int slot = i * A + a;
            if (off_centers_ >= 0) theta[off_centers_ + slot] = base_.center(i, j);
            if (off_widths_ >= 0) {
                double sigma = std::max(base_.width(i, j), kSigmaMin + kPositiveFloor);
                theta[off_widths_ + slot] = softplus_inv(sigma - kSigmaMin);
            }
            if (off_hedges_ >= 0) {
                double p = base_.hedge(i, j);
                if (mode_ == HedgeMode::constrained01) {
                    p = std::clamp(p, kHedgeMargin01, 1.0 - kHedgeMargin01);
                    theta[off_hedges_ + slot] = logit(p);
                } else {
                    theta[off_hedges_ + slot] = softplus_inv(std::max(p, kPositiveFloor));
                }
            }
        }
        if (off_weights_ >= 0) {
            for (int k = 0; k < base_.class_count; ++k) {
                double w = std::max(base_.weight(i, k), kPositiveFloor);
                theta[off_weights_ + i * base_.class_count + k] = softplus_inv(w);
            }
        }
    }
    return theta;
}

RuleBase TrainingProblem::to_rulebase(std::span<const double> theta) const {
    if (static_cast<int>(theta.size()) != dimension_)
        throw std::runtime_error("train: parameter vector has wrong length");
    RuleBase rb = base_;
    const int A = static_cast<int>(active_.size());
    for (int i = 0; i < rb.rule_count; ++i) {
        for (int a = 0; a < A; ++a) {
            const int j = active_[a];
            const int slot = i * A + a;
            if (off_centers_ >= 0) rb.center(i, j) = theta[off_centers_ + slot];
            if (off_widths_ >= 0) rb.width(i, j) = kSigmaMin + softplus(theta[off_widths_ + slot]);
            if (off_hedges_ >= 0) {
                double t = theta[off_hedges_ + slot];
                rb.hedge(i, j) = (mode_ == HedgeMode::constrained01) ? sigmoid(t) : softplus(t);
            }
        }
        if (off_weights_ >= 0) {
            for (int k = 0; k < rb.class_count; ++k)
                rb.weight(i, k) = softplus(theta[off_weights_ + i * rb.class_count + k]);
        }
    }
    return rb;
}

double TrainingProblem::objective(std::span<const double> theta) const {
    return cost(to_rulebase(theta), view(), labels_);
}

void TrainingProblem::gradient(std::span<const double> theta, std::span<double> out) const {
    if (static_cast<int>(out.size()) != dimension_)
        throw std::runtime_error("train: gradient buffer has wrong length");
    RuleBase rb = to_rulebase(theta);
    ParamGrad g = cost_grad(rb, view(), labels_);

    // Chain rule through the reparameterization: the factor is the derivative
    // of each raw parameter with respect to its unconstrained coordinate.
    const int A = static_cast<int>(active_.size());
    const int D = base_.feature_count;
    for (int i = 0; i < base_.rule_count; ++i) {
        for (int a = 0; a < A; ++a) {
            const int j = active_[a];
            const int slot = i * A + a;
            const size_t ij = static_cast<size_t>(i) * D + j;
            if (off_centers_ >= 0) out[off_centers_ + slot] = g.d_centers[ij];
            if (off_widths_ >= 0)
                out[off_widths_ + slot] = g.d_widths[ij] * sigmoid(theta[off_widths_ + slot]);
            if (off_hedges_ >= 0) {
                double t = theta[off_hedges_ + slot];
                double factor;
                if (mode_ == HedgeMode::constrained01) {
                    double p = sigmoid(t);
                    factor = p * (1.0 - p);
                } else {
                    factor = sigmoid(t);
                }
                out[off_hedges_ + slot] = g.d_hedges[ij] * factor;
            }
        }
        if (off_weights_ >= 0) {
            for (int k = 0; k < base_.class_count; ++k) {
                const int slot = off_weights_ + i * base_.class_count + k;
                out[slot] = g.d_weights[static_cast<size_t>(i) * base_.class_count + k] *
                            sigmoid(theta[slot]);
            }
        }
    }
}

double rmse_from_cost(double cost_value, int class_count) {
    if (class_count <= 0) throw std::runtime_error("rmse: class count must be positive");
    return std::sqrt(2.0 * cost_value / class_count);
}

FitResult fit(const RuleBase& rb0, const Dataset& train, const TrainConfig& cfg) {
    rb0.validate();
    FitResult out;
    if (cfg.scg.max_iter == 0) {
        // Zero budget: report the starting point, hand back the exact input
        // (a pack/unpack round trip would nudge clamped entries).
        out.model = rb0;
        out.final_cost = cost(rb0, train.view(), train.labels);
        out.final_rmse = rmse_from_cost(out.final_cost, rb0.class_count);
        out.reason = ScgStop::max_iterations;
        return out;
    }

    TrainingProblem problem(rb0, train.view(), train.labels, cfg.hedge_mode, cfg.trainable);
    Objective f = [&problem](std::span<const double> t) { return problem.objective(t); };
    GradientFn gf = [&problem](std::span<const double> t, std::span<double> g) {
        problem.gradient(t, g);
    };
    ScgResult res = minimize(f, gf, problem.initial_theta(), cfg.scg);

    out.model = problem.to_rulebase(res.theta);
    out.model.validate();
    out.reason = res.reason;
    out.iterations = res.iterations;
    out.gradient_check_failed = res.gradient_check_failed;
    out.final_cost = res.objective;
    out.final_rmse = rmse_from_cost(res.objective, rb0.class_count);
    out.history.reserve(res.history.size());
    for (const ScgHistoryEntry& e : res.history)
        out.history.push_back({e.iteration, e.objective,
                               rmse_from_cost(e.objective, rb0.class_count), e.grad_norm});
    return out;
}

}  // namespace lhnfc
