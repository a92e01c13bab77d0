#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lhnfc/dataset.hpp"
#include "lhnfc/matrix.hpp"
#include "lhnfc/network.hpp"
#include "lhnfc/scg.hpp"

namespace lhnfc {

// constrained01 keeps every hedge exponent inside (0,1) via a sigmoid
// reparameterization; nonneg_unconstrained only keeps it positive (softplus),
// letting training sharpen a membership past its raw grade.
enum class HedgeMode { constrained01, nonneg_unconstrained };

std::string to_string(HedgeMode mode);
HedgeMode hedge_mode_from_string(std::string_view s);

struct TrainableSet {
    bool centers = true;
    bool widths = true;
    bool hedges = true;
    bool weights = true;

    bool any() const { return centers || widths || hedges || weights; }
};

struct TrainConfig {
    HedgeMode hedge_mode = HedgeMode::constrained01;
    TrainableSet trainable;
    ScgOptions scg;
};

// Mean over samples of half the squared error between one-hot targets and
// normalized class scores. Labels are 1..rb.class_count.
double cost(const RuleBase& rb, ConstMatrixView X, const std::vector<int>& labels);

// Cost gradient in raw parameter coordinates. Entries for inactive features
// are zero; samples whose normalizer hit the floor contribute nothing.
struct ParamGrad {
    std::vector<double> d_centers;   // U×D
    std::vector<double> d_widths;    // U×D
    std::vector<double> d_hedges;    // U×D
    std::vector<double> d_weights;   // U×K
};

ParamGrad cost_grad(const RuleBase& rb, ConstMatrixView X, const std::vector<int>& labels,
                    double* cost_out = nullptr);

// Smooth change of variables so the optimizer works on an unconstrained
// vector: centers pass through, width = kSigmaMin + softplus(t),
// weight = softplus(t), hedge = sigmoid(t) (constrained01) or softplus(t)
// (nonneg). Only trainable blocks and active features are packed; everything
// else is frozen at its initial value. Holds private copies of the training
// matrix and labels, so the problem stays valid after the inputs go away.
class TrainingProblem {
public:
    TrainingProblem(const RuleBase& rb0, ConstMatrixView X, std::vector<int> labels,
                    HedgeMode mode, TrainableSet trainable);

    int dimension() const { return dimension_; }
    std::vector<double> initial_theta() const;
    RuleBase to_rulebase(std::span<const double> theta) const;
    double objective(std::span<const double> theta) const;
    void gradient(std::span<const double> theta, std::span<double> out) const;

private:
    RuleBase base_;
    std::vector<double> xs_;
    std::vector<int> labels_;
    HedgeMode mode_;
    TrainableSet trainable_;
    std::vector<int> active_;   // active feature column indices
    int dimension_ = 0;
    // block offsets into theta; -1 when the block is frozen
    int off_centers_ = -1;
    int off_widths_ = -1;
    int off_hedges_ = -1;
    int off_weights_ = -1;

    ConstMatrixView view() const;
};

struct FitHistoryRow {
    int iteration = 0;
    double cost = 0.0;
    double rmse = 0.0;
    double grad_norm = 0.0;
};

struct FitResult {
    RuleBase model;
    std::vector<FitHistoryRow> history;
    ScgStop reason = ScgStop::max_iterations;
    int iterations = 0;
    double final_cost = 0.0;
    double final_rmse = 0.0;
    bool gradient_check_failed = false;
};

// Root-mean-square error per class score implied by the mean half-squared
// cost: sqrt(2 E / K).
double rmse_from_cost(double cost_value, int class_count);

// Trains rb0 on the given data with scaled conjugate gradient. A zero
// iteration budget returns rb0 untouched (no reparameterization round-trip).
// Deterministic: identical inputs give identical results.
FitResult fit(const RuleBase& rb0, const Dataset& train, const TrainConfig& cfg);

}  // namespace lhnfc
