#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lhnfc/dataset.hpp"
#include "lhnfc/init.hpp"
#include "lhnfc/network.hpp"
#include "lhnfc/select.hpp"
#include "lhnfc/train.hpp"

namespace lhnfc {

struct Metrics {
    int sample_count = 0;
    int class_count = 0;
    double accuracy_pct = 0.0;                // 100 * correct / N
    double rmse = 0.0;                        // per class score, vs one-hot targets
    std::vector<int> confusion;               // K×K, row = true class, col = predicted
    std::vector<double> per_class_recall;     // diagonal / row sum, 0 for absent classes

    int confusion_at(int true_k, int pred_k) const {
        return confusion[static_cast<size_t>(true_k) * class_count + pred_k];
    }
};

// Single deterministic forward pass; repeated calls agree bitwise.
Metrics evaluate(const RuleBase& rb, const Dataset& ds);

std::string format_metrics(const Metrics& m);
// One data row per call site; headers via metrics_csv_header. Confusion in
// raw counts plus row-normalized shares.
std::string metrics_csv_header(int class_count);
std::string metrics_csv_row(const Metrics& m);
std::string format_confusion(const Metrics& m);

// Everything one modeling run needs: scaling mode, rule initialization,
// training budget, and (optionally) the hedge-driven feature selection
// phases.
struct ExperimentConfig {
    NormMode norm = NormMode::minmax;
    InitConfig init;
    TrainConfig train;
    bool with_selection = false;
    SelectionConfig selection;
};

struct ExperimentResult {
    RuleBase model;
    NormParams norm;                          // fitted on the training rows
    FitResult fit;                            // final trained model's fit
    std::optional<FitResult> phase1;          // selection runs: constrained fit
    std::optional<SelectionReport> selection; // selection runs: the decision
    Metrics train_metrics;
    Metrics test_metrics;                     // zeroed when no test rows given
};

// Fits the normalizer on train_raw, scales both sets with it, trains (plain
// fit or the selection pipeline), and evaluates train and test. test_raw may
// be empty.
ExperimentResult run_experiment(const Dataset& train_raw, const Dataset& test_raw,
                                const ExperimentConfig& cfg);

struct FoldResult {
    uint64_t seed = 0;
    int fold = 0;
    Metrics train_metrics;
    Metrics valid_metrics;
};

struct CvSummary {
    int fold_count = 0;
    std::vector<uint64_t> seeds;
    std::vector<FoldResult> folds;            // len(seeds) × k rows, seed-major
    // Unweighted mean/std over all fold rows (folds differ by at most one
    // sample, so the weighted view is also reported but not primary).
    double mean_valid_accuracy = 0.0;
    double std_valid_accuracy = 0.0;
    double weighted_valid_accuracy = 0.0;     // by validation sample count
    double mean_valid_rmse = 0.0;
    double mean_train_accuracy = 0.0;
    std::vector<double> per_seed_mean_accuracy;
    std::vector<double> per_seed_std_accuracy;
};

// Stratified k-fold per seed: the fold plan and every fold's rule
// initialization derive from that seed alone, so runs are reproducible and
// independent across seeds. Each fold gets its own normalizer, fitted only
// on that fold's training rows.
CvSummary cross_validate(const Dataset& ds, const ExperimentConfig& cfg, int k,
                         const std::vector<uint64_t>& seeds);

std::string format_cv_summary(const CvSummary& cv);
std::string cv_detail_csv(const CvSummary& cv);

}  // namespace lhnfc
