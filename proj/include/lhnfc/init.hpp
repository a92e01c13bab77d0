#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lhnfc/dataset.hpp"
#include "lhnfc/matrix.hpp"
#include "lhnfc/network.hpp"

namespace lhnfc {

struct KMeansConfig {
    int max_iter = 100;
    int restarts = 10;
    bool plus_plus = false;   // k-means++ seeding instead of distinct random rows
};

struct KMeansResult {
    int cluster_count = 0;
    std::vector<double> centers;   // k×D
    std::vector<int> assignment;   // M cluster ids, 0..k-1
    double wcss = 0.0;             // within-cluster sum of squared distances
    int iterations = 0;
    int best_restart = 0;
};

// Lloyd iterations to a stable assignment or max_iter, best of `restarts`
// seedings by WCSS (ties by restart index). Empty clusters are reseeded to
// the point farthest from its current center.
KMeansResult kmeans(ConstMatrixView points, int k, uint64_t seed, const KMeansConfig& cfg = {});

enum class WidthRule { cluster_std, nearest_center_half };

struct InitConfig {
    int clusters_per_class = 1;
    KMeansConfig kmeans;
    WidthRule width_rule = WidthRule::cluster_std;
    uint64_t seed = 0;
};

struct InitDiagnostics {
    std::vector<double> class_wcss;        // per class
    std::vector<int> class_iterations;     // per class
    std::vector<double> rule_width_min;    // per rule, over active features
    std::vector<double> rule_width_max;
};

// Per-class k-means supplies one rule per cluster: centers from the cluster
// mean, widths from the per-feature cluster standard deviation (floored at
// kSigmaMin; width_rule selects the nearest-center alternative), identity
// hedges, and near-one-hot class weights (1 for the rule's own class, 0.01
// elsewhere so training can still reassign rules).
RuleBase init_rulebase(const Dataset& train, const std::vector<uint8_t>& feature_mask,
                       const InitConfig& cfg, InitDiagnostics* diag = nullptr);
RuleBase init_rulebase(const Dataset& train, const InitConfig& cfg, InitDiagnostics* diag = nullptr);

std::string format_init_diagnostics(const InitDiagnostics& diag);

}  // namespace lhnfc
