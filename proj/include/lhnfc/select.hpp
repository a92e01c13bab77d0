#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lhnfc/init.hpp"
#include "lhnfc/network.hpp"
#include "lhnfc/train.hpp"

namespace lhnfc {

// How per-rule hedges collapse to one value per (class, feature) when a
// class owns several rules: max reads "most asserted relevance", mean
// averages the class's rules.
enum class HedgeAggregation { max, mean };

// threshold_sum keeps feature j when its per-class hedge sum reaches
// tau * (class_count - 1); threshold_product compares the cross-class
// product against tau^class_count; top_m keeps the m largest sum scores.
enum class SelectionPolicy { threshold_sum, threshold_product, top_m };

std::string to_string(HedgeAggregation a);
HedgeAggregation hedge_aggregation_from_string(std::string_view s);
std::string to_string(SelectionPolicy p);
SelectionPolicy selection_policy_from_string(std::string_view s);

// Per-feature relevance extracted from a trained rulebase's hedges, plus the
// decision once select_features has run. Rows cover every feature column;
// inactive features carry zero scores and are always dropped.
struct SelectionReport {
    int class_count = 0;
    int feature_count = 0;
    std::vector<uint8_t> feature_mask;         // copied from the scored rulebase
    std::vector<double> class_feature_hedge;   // K×D
    std::vector<double> product_score;         // D, cross-class product
    std::vector<double> sum_score;             // D, cross-class sum
    HedgeAggregation aggregation = HedgeAggregation::max;

    // filled by select_features
    SelectionPolicy policy = SelectionPolicy::threshold_sum;
    double tau = 0.0;
    int top_m = 0;
    std::vector<int> kept;              // 0-based feature ids, ascending
    std::vector<int> dropped;           // ascending; kept ∪ dropped = all features
    std::vector<uint8_t> kept_mask;     // D

    double hedge_at(int k, int j) const {
        return class_feature_hedge[static_cast<size_t>(k) * feature_count + j];
    }
};

// Scores every active feature from a rulebase trained with hedges in [0,1].
// Every rule must carry its class attribution (rule_class).
SelectionReport hedge_scores(const RuleBase& rb, HedgeAggregation aggregation = HedgeAggregation::max);

// Applies a policy to a scored report. tau is the threshold policies'
// parameter, m the top-m count. Errors when the decision would drop every
// feature.
SelectionReport select_features(const SelectionReport& report, SelectionPolicy policy,
                                double tau, int m = 0);

// Classes-by-features table with product and sum rows, plain text or CSV.
std::string format_selection_report(const SelectionReport& report,
                                    const std::vector<std::string>& feature_names = {});
std::string selection_report_csv(const SelectionReport& report,
                                 const std::vector<std::string>& feature_names = {});

struct SelectionConfig {
    HedgeAggregation aggregation = HedgeAggregation::max;
    SelectionPolicy policy = SelectionPolicy::threshold_sum;
    double tau = 0.5;
    int top_m = 0;
};

struct PipelineResult {
    FitResult phase1;          // constrained-hedge fit on all features
    SelectionReport report;    // scored + decided
    FitResult final_fit;       // retrained on the kept subset
};

// Three-phase run: fit with hedges confined to (0,1) on all features, score
// and choose features from the learned hedges, then re-initialize and fit on
// the survivors with nonnegative hedges. cfg.hedge_mode is ignored — the
// phases fix their own modes.
PipelineResult selection_pipeline(const Dataset& train, const InitConfig& init_cfg,
                                  const TrainConfig& train_cfg, const SelectionConfig& sel_cfg);

}  // namespace lhnfc
