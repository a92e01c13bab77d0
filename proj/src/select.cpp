#include "lhnfc/select.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "lhnfc/text.hpp"

namespace lhnfc {

namespace {

// relevance-probe knobs for the pipeline's first phase: the common start
// value every hedge is reset to, and the stopping tolerance that ends the
// probe once meaningful descent is over
constexpr double kProbeHedgeStart = 0.2;
constexpr double kProbeGradTol = 2e-3;

}  // namespace

std::string to_string(HedgeAggregation a) {
    return a == HedgeAggregation::max ? "max" : "mean";
}

HedgeAggregation hedge_aggregation_from_string(std::string_view s) {
    if (s == "max") return HedgeAggregation::max;
    if (s == "mean") return HedgeAggregation::mean;
    throw std::runtime_error("unknown hedge aggregation '" + std::string(s) +
                             "' (expected max or mean)");
}

std::string to_string(SelectionPolicy p) {
    switch (p) {
        case SelectionPolicy::threshold_sum: return "sum";
        case SelectionPolicy::threshold_product: return "product";
        case SelectionPolicy::top_m: return "top-m";
    }
    return "?";
}

SelectionPolicy selection_policy_from_string(std::string_view s) {
    if (s == "sum") return SelectionPolicy::threshold_sum;
    if (s == "product") return SelectionPolicy::threshold_product;
    if (s == "top-m" || s == "topm") return SelectionPolicy::top_m;
    throw std::runtime_error("unknown selection policy '" + std::string(s) +
                             "' (expected sum, product, or top-m)");
}

SelectionReport hedge_scores(const RuleBase& rb, HedgeAggregation aggregation) {
    rb.validate();
    const int K = rb.class_count;
    const int D = rb.feature_count;

    std::vector<int> rules_of_class(K, 0);
    for (int i = 0; i < rb.rule_count; ++i) {
        int cls = rb.rule_class[i];
        if (cls < 1 || cls > K)
            throw std::runtime_error(
                "selection needs every rule attributed to a class; rule " + std::to_string(i) +
                " has no class");
        ++rules_of_class[cls - 1];
    }
    for (int k = 0; k < K; ++k)
        if (rules_of_class[k] == 0)
            throw std::runtime_error("selection: no rules for class " + std::to_string(k + 1));

    SelectionReport report;
    report.class_count = K;
    report.feature_count = D;
    report.feature_mask = rb.feature_mask;
    report.aggregation = aggregation;
    report.class_feature_hedge.assign(static_cast<size_t>(K) * D, 0.0);
    report.product_score.assign(D, 0.0);
    report.sum_score.assign(D, 0.0);

    const std::vector<int> active = rb.active_features();
    for (int j : active) {
        for (int i = 0; i < rb.rule_count; ++i) {
            double p = rb.hedge(i, j);
            if (p < 0.0 || p > 1.0)
                throw std::runtime_error(
                    "selection expects hedges in [0,1]; train with the constrained mode first");
            const size_t kj = static_cast<size_t>(rb.rule_class[i] - 1) * D + j;
            if (aggregation == HedgeAggregation::max) {
                report.class_feature_hedge[kj] = std::max(report.class_feature_hedge[kj], p);
            } else {
                report.class_feature_hedge[kj] += p / rules_of_class[rb.rule_class[i] - 1];
            }
        }
        double prod = 1.0;
        double sum = 0.0;
        for (int k = 0; k < K; ++k) {
            prod *= report.hedge_at(k, j);
            sum += report.hedge_at(k, j);
        }
        report.product_score[j] = prod;
        report.sum_score[j] = sum;
    }
    return report;
}

SelectionReport select_features(const SelectionReport& report, SelectionPolicy policy,
                                double tau, int m) {
    if (report.class_count < 2 || report.feature_count < 1)
        throw std::runtime_error("selection report is empty");
    SelectionReport out = report;
    out.policy = policy;
    out.tau = tau;
    out.top_m = m;
    out.kept.clear();
    out.dropped.clear();
    out.kept_mask.assign(report.feature_count, 0);

    std::vector<int> active;
    for (int j = 0; j < report.feature_count; ++j)
        if (report.feature_mask.empty() || report.feature_mask[j]) active.push_back(j);
    if (active.empty()) throw std::runtime_error("selection: no active features to choose from");

    auto keep = [&out](int j) {
        out.kept.push_back(j);
        out.kept_mask[j] = 1;
    };

    switch (policy) {
        case SelectionPolicy::threshold_sum: {
            // A feature relevant for one class can still be worth keeping, so
            // the bar is tau per class over all but one of the classes.
            const double cutoff = tau * (report.class_count - 1);
            for (int j : active)
                if (out.sum_score[j] >= cutoff) keep(j);
            break;
        }
        case SelectionPolicy::threshold_product: {
            const double cutoff = std::pow(tau, report.class_count);
            for (int j : active)
                if (out.product_score[j] >= cutoff) keep(j);
            break;
        }
        case SelectionPolicy::top_m: {
            if (m < 1) throw std::runtime_error("selection: top-m needs m >= 1");
            std::vector<int> order = active;
            std::stable_sort(order.begin(), order.end(), [&out](int a, int b) {
                return out.sum_score[a] > out.sum_score[b];
            });
            if (m < static_cast<int>(order.size())) order.resize(m);
            std::sort(order.begin(), order.end());
            for (int j : order) keep(j);
            break;
        }
    }

    if (out.kept.empty())
        throw std::runtime_error(
            "selection dropped every feature; loosen the threshold (lower tau)");
    for (int j = 0; j < report.feature_count; ++j)
        if (!out.kept_mask[j]) out.dropped.push_back(j);
    return out;
}

namespace {

std::string feature_label(const std::vector<std::string>& names, int j) {
    if (j < static_cast<int>(names.size()) && !names[j].empty()) return names[j];
    return "feature " + std::to_string(j + 1);
}

}  // namespace

std::string format_selection_report(const SelectionReport& report,
                                    const std::vector<std::string>& feature_names) {
    std::string s;
    s += "hedge relevance (aggregation: " + to_string(report.aggregation) + ")\n";
    for (int j = 0; j < report.feature_count; ++j) {
        s += feature_label(feature_names, j) + ":";
        for (int k = 0; k < report.class_count; ++k)
            s += " " + format_double(report.hedge_at(k, j));
        s += "  sum=" + format_double(report.sum_score[j]);
        s += " product=" + format_double(report.product_score[j]);
        if (!report.feature_mask.empty() && !report.feature_mask[j]) s += "  (inactive)";
        s += "\n";
    }
    if (!report.kept_mask.empty()) {
        s += "policy: " + to_string(report.policy);
        if (report.policy == SelectionPolicy::top_m) {
            s += " m=" + std::to_string(report.top_m);
        } else {
            s += " tau=" + format_double(report.tau);
        }
        s += "\nkept:";
        for (int j : report.kept) s += " " + std::to_string(j + 1);
        s += "\ndropped:";
        for (int j : report.dropped) s += " " + std::to_string(j + 1);
        s += "\n";
    }
    return s;
}

std::string selection_report_csv(const SelectionReport& report,
                                 const std::vector<std::string>& feature_names) {
    std::string s = "row";
    for (int j = 0; j < report.feature_count; ++j) s += "," + feature_label(feature_names, j);
    s += "\n";
    for (int k = 0; k < report.class_count; ++k) {
        s += "class " + std::to_string(k + 1);
        for (int j = 0; j < report.feature_count; ++j)
            s += "," + format_double(report.hedge_at(k, j));
        s += "\n";
    }
    s += "sum";
    for (int j = 0; j < report.feature_count; ++j) s += "," + format_double(report.sum_score[j]);
    s += "\nproduct";
    for (int j = 0; j < report.feature_count; ++j)
        s += "," + format_double(report.product_score[j]);
    s += "\n";
    if (!report.kept_mask.empty()) {
        s += "kept";
        for (int j = 0; j < report.feature_count; ++j)
            s += "," + std::to_string(static_cast<int>(report.kept_mask[j]));
        s += "\n";
    }
    return s;
}

PipelineResult selection_pipeline(const Dataset& train, const InitConfig& init_cfg,
                                  const TrainConfig& train_cfg, const SelectionConfig& sel_cfg) {
    PipelineResult out;

    // The first phase is a relevance probe, not the final model: it trains
    // hedges and class weights with the geometry frozen at its clustered
    // initialization. Frozen widths matter because a width and a hedge act
    // on the membership only through p/sigma^2 — were the widths free, they
    // would absorb an irrelevant feature (sigma grows, hedge untouched) and
    // the hedges would never encode relevance at all. Free weights matter
    // because the per-rule volume gradients always sum to zero across the
    // rule base: with the weights pinned, whichever rule is left net
    // over-firing recruits an irrelevant feature's hedge as its volume
    // knob, wrecking that feature's score; trainable weights keep the
    // volumes at equilibrium so a hedge only ever answers for the shape of
    // its feature.
    //
    // Hedges start low, not at the midpoint: with every exponent near zero
    // the memberships are flat and the model badly underfits, so a feature
    // the classes genuinely need must pull its exponent up to classify at
    // all, while a feature that only injects variance has nothing to earn.
    // Relevance is read as how far each class raised the exponent. The
    // probe also stops on a loose gradient tolerance: once meaningful
    // descent ends, running to full convergence only lets the optimizer
    // polish soft margins with whatever exponents are left — that tail is
    // exactly where an irrelevant feature's score creeps up.
    TrainConfig phase1_cfg = train_cfg;
    phase1_cfg.hedge_mode = HedgeMode::constrained01;
    phase1_cfg.trainable.centers = false;
    phase1_cfg.trainable.widths = false;
    phase1_cfg.trainable.hedges = true;
    phase1_cfg.trainable.weights = true;
    phase1_cfg.scg.grad_tol = std::max(phase1_cfg.scg.grad_tol, kProbeGradTol);
    // Which features separate the classes is a class-level question, so the
    // probe always scores at one prototype per class whatever granularity
    // the final model uses; the kept set then depends on the data and the
    // split alone, not on model capacity.
    InitConfig probe_init = init_cfg;
    probe_init.clusters_per_class = 1;
    RuleBase rb1 = init_rulebase(train, probe_init);
    for (int j : rb1.active_features())
        for (int i = 0; i < rb1.rule_count; ++i) rb1.hedge(i, j) = kProbeHedgeStart;
    out.phase1 = fit(rb1, train, phase1_cfg);

    SelectionReport scored = hedge_scores(out.phase1.model, sel_cfg.aggregation);
    out.report = select_features(scored, sel_cfg.policy, sel_cfg.tau, sel_cfg.top_m);

    TrainConfig phase3_cfg = train_cfg;
    phase3_cfg.hedge_mode = HedgeMode::nonneg_unconstrained;
    RuleBase rb3 = init_rulebase(train, out.report.kept_mask, init_cfg);
    out.final_fit = fit(rb3, train, phase3_cfg);
    return out;
}

}  // namespace lhnfc
