#include "lhnfc/eval.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "lhnfc/rng.hpp"
#include "lhnfc/text.hpp"

namespace lhnfc {

Metrics evaluate(const RuleBase& rb, const Dataset& ds) {
    if (ds.feature_count() != rb.feature_count)
        throw std::runtime_error("evaluate: dataset has " + std::to_string(ds.feature_count()) +
                                 " features, model expects " + std::to_string(rb.feature_count));
    if (ds.class_count != rb.class_count)
        throw std::runtime_error("evaluate: dataset has " + std::to_string(ds.class_count) +
                                 " classes, model expects " + std::to_string(rb.class_count));
    if (ds.sample_count() == 0) throw std::runtime_error("evaluate: no samples");

    const int N = ds.sample_count();
    const int K = rb.class_count;
    ForwardTrace trace = forward(rb, ds.view());

    Metrics m;
    m.sample_count = N;
    m.class_count = K;
    m.confusion.assign(static_cast<size_t>(K) * K, 0);

    int correct = 0;
    double total_half_sq = 0.0;
    for (int s = 0; s < N; ++s) {
        const int truth = ds.labels[s];
        const int pred = trace.predicted[s];
        ++m.confusion[static_cast<size_t>(truth - 1) * K + (pred - 1)];
        if (pred == truth) ++correct;
        for (int k = 0; k < K; ++k) {
            double err = ((truth == k + 1) ? 1.0 : 0.0) - trace.normalized_at(s, k);
            total_half_sq += 0.5 * err * err;
        }
    }
    m.accuracy_pct = 100.0 * correct / N;
    m.rmse = rmse_from_cost(total_half_sq / N, K);
    m.per_class_recall.assign(K, 0.0);
    for (int k = 0; k < K; ++k) {
        int row_total = 0;
        for (int j = 0; j < K; ++j) row_total += m.confusion_at(k, j);
        if (row_total > 0)
            m.per_class_recall[k] = static_cast<double>(m.confusion_at(k, k)) / row_total;
    }
    return m;
}

namespace {

std::string fixed4(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

}  // namespace

std::string format_metrics(const Metrics& m) {
    std::string s;
    s += "samples: " + std::to_string(m.sample_count) + "\n";
    s += "accuracy: " + fixed4(m.accuracy_pct) + "%\n";
    s += "rmse: " + format_double(m.rmse) + "\n";
    for (int k = 0; k < m.class_count; ++k)
        s += "recall class " + std::to_string(k + 1) + ": " + fixed4(100.0 * m.per_class_recall[k]) + "%\n";
    s += format_confusion(m);
    return s;
}

std::string format_confusion(const Metrics& m) {
    std::string s = "confusion (rows true, cols predicted):\n";
    for (int t = 0; t < m.class_count; ++t) {
        s += "  class " + std::to_string(t + 1) + ":";
        int row_total = 0;
        for (int p = 0; p < m.class_count; ++p) row_total += m.confusion_at(t, p);
        for (int p = 0; p < m.class_count; ++p) s += " " + std::to_string(m.confusion_at(t, p));
        s += "  |";
        for (int p = 0; p < m.class_count; ++p) {
            double share = row_total > 0 ? static_cast<double>(m.confusion_at(t, p)) / row_total : 0.0;
            s += " " + fixed4(share);
        }
        s += "\n";
    }
    return s;
}

std::string metrics_csv_header(int class_count) {
    std::string s = "samples,accuracy,rmse";
    for (int k = 1; k <= class_count; ++k) s += ",recall_" + std::to_string(k);
    for (int t = 1; t <= class_count; ++t)
        for (int p = 1; p <= class_count; ++p)
            s += ",confusion_" + std::to_string(t) + "_" + std::to_string(p);
    return s + "\n";
}

std::string metrics_csv_row(const Metrics& m) {
    std::string s = std::to_string(m.sample_count) + "," + fixed4(m.accuracy_pct) + "," +
                    format_double(m.rmse);
    for (int k = 0; k < m.class_count; ++k) s += "," + format_double(m.per_class_recall[k]);
    for (int t = 0; t < m.class_count; ++t)
        for (int p = 0; p < m.class_count; ++p) s += "," + std::to_string(m.confusion_at(t, p));
    return s + "\n";
}

ExperimentResult run_experiment(const Dataset& train_raw, const Dataset& test_raw,
                                const ExperimentConfig& cfg) {
    ExperimentResult out;
    out.norm = fit_normalizer(train_raw, cfg.norm);
    Dataset train = apply_normalizer(train_raw, out.norm);
    if (cfg.with_selection) {
        PipelineResult pipe = selection_pipeline(train, cfg.init, cfg.train, cfg.selection);
        out.phase1 = std::move(pipe.phase1);
        out.selection = std::move(pipe.report);
        out.fit = std::move(pipe.final_fit);
    } else {
        RuleBase rb0 = init_rulebase(train, cfg.init);
        out.fit = fit(rb0, train, cfg.train);
    }
    out.model = out.fit.model;
    out.train_metrics = evaluate(out.model, train);
    if (test_raw.sample_count() > 0) {
        Dataset test = apply_normalizer(test_raw, out.norm);
        out.test_metrics = evaluate(out.model, test);
    }
    return out;
}

CvSummary cross_validate(const Dataset& ds, const ExperimentConfig& cfg, int k,
                         const std::vector<uint64_t>& seeds) {
    if (seeds.empty()) throw std::runtime_error("cross-validation needs at least one seed");
    CvSummary cv;
    cv.fold_count = k;
    cv.seeds = seeds;

    for (uint64_t seed : seeds) {
        SplitPlan plan = kfold(ds, k, seed);
        double seed_sum = 0.0;
        double seed_sumsq = 0.0;
        for (int f = 0; f < k; ++f) {
            Dataset fold_train = subset(ds, plan.fold_train(f));
            Dataset fold_valid = subset(ds, plan.fold_valid(f));
            ExperimentConfig fold_cfg = cfg;
            fold_cfg.init.seed = derive_seed(seed, "cv-fold/" + std::to_string(f));
            ExperimentResult res = run_experiment(fold_train, fold_valid, fold_cfg);
            FoldResult row;
            row.seed = seed;
            row.fold = f;
            row.train_metrics = std::move(res.train_metrics);
            row.valid_metrics = std::move(res.test_metrics);
            seed_sum += row.valid_metrics.accuracy_pct;
            seed_sumsq += row.valid_metrics.accuracy_pct * row.valid_metrics.accuracy_pct;
            cv.folds.push_back(std::move(row));
        }
        double mean = seed_sum / k;
        double var = seed_sumsq / k - mean * mean;
        cv.per_seed_mean_accuracy.push_back(mean);
        cv.per_seed_std_accuracy.push_back(std::sqrt(std::max(var, 0.0)));
    }

    double sum = 0.0, sumsq = 0.0, train_sum = 0.0, rmse_sum = 0.0;
    double weighted = 0.0;
    long total_valid = 0;
    for (const FoldResult& row : cv.folds) {
        sum += row.valid_metrics.accuracy_pct;
        sumsq += row.valid_metrics.accuracy_pct * row.valid_metrics.accuracy_pct;
        rmse_sum += row.valid_metrics.rmse;
        train_sum += row.train_metrics.accuracy_pct;
        weighted += row.valid_metrics.accuracy_pct * row.valid_metrics.sample_count;
        total_valid += row.valid_metrics.sample_count;
    }
    const double n = static_cast<double>(cv.folds.size());
    cv.mean_valid_accuracy = sum / n;
    cv.std_valid_accuracy = std::sqrt(std::max(sumsq / n - cv.mean_valid_accuracy * cv.mean_valid_accuracy, 0.0));
    cv.weighted_valid_accuracy = weighted / total_valid;
    cv.mean_valid_rmse = rmse_sum / n;
    cv.mean_train_accuracy = train_sum / n;
    return cv;
}

std::string format_cv_summary(const CvSummary& cv) {
    std::string s;
    s += "folds: " + std::to_string(cv.fold_count) + ", seeds: " + std::to_string(cv.seeds.size()) + "\n";
    for (size_t i = 0; i < cv.seeds.size(); ++i) {
        s += "seed " + std::to_string(cv.seeds[i]) + ": validation accuracy " +
             fixed4(cv.per_seed_mean_accuracy[i]) + "% +/- " + fixed4(cv.per_seed_std_accuracy[i]) + "\n";
    }
    s += "overall validation accuracy (unweighted): " + fixed4(cv.mean_valid_accuracy) + "% +/- " +
         fixed4(cv.std_valid_accuracy) + "\n";
    s += "overall validation accuracy (weighted): " + fixed4(cv.weighted_valid_accuracy) + "%\n";
    s += "overall validation rmse: " + format_double(cv.mean_valid_rmse) + "\n";
    s += "overall training accuracy: " + fixed4(cv.mean_train_accuracy) + "%\n";
    return s;
}

std::string cv_detail_csv(const CvSummary& cv) {
    std::string s = "seed,fold,split,";
    // both train and validation rows share the metrics columns
    std::string header = metrics_csv_header(cv.folds.empty() ? 0 : cv.folds.front().valid_metrics.class_count);
    header.pop_back();   // trailing newline
    s += header + "\n";
    for (const FoldResult& row : cv.folds) {
        std::string t = metrics_csv_row(row.train_metrics);
        std::string v = metrics_csv_row(row.valid_metrics);
        s += std::to_string(row.seed) + "," + std::to_string(row.fold) + ",train," + t;
        s += std::to_string(row.seed) + "," + std::to_string(row.fold) + ",valid," + v;
    }
    return s;
}

}  // namespace lhnfc
