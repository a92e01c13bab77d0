#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "lhnfc/eval.hpp"
#include "oracle.hpp"

using namespace lhnfc;

namespace {

Dataset three_blob_dataset(uint64_t seed, int per_class = 16, double sd = 0.04) {
    Rng rng(seed);
    return testutil::blob_dataset(rng, {{0.15, 0.2}, {0.5, 0.8}, {0.85, 0.3}}, per_class, sd);
}

// one tight rule per class centered on the blob
RuleBase sharp_rulebase() {
    RuleBase rb = make_rulebase(3, 2, 3);
    const double centers[3][2] = {{0.15, 0.2}, {0.5, 0.8}, {0.85, 0.3}};
    for (int i = 0; i < 3; ++i) {
        rb.rule_class[i] = i + 1;
        for (int j = 0; j < 2; ++j) {
            rb.center(i, j) = centers[i][j];
            rb.width(i, j) = 0.1;
        }
        for (int k = 0; k < 3; ++k) rb.weight(i, k) = (k == i ? 1.0 : 0.0);
    }
    return rb;
}

}  // namespace

TEST_CASE("a matched rulebase scores a clean dataset perfectly") {
    Dataset ds = three_blob_dataset(61);
    Metrics m = evaluate(sharp_rulebase(), ds);
    CHECK(m.sample_count == 48);
    CHECK(m.class_count == 3);
    CHECK(m.accuracy_pct == 100.0);
    for (int k = 0; k < 3; ++k) {
        CHECK(m.confusion_at(k, k) == 16);
        CHECK(m.per_class_recall[k] == 1.0);
    }
}

TEST_CASE("a single-class predictor scores the majority share") {
    Dataset ds = three_blob_dataset(67, 10);
    RuleBase rb = sharp_rulebase();
    for (int i = 0; i < 3; ++i) {
        for (int k = 0; k < 3; ++k) rb.weight(i, k) = (k == 0 ? 1.0 : 0.0);
    }
    Metrics m = evaluate(rb, ds);
    CHECK(m.accuracy_pct == doctest::Approx(100.0 / 3.0).epsilon(1e-12));
    CHECK(m.per_class_recall[0] == 1.0);
    CHECK(m.per_class_recall[1] == 0.0);
    for (int k = 0; k < 3; ++k) CHECK(m.confusion_at(k, 0) == 10);
}

TEST_CASE("confusion rows sum to class sizes and the trace gives accuracy") {
    Rng rng(71);
    Dataset ds = three_blob_dataset(73, 14, 0.25);   // noisy: mistakes expected
    RuleBase rb = sharp_rulebase();
    Metrics m = evaluate(rb, ds);
    std::vector<int> sizes = ds.class_sizes();
    int trace = 0;
    for (int k = 0; k < 3; ++k) {
        int row = 0;
        for (int c = 0; c < 3; ++c) row += m.confusion_at(k, c);
        CHECK(row == sizes[k]);
        trace += m.confusion_at(k, k);
        if (sizes[k] > 0) {
            CHECK(m.per_class_recall[k] ==
                  doctest::Approx(static_cast<double>(m.confusion_at(k, k)) / sizes[k])
                      .epsilon(1e-15));
        }
    }
    CHECK(m.accuracy_pct ==
          doctest::Approx(100.0 * trace / ds.sample_count()).epsilon(1e-12));
}

TEST_CASE("evaluate reports rmse consistent with the cost oracle") {
    Rng rng(79);
    RuleBase rb = testutil::random_rulebase(rng, 4, 3, 3, true);
    Dataset ds;
    ds.class_count = 3;
    ds.feature_names = {"x", "y", "z"};
    const int n = 30;
    ds.features = testutil::random_samples(rng, n, 3);
    ds.labels = testutil::random_labels(rng, n, 3);
    Metrics m = evaluate(rb, ds);
    const double e = oracle::cost(rb, ds.features, ds.labels);
    CHECK(std::abs(m.rmse - rmse_from_cost(e, 3)) <= 1e-12);
}

TEST_CASE("evaluate validates shapes and repeats bitwise") {
    Dataset ds = three_blob_dataset(83);
    RuleBase wrong_d = make_rulebase(2, 3, 3);
    wrong_d.rule_class = {1, 2};
    CHECK_THROWS_WITH_AS(evaluate(wrong_d, ds), doctest::Contains("features"),
                         std::runtime_error);
    RuleBase wrong_k = make_rulebase(2, 2, 4);
    wrong_k.rule_class = {1, 2};
    CHECK_THROWS_WITH_AS(evaluate(wrong_k, ds), doctest::Contains("classes"),
                         std::runtime_error);
    Dataset none = subset(ds, {});
    CHECK_THROWS_WITH_AS(evaluate(sharp_rulebase(), none), doctest::Contains("no samples"),
                         std::runtime_error);

    Metrics a = evaluate(sharp_rulebase(), ds);
    Metrics b = evaluate(sharp_rulebase(), ds);
    CHECK(a.accuracy_pct == b.accuracy_pct);
    CHECK(a.rmse == b.rmse);
    CHECK(a.confusion == b.confusion);
}

TEST_CASE("metrics renderers expose the headline numbers") {
    Dataset ds = three_blob_dataset(89);
    Metrics m = evaluate(sharp_rulebase(), ds);
    std::string text = format_metrics(m);
    CHECK(text.find("accuracy") != std::string::npos);
    CHECK(text.find("100") != std::string::npos);
    CHECK(text.find("rmse") != std::string::npos);

    std::string header = metrics_csv_header(3);
    std::string row = metrics_csv_row(m);
    CHECK(std::count(header.begin(), header.end(), ',') ==
          std::count(row.begin(), row.end(), ','));
    CHECK(header.find("accuracy") != std::string::npos);

    std::string conf = format_confusion(m);
    CHECK(conf.find("16") != std::string::npos);
}

TEST_CASE("run_experiment trains on normalized data and scores both splits") {
    Dataset ds = three_blob_dataset(97, 24);
    SplitPlan plan = stratified_split(ds, 0.5, 7);
    Dataset train = subset(ds, plan.train_indices);
    Dataset test = subset(ds, plan.test_indices);

    ExperimentConfig cfg;
    cfg.init.seed = 19;
    cfg.train.scg.max_iter = 60;
    ExperimentResult res = run_experiment(train, test, cfg);
    CHECK(res.train_metrics.sample_count == train.sample_count());
    CHECK(res.test_metrics.sample_count == test.sample_count());
    CHECK(res.train_metrics.accuracy_pct >= 90.0);
    CHECK(!res.phase1.has_value());
    CHECK(!res.selection.has_value());
    // the normalizer comes from the training rows only
    NormParams ref = fit_normalizer(train, NormMode::minmax);
    CHECK(res.norm.shift == ref.shift);
    CHECK(res.norm.scale == ref.scale);
    CHECK_NOTHROW(res.model.validate());

    ExperimentConfig sel_cfg = cfg;
    sel_cfg.with_selection = true;
    sel_cfg.train.scg.max_iter = 80;
    // a permissive threshold: this exercises the plumbing, not the scoring
    sel_cfg.selection.tau = 0.05;
    ExperimentResult sel = run_experiment(train, test, sel_cfg);
    CHECK(sel.phase1.has_value());
    CHECK(sel.selection.has_value());
    CHECK(!sel.selection->kept.empty());
    CHECK(sel.model.feature_mask == sel.selection->kept_mask);
}

TEST_CASE("run_experiment accepts an empty test set") {
    Dataset ds = three_blob_dataset(101, 12);
    ExperimentConfig cfg;
    cfg.init.seed = 23;
    cfg.train.scg.max_iter = 30;
    ExperimentResult res = run_experiment(ds, Dataset{}, cfg);
    CHECK(res.train_metrics.sample_count == ds.sample_count());
    CHECK(res.test_metrics.sample_count == 0);
}

TEST_CASE("cross_validate walks every fold for every seed") {
    Dataset ds = three_blob_dataset(103, 20);
    ExperimentConfig cfg;
    cfg.init.seed = 1;   // overridden per fold
    cfg.train.scg.max_iter = 40;
    const std::vector<uint64_t> seeds{4, 9};
    CvSummary cv = cross_validate(ds, cfg, 4, seeds);

    CHECK(cv.fold_count == 4);
    CHECK(cv.seeds == seeds);
    REQUIRE(cv.folds.size() == 8);
    for (size_t r = 0; r < cv.folds.size(); ++r) {
        CHECK(cv.folds[r].seed == seeds[r / 4]);
        CHECK(cv.folds[r].fold == static_cast<int>(r % 4));
        CHECK(cv.folds[r].valid_metrics.sample_count == 15);
        CHECK(cv.folds[r].train_metrics.sample_count == 45);
    }

    double mean = 0.0;
    for (const FoldResult& f : cv.folds) mean += f.valid_metrics.accuracy_pct;
    mean /= static_cast<double>(cv.folds.size());
    CHECK(cv.mean_valid_accuracy == doctest::Approx(mean).epsilon(1e-12));
    CHECK(cv.per_seed_mean_accuracy.size() == 2);
    CHECK(cv.per_seed_std_accuracy.size() == 2);
    // equal fold sizes here, so the weighted view coincides
    CHECK(cv.weighted_valid_accuracy == doctest::Approx(mean).epsilon(1e-12));

    CvSummary again = cross_validate(ds, cfg, 4, seeds);
    CHECK(again.mean_valid_accuracy == cv.mean_valid_accuracy);
    CHECK(again.folds[3].valid_metrics.accuracy_pct ==
          cv.folds[3].valid_metrics.accuracy_pct);

    std::string text = format_cv_summary(cv);
    CHECK(text.find("overall validation accuracy") != std::string::npos);
    std::string csv = cv_detail_csv(cv);
    // header plus one train row and one valid row per fold
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 16);
    CHECK(csv.find("seed,fold,split") == 0);
}
