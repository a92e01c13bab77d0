#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "lhnfc/select.hpp"

using namespace lhnfc;

namespace {

// Three-class, five-feature fixture with one rule per class and hand-picked
// hedge exponents. Feature 4 (0-based 3) is the designated weak column.
RuleBase fixture_rulebase() {
    RuleBase rb = make_rulebase(3, 5, 3);
    const double hedges[3][5] = {
        {0.7147, 0.5382, 0.2665, 5.68e-11, 0.3119},
        {0.4052, 1.0, 0.3439, 0.2792, 0.8821},
        {0.6538, 1.0, 0.4367, 0.3828, 0.5506},
    };
    for (int i = 0; i < 3; ++i) {
        rb.rule_class[i] = i + 1;
        for (int j = 0; j < 5; ++j) rb.hedge(i, j) = hedges[i][j];
    }
    return rb;
}

const double kExpectedSums[5] = {1.7738, 2.5383, 1.0471, 0.6619, 1.7446};

}  // namespace

TEST_CASE("per-feature hedge totals match the fixture") {
    SelectionReport rep = hedge_scores(fixture_rulebase());
    REQUIRE(rep.feature_count == 5);
    REQUIRE(rep.class_count == 3);
    for (int j = 0; j < 5; ++j) {
        CHECK(std::abs(rep.sum_score[j] - kExpectedSums[j]) <= 5e-4);
        // the sum row aggregates the per-class table
        double total = 0.0, prod = 1.0;
        for (int k = 0; k < 3; ++k) {
            total += rep.hedge_at(k, j);
            prod *= rep.hedge_at(k, j);
        }
        CHECK(rep.sum_score[j] == doctest::Approx(total).epsilon(1e-12));
        CHECK(rep.product_score[j] == doctest::Approx(prod).epsilon(1e-12));
    }
}

TEST_CASE("the default sum policy keeps the four strong features") {
    SelectionReport rep = select_features(hedge_scores(fixture_rulebase()),
                                          SelectionPolicy::threshold_sum, 0.5);
    CHECK(rep.kept == std::vector<int>{0, 1, 2, 4});
    CHECK(rep.dropped == std::vector<int>{3});
    CHECK(rep.kept_mask == std::vector<uint8_t>{1, 1, 1, 0, 1});
    CHECK(rep.tau == 0.5);
    CHECK(rep.policy == SelectionPolicy::threshold_sum);
}

TEST_CASE("the product policy is harsher on weak single-class hedges") {
    SelectionReport rep = select_features(hedge_scores(fixture_rulebase()),
                                          SelectionPolicy::threshold_product, 0.5);
    // cutoff 0.5^3 = 0.125; features 3 and 5 fall below on their products
    CHECK(rep.kept == std::vector<int>{0, 1, 4});
    CHECK(rep.dropped == std::vector<int>{2, 3});
}

TEST_CASE("a zero threshold keeps everything") {
    SelectionReport rep = select_features(hedge_scores(fixture_rulebase()),
                                          SelectionPolicy::threshold_sum, 0.0);
    CHECK(rep.kept == std::vector<int>{0, 1, 2, 3, 4});
    CHECK(rep.dropped.empty());
}

TEST_CASE("top-m keeps the m largest sum scores") {
    SelectionReport scored = hedge_scores(fixture_rulebase());
    SelectionReport all = select_features(scored, SelectionPolicy::top_m, 0.0, 5);
    CHECK(all.kept == std::vector<int>{0, 1, 2, 3, 4});

    SelectionReport two = select_features(scored, SelectionPolicy::top_m, 0.0, 2);
    CHECK(two.kept == std::vector<int>{0, 1});   // sums 1.7738 and 2.5383 lead
    CHECK(two.dropped == std::vector<int>{2, 3, 4});
    CHECK(two.top_m == 2);

    CHECK_THROWS_WITH_AS(select_features(scored, SelectionPolicy::top_m, 0.0, 0),
                         doctest::Contains("top-m"), std::runtime_error);
}

TEST_CASE("scoring rejects rulebases without the needed structure") {
    RuleBase no_class = fixture_rulebase();
    no_class.rule_class[1] = 0;
    CHECK_THROWS_WITH_AS(hedge_scores(no_class), doctest::Contains("attributed"),
                         std::runtime_error);

    RuleBase unconstrained = fixture_rulebase();
    unconstrained.hedge(0, 0) = 1.5;
    CHECK_THROWS_WITH_AS(hedge_scores(unconstrained), doctest::Contains("constrained"),
                         std::runtime_error);

    RuleBase missing_class = fixture_rulebase();
    missing_class.rule_class = {1, 1, 1};   // classes 2 and 3 own no rules
    CHECK_THROWS_WITH_AS(hedge_scores(missing_class), doctest::Contains("class 2"),
                         std::runtime_error);
}

TEST_CASE("an over-tight threshold reports the remedy") {
    SelectionReport scored = hedge_scores(fixture_rulebase());
    CHECK_THROWS_WITH_AS(select_features(scored, SelectionPolicy::threshold_sum, 10.0),
                         doctest::Contains("tau"), std::runtime_error);
    CHECK_THROWS_WITH_AS(select_features(SelectionReport{}, SelectionPolicy::threshold_sum, 0.5),
                         doctest::Contains("empty"), std::runtime_error);
}

TEST_CASE("componentwise hedge dominance orders both scores") {
    RuleBase rb = make_rulebase(2, 3, 2);
    rb.rule_class = {1, 2};
    // feature 0 dominates feature 1 in every class, which dominates feature 2
    const double h[2][3] = {{0.9, 0.5, 0.2}, {0.8, 0.6, 0.3}};
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 3; ++j) rb.hedge(i, j) = h[i][j];
    }
    SelectionReport rep = hedge_scores(rb);
    CHECK(rep.sum_score[0] > rep.sum_score[1]);
    CHECK(rep.sum_score[1] > rep.sum_score[2]);
    CHECK(rep.product_score[0] > rep.product_score[1]);
    CHECK(rep.product_score[1] > rep.product_score[2]);
}

TEST_CASE("aggregation across a class's rules: max versus mean") {
    RuleBase rb = make_rulebase(3, 1, 2);
    rb.rule_class = {1, 1, 2};
    rb.hedge(0, 0) = 0.2;
    rb.hedge(1, 0) = 0.4;
    rb.hedge(2, 0) = 0.9;
    SelectionReport by_max = hedge_scores(rb, HedgeAggregation::max);
    CHECK(by_max.hedge_at(0, 0) == doctest::Approx(0.4).epsilon(1e-15));
    SelectionReport by_mean = hedge_scores(rb, HedgeAggregation::mean);
    CHECK(by_mean.hedge_at(0, 0) == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(by_mean.hedge_at(1, 0) == doctest::Approx(0.9).epsilon(1e-15));
}

TEST_CASE("selection enum names round-trip") {
    for (HedgeAggregation a : {HedgeAggregation::max, HedgeAggregation::mean}) {
        CHECK(hedge_aggregation_from_string(to_string(a)) == a);
    }
    for (SelectionPolicy p :
         {SelectionPolicy::threshold_sum, SelectionPolicy::threshold_product, SelectionPolicy::top_m}) {
        CHECK(selection_policy_from_string(to_string(p)) == p);
    }
    CHECK_THROWS_AS(hedge_aggregation_from_string("median"), std::runtime_error);
    CHECK_THROWS_AS(selection_policy_from_string("best"), std::runtime_error);
}

TEST_CASE("report renderers carry the score rows") {
    SelectionReport rep = select_features(hedge_scores(fixture_rulebase()),
                                          SelectionPolicy::threshold_sum, 0.5);
    std::string text = format_selection_report(rep, {"a", "b", "c", "d", "e"});
    CHECK(text.find("sum") != std::string::npos);
    CHECK(text.find("product") != std::string::npos);
    CHECK(text.find("kept") != std::string::npos);
    std::string csv = selection_report_csv(rep, {"a", "b", "c", "d", "e"});
    CHECK(csv.find("d") != std::string::npos);
    CHECK(csv.find(',') != std::string::npos);
}

TEST_CASE("the pipeline discards the designed noise column end to end") {
    // bundled dataset: columns 1,2,3,5 separate the classes, column 4 is noise
    const char* path = std::getenv("LHNFC_DATA");
    REQUIRE(path != nullptr);
    Dataset raw = load_csv(path);
    SplitPlan plan = stratified_split(raw, 0.6, 1);
    auto [train, params] = normalize(subset(raw, plan.train_indices), NormMode::minmax);
    (void)params;

    InitConfig icfg;
    icfg.clusters_per_class = 1;
    icfg.seed = derive_seed(1, "init");
    TrainConfig tcfg;
    SelectionConfig scfg;

    PipelineResult pr = selection_pipeline(train, icfg, tcfg, scfg);
    CHECK(pr.report.kept == std::vector<int>{0, 1, 2, 4});
    CHECK(pr.report.dropped == std::vector<int>{3});

    // phase 1 only moves hedges and weights; the probe grid stays at the init
    RuleBase at_init = init_rulebase(train, icfg);
    CHECK(pr.phase1.model.centers == at_init.centers);
    CHECK(pr.phase1.model.widths == at_init.widths);
    for (double p : pr.phase1.model.hedges) {
        CHECK(p >= 0.0);
        CHECK(p <= 1.0);
    }

    // the final model lives on the kept subset with the original arity
    CHECK(pr.final_fit.model.feature_mask == pr.report.kept_mask);
    CHECK(pr.final_fit.model.feature_count == 5);
    CHECK(pr.final_fit.model.class_count == 3);
    CHECK_NOTHROW(pr.final_fit.model.validate());
    for (int i = 0; i < pr.final_fit.model.rule_count; ++i) {
        CHECK(pr.final_fit.model.hedge(i, 3) == 0.0);
    }
}

TEST_CASE("a pipeline that would drop everything propagates the error") {
    Rng rng(1009);
    Dataset ds = testutil::blob_dataset(rng, {{0.3, 0.4}, {0.7, 0.6}}, 25, 0.05);
    InitConfig icfg;
    icfg.seed = 2;
    TrainConfig tcfg;
    tcfg.scg.max_iter = 30;
    SelectionConfig scfg;
    scfg.tau = 50.0;   // impossible bar
    CHECK_THROWS_WITH_AS(selection_pipeline(ds, icfg, tcfg, scfg), doctest::Contains("tau"),
                         std::runtime_error);
}
