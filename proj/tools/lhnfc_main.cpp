#include <iostream>

#include "CLI11.hpp"
#include "lhnfc/commands.hpp"

namespace {

void add_data_options(CLI::App* sub, lhnfc::RunConfig& cfg) {
    sub->add_option("--config", cfg.config, "flat key=value config file; explicit flags win");
    sub->add_option("--data", cfg.data, "dataset CSV path");
    sub->add_flag("--label-last", cfg.label_last, "label column trails each row instead of leading");
    sub->add_option("--out", cfg.out, "artifact output directory");
}

// Overlays the config file onto cfg, skipping every key the user pinned on
// the command line.
void apply_config_file(CLI::App* active, lhnfc::RunConfig& cfg) {
    if (cfg.config.empty()) return;
    for (const auto& [key, value] : lhnfc::read_config_pairs(cfg.config)) {
        const CLI::Option* opt = active->get_option_no_throw("--" + key);
        if (opt != nullptr && opt->count() > 0) continue;
        lhnfc::assign_config_value(cfg, key, value);
    }
}

void add_model_build_options(CLI::App* sub, lhnfc::RunConfig& cfg) {
    sub->add_option("--norm", cfg.norm, "feature scaling: none|minmax|zscore");
    sub->add_option("--seed", cfg.seed, "root random seed");
    sub->add_option("--clusters", cfg.clusters, "rules (clusters) per class");
    sub->add_option("--kmeans-restarts", cfg.kmeans_restarts, "k-means restarts");
    sub->add_option("--kmeans-iters", cfg.kmeans_iters, "k-means iteration cap");
    sub->add_flag("--kmeans-plus-plus", cfg.kmeans_plus_plus, "k-means++ seeding");
    sub->add_option("--width-rule", cfg.width_rule, "initial widths: std|nearest");
    sub->add_option("--scg-iters", cfg.scg_iters, "optimizer iteration cap");
    sub->add_option("--scg-grad-tol", cfg.scg_grad_tol, "optimizer gradient-norm stop");
    sub->add_option("--scg-obj-tol", cfg.scg_obj_tol, "optimizer objective-change stop");
    sub->add_option("--scg-lambda0", cfg.scg_lambda0, "optimizer initial trust scale");
    sub->add_option("--scg-sigma", cfg.scg_sigma, "optimizer curvature probe step");
    sub->add_flag("--freeze-centers", cfg.freeze_centers, "do not train centers");
    sub->add_flag("--freeze-widths", cfg.freeze_widths, "do not train widths");
    sub->add_flag("--freeze-hedges", cfg.freeze_hedges, "do not train hedge exponents");
    sub->add_flag("--freeze-weights", cfg.freeze_weights, "do not train class weights");
}

void add_selection_options(CLI::App* sub, lhnfc::RunConfig& cfg) {
    sub->add_option("--aggregation", cfg.aggregation, "per-class hedge aggregation: max|mean");
    sub->add_option("--policy", cfg.policy, "feature selection policy: sum|product|top-m");
    sub->add_option("--tau", cfg.tau, "selection threshold");
    sub->add_option("--top-m", cfg.top_m, "top-m policy: number of features kept");
}

void add_model_input_options(CLI::App* sub, lhnfc::RunConfig& cfg) {
    sub->add_option("--model", cfg.model, "model artifact path");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hedged fuzzy rule classifier: training, feature selection, evaluation"};
    app.require_subcommand(1);
    lhnfc::RunConfig cfg;

    CLI::App* train = app.add_subcommand("train", "train on a stratified split, write model + reports");
    add_data_options(train, cfg);
    add_model_build_options(train, cfg);
    train->add_option("--split", cfg.split, "training fraction of the stratified split");
    train->add_option("--hedge-mode", cfg.hedge_mode, "hedge constraint: constrained01|nonneg");

    CLI::App* select = app.add_subcommand(
        "select", "train constrained, pick features from hedges, retrain on the survivors");
    add_data_options(select, cfg);
    add_model_build_options(select, cfg);
    add_selection_options(select, cfg);
    select->add_option("--split", cfg.split, "training fraction of the stratified split");

    CLI::App* cv = app.add_subcommand("cv", "stratified k-fold cross-validation over several seeds");
    add_data_options(cv, cfg);
    add_model_build_options(cv, cfg);
    add_selection_options(cv, cfg);
    cv->add_option("--folds", cfg.folds, "number of folds");
    cv->add_option("--seeds", cfg.seeds, "consecutive seeds to run, starting at --seed");
    cv->add_flag("--selection", cfg.selection, "run the feature-selection pipeline in each fold");
    cv->add_option("--hedge-mode", cfg.hedge_mode, "hedge constraint: constrained01|nonneg");

    CLI::App* evaluate = app.add_subcommand("evaluate", "score a saved model on a dataset");
    add_data_options(evaluate, cfg);
    add_model_input_options(evaluate, cfg);
    evaluate->add_option("--surface", cfg.surface,
                         "dump a response surface over two features, e.g. --surface 1,2");
    evaluate->add_option("--surface-steps", cfg.surface_steps, "grid resolution per axis");

    CLI::App* export_rules = app.add_subcommand("export-rules", "print a model as IF-THEN rules");
    add_data_options(export_rules, cfg);
    add_model_input_options(export_rules, cfg);

    CLI::App* grad_check = app.add_subcommand("grad-check",
                                              "compare analytic and numeric gradients at the initial point");
    add_data_options(grad_check, cfg);
    add_model_build_options(grad_check, cfg);
    grad_check->add_option("--gc-step", cfg.gc_step, "finite difference step");
    grad_check->add_option("--gc-tol", cfg.gc_tol, "maximum accepted relative deviation");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (app.got_subcommand(train)) {
            apply_config_file(train, cfg);
            return lhnfc::cmd_train(cfg);
        }
        if (app.got_subcommand(select)) {
            apply_config_file(select, cfg);
            return lhnfc::cmd_select(cfg);
        }
        if (app.got_subcommand(cv)) {
            apply_config_file(cv, cfg);
            return lhnfc::cmd_cv(cfg);
        }
        if (app.got_subcommand(evaluate)) {
            apply_config_file(evaluate, cfg);
            return lhnfc::cmd_evaluate(cfg);
        }
        if (app.got_subcommand(export_rules)) {
            apply_config_file(export_rules, cfg);
            return lhnfc::cmd_export_rules(cfg);
        }
        if (app.got_subcommand(grad_check)) {
            apply_config_file(grad_check, cfg);
            return lhnfc::cmd_grad_check(cfg);
        }
    } catch (const lhnfc::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    std::cerr << "error: no subcommand\n";
    return 2;
}
