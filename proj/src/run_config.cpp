#include "lhnfc/run_config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "lhnfc/rng.hpp"
#include "lhnfc/text.hpp"

namespace lhnfc {

namespace {

std::string bool_str(bool b) { return b ? "true" : "false"; }

}  // namespace

std::vector<std::pair<std::string, std::string>> RunConfig::echo_pairs() const {
    std::vector<std::pair<std::string, std::string>> kv = {
        {"aggregation", aggregation},
        {"clusters", std::to_string(clusters)},
        {"config", config},
        {"data", data},
        {"folds", std::to_string(folds)},
        {"freeze-centers", bool_str(freeze_centers)},
        {"freeze-hedges", bool_str(freeze_hedges)},
        {"freeze-weights", bool_str(freeze_weights)},
        {"freeze-widths", bool_str(freeze_widths)},
        {"gc-step", format_double(gc_step)},
        {"gc-tol", format_double(gc_tol)},
        {"hedge-mode", hedge_mode},
        {"kmeans-iters", std::to_string(kmeans_iters)},
        {"kmeans-plus-plus", bool_str(kmeans_plus_plus)},
        {"kmeans-restarts", std::to_string(kmeans_restarts)},
        {"label-last", bool_str(label_last)},
        {"model", model},
        {"norm", norm},
        {"out", out},
        {"policy", policy},
        {"scg-grad-tol", format_double(scg_grad_tol)},
        {"scg-iters", std::to_string(scg_iters)},
        {"scg-lambda0", format_double(scg_lambda0)},
        {"scg-obj-tol", format_double(scg_obj_tol)},
        {"scg-sigma", format_double(scg_sigma)},
        {"seed", std::to_string(seed)},
        {"seeds", std::to_string(seeds)},
        {"selection", bool_str(selection)},
        {"split", format_double(split)},
        {"surface", surface},
        {"surface-steps", std::to_string(surface_steps)},
        {"tau", format_double(tau)},
        {"top-m", std::to_string(top_m)},
        {"width-rule", width_rule},
    };
    return kv;
}

std::string RunConfig::echo() const {
    std::string s;
    for (const auto& [k, v] : echo_pairs()) s += k + "=" + v + "\n";
    return s;
}

void RunConfig::validate() const {
    auto fail = [](const std::string& msg) { throw ConfigError("config: " + msg); };
    if (norm != "none" && norm != "minmax" && norm != "zscore")
        fail("norm must be none, minmax, or zscore (got '" + norm + "')");
    if (!(split > 0.0 && split < 1.0)) fail("split must lie strictly between 0 and 1");
    if (folds < 2) fail("folds must be at least 2");
    if (seeds < 1) fail("seeds must be at least 1");
    if (clusters < 1) fail("clusters must be at least 1");
    if (kmeans_restarts < 1) fail("kmeans-restarts must be at least 1");
    if (kmeans_iters < 1) fail("kmeans-iters must be at least 1");
    if (width_rule != "std" && width_rule != "nearest")
        fail("width-rule must be std or nearest (got '" + width_rule + "')");
    if (hedge_mode != "constrained01" && hedge_mode != "nonneg")
        fail("hedge-mode must be constrained01 or nonneg (got '" + hedge_mode + "')");
    if (freeze_centers && freeze_widths && freeze_hedges && freeze_weights)
        fail("every parameter block is frozen; nothing to train");
    if (scg_iters < 0) fail("scg-iters must be nonnegative");
    if (!(scg_grad_tol >= 0.0)) fail("scg-grad-tol must be nonnegative");
    if (!(scg_obj_tol >= 0.0)) fail("scg-obj-tol must be nonnegative");
    if (!(scg_lambda0 > 0.0)) fail("scg-lambda0 must be positive");
    if (!(scg_sigma > 0.0)) fail("scg-sigma must be positive");
    if (aggregation != "max" && aggregation != "mean")
        fail("aggregation must be max or mean (got '" + aggregation + "')");
    if (policy != "sum" && policy != "product" && policy != "top-m")
        fail("policy must be sum, product, or top-m (got '" + policy + "')");
    if (!(tau >= 0.0)) fail("tau must be nonnegative");
    if (policy == "top-m" && top_m < 1) fail("top-m policy needs --top-m >= 1");
    if (surface_steps < 2) fail("surface-steps must be at least 2");
    if (!(gc_step > 0.0)) fail("gc-step must be positive");
    if (!(gc_tol > 0.0)) fail("gc-tol must be positive");
    if (!surface.empty()) {
        auto parts = lhnfc::split(surface, ',');
        long a = 0, b = 0;
        if (parts.size() != 2 || !parse_long(trim(parts[0]), a) || !parse_long(trim(parts[1]), b))
            fail("surface expects two comma-separated feature numbers");
        if (a < 1 || b < 1 || a == b) fail("surface features must be distinct and >= 1");
    }
}

std::vector<std::pair<std::string, std::string>> read_config_pairs(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(path + ": cannot open config file");
    std::ostringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();

    std::vector<std::pair<std::string, std::string>> pairs;
    int line_no = 0;
    for (std::string_view line : split(text, '\n')) {
        ++line_no;
        std::string_view body = trim(line);
        if (body.empty() || body.front() == '#') continue;
        size_t eq = body.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError(path + ": expected key=value on line " + std::to_string(line_no) +
                              ", got '" + std::string(body) + "'");
        }
        pairs.emplace_back(std::string(trim(body.substr(0, eq))),
                           std::string(trim(body.substr(eq + 1))));
    }
    return pairs;
}

namespace {

bool parse_bool(const std::string& v, bool& out) {
    if (v == "true" || v == "1") out = true;
    else if (v == "false" || v == "0") out = false;
    else return false;
    return true;
}

}  // namespace

void assign_config_value(RunConfig& cfg, const std::string& key, const std::string& value) {
    auto fail = [&] {
        throw ConfigError("config file: bad value '" + value + "' for key '" + key + "'");
    };
    auto as_int = [&](int& field) {
        long v = 0;
        if (!parse_long(value, v)) fail();
        field = static_cast<int>(v);
    };
    auto as_double = [&](double& field) {
        if (!parse_double(value, field)) fail();
    };
    auto as_bool = [&](bool& field) {
        if (!parse_bool(value, field)) fail();
    };

    if (key == "config") return;   // echoed blocks carry the file's own path
    if (key == "data") cfg.data = value;
    else if (key == "label-last") as_bool(cfg.label_last);
    else if (key == "norm") cfg.norm = value;
    else if (key == "split") as_double(cfg.split);
    else if (key == "folds") as_int(cfg.folds);
    else if (key == "seeds") as_int(cfg.seeds);
    else if (key == "clusters") as_int(cfg.clusters);
    else if (key == "kmeans-restarts") as_int(cfg.kmeans_restarts);
    else if (key == "kmeans-iters") as_int(cfg.kmeans_iters);
    else if (key == "kmeans-plus-plus") as_bool(cfg.kmeans_plus_plus);
    else if (key == "width-rule") cfg.width_rule = value;
    else if (key == "hedge-mode") cfg.hedge_mode = value;
    else if (key == "freeze-centers") as_bool(cfg.freeze_centers);
    else if (key == "freeze-widths") as_bool(cfg.freeze_widths);
    else if (key == "freeze-hedges") as_bool(cfg.freeze_hedges);
    else if (key == "freeze-weights") as_bool(cfg.freeze_weights);
    else if (key == "scg-iters") as_int(cfg.scg_iters);
    else if (key == "scg-grad-tol") as_double(cfg.scg_grad_tol);
    else if (key == "scg-obj-tol") as_double(cfg.scg_obj_tol);
    else if (key == "scg-lambda0") as_double(cfg.scg_lambda0);
    else if (key == "scg-sigma") as_double(cfg.scg_sigma);
    else if (key == "aggregation") cfg.aggregation = value;
    else if (key == "policy") cfg.policy = value;
    else if (key == "tau") as_double(cfg.tau);
    else if (key == "top-m") as_int(cfg.top_m);
    else if (key == "selection") as_bool(cfg.selection);
    else if (key == "seed") {
        long v = 0;
        if (!parse_long(value, v) || v < 0) fail();
        cfg.seed = static_cast<uint64_t>(v);
    } else if (key == "out") cfg.out = value;
    else if (key == "model") cfg.model = value;
    else if (key == "surface") cfg.surface = value;
    else if (key == "surface-steps") as_int(cfg.surface_steps);
    else if (key == "gc-step") as_double(cfg.gc_step);
    else if (key == "gc-tol") as_double(cfg.gc_tol);
    else throw ConfigError("config file: unknown key '" + key + "'");
}

std::string artifact_header(const RunConfig& cfg) {
    std::string s = "# run configuration\n";
    for (const auto& [k, v] : cfg.echo_pairs()) s += "# " + k + "=" + v + "\n";
    return s;
}

ExperimentConfig make_experiment_config(const RunConfig& cfg) {
    ExperimentConfig ec;
    ec.norm = norm_mode_from_string(cfg.norm);
    ec.init.clusters_per_class = cfg.clusters;
    ec.init.kmeans.max_iter = cfg.kmeans_iters;
    ec.init.kmeans.restarts = cfg.kmeans_restarts;
    ec.init.kmeans.plus_plus = cfg.kmeans_plus_plus;
    ec.init.width_rule = cfg.width_rule == "nearest" ? WidthRule::nearest_center_half
                                                     : WidthRule::cluster_std;
    ec.init.seed = derive_seed(cfg.seed, "init");
    ec.train.hedge_mode = hedge_mode_from_string(cfg.hedge_mode);
    ec.train.trainable.centers = !cfg.freeze_centers;
    ec.train.trainable.widths = !cfg.freeze_widths;
    ec.train.trainable.hedges = !cfg.freeze_hedges;
    ec.train.trainable.weights = !cfg.freeze_weights;
    ec.train.scg.max_iter = cfg.scg_iters;
    ec.train.scg.grad_tol = cfg.scg_grad_tol;
    ec.train.scg.obj_tol = cfg.scg_obj_tol;
    ec.train.scg.initial_lambda = cfg.scg_lambda0;
    ec.train.scg.sigma_step = cfg.scg_sigma;
    ec.selection.aggregation = hedge_aggregation_from_string(cfg.aggregation);
    ec.selection.policy = selection_policy_from_string(cfg.policy);
    ec.selection.tau = cfg.tau;
    ec.selection.top_m = cfg.top_m;
    ec.with_selection = cfg.selection;
    return ec;
}

}  // namespace lhnfc
