#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lhnfc/eval.hpp"

namespace lhnfc {

// Bad flags, unresolvable paths, or unloadable input data. The command line
// front end maps this to exit code 2; everything else that throws is a
// runtime failure (exit 1).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One experiment run as configured from flags / a key=value config file.
// Enum-like fields stay strings here so the echo, the config file keys, and
// the flag names all coincide; they are parsed (and rejected with a clear
// message) by validate().
struct RunConfig {
    std::string config;                // key=value config file applied under explicit flags
    std::string data;                  // dataset CSV path
    bool label_last = false;           // label column trails instead of leading
    std::string norm = "minmax";       // none|minmax|zscore
    double split = 0.6;                // train fraction for the 60-40 protocol
    int folds = 4;                     // cross-validation folds
    int seeds = 1;                     // cross-validation: consecutive seeds starting at `seed`
    int clusters = 1;                  // rules per class
    int kmeans_restarts = 10;
    int kmeans_iters = 100;
    bool kmeans_plus_plus = false;
    std::string width_rule = "std";    // std|nearest
    std::string hedge_mode = "constrained01";   // constrained01|nonneg
    bool freeze_centers = false;
    bool freeze_widths = false;
    bool freeze_hedges = false;
    bool freeze_weights = false;
    int scg_iters = 500;
    double scg_grad_tol = 1e-6;
    double scg_obj_tol = 1e-10;
    double scg_lambda0 = 1e-6;
    double scg_sigma = 1e-4;
    std::string aggregation = "max";   // max|mean
    std::string policy = "sum";        // sum|product|top-m
    double tau = 0.5;
    int top_m = 0;
    bool selection = false;            // cv: run the feature-selection pipeline per fold
    uint64_t seed = 1;
    std::string out = "out";           // artifact directory
    std::string model;                 // evaluate/export-rules: model artifact path
    std::string surface;               // evaluate: "j1,j2" (1-based) response-surface dump
    int surface_steps = 41;
    double gc_step = 1e-5;             // grad-check probe
    double gc_tol = 1e-4;

    // Sorted key=value lines covering every field; embedded in artifacts and
    // accepted back via --config.
    std::vector<std::pair<std::string, std::string>> echo_pairs() const;
    std::string echo() const;

    // Throws ConfigError on out-of-range values or unknown enum spellings.
    void validate() const;
};

// Flat key=value lines: '#' comments and blank lines are skipped, keys match
// the flag names without their leading dashes. Throws ConfigError on an
// unreadable file or a line without '='.
std::vector<std::pair<std::string, std::string>> read_config_pairs(const std::string& path);

// Writes one config-file pair onto its RunConfig field. Unknown keys and
// malformed values throw ConfigError; the "config" key is accepted and
// ignored so an echoed artifact block can be fed back verbatim.
void assign_config_value(RunConfig& cfg, const std::string& key, const std::string& value);

// '#'-prefixed echo block placed at the top of report artifacts.
std::string artifact_header(const RunConfig& cfg);

// Translates the string-typed knobs into the library's config structs.
// validate() must have passed.
ExperimentConfig make_experiment_config(const RunConfig& cfg);

}  // namespace lhnfc
