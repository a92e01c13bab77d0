#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lhnfc/dataset.hpp"
#include "lhnfc/network.hpp"
#include "lhnfc/run_config.hpp"

namespace lhnfc {

// Self-describing model file: the configuration that produced it, the fitted
// normalizer, the feature names, and the rulebase. Plain text, no
// timestamps — identical runs write identical bytes.
struct ModelArtifact {
    std::vector<std::pair<std::string, std::string>> config;
    NormParams norm;
    std::vector<std::string> feature_names;
    RuleBase rb;
};

std::string model_to_text(const ModelArtifact& m);
ModelArtifact model_from_text(std::string_view text);
void save_model(const ModelArtifact& m, const std::string& path);
ModelArtifact load_model(const std::string& path);

// Subcommand bodies. Each validates its config, runs, writes artifacts under
// cfg.out, prints a short summary to stdout, and returns 0. ConfigError
// signals a usage problem (exit 2); any other exception is a runtime
// failure (exit 1). Mapping happens in the executable's main().
int cmd_train(const RunConfig& cfg);
int cmd_select(const RunConfig& cfg);
int cmd_cv(const RunConfig& cfg);
int cmd_evaluate(const RunConfig& cfg);
int cmd_export_rules(const RunConfig& cfg);
int cmd_grad_check(const RunConfig& cfg);

}  // namespace lhnfc
