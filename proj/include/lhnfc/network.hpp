#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lhnfc/matrix.hpp"

namespace lhnfc {

// Width floor in normalized feature units; keeps the Gaussian exponent finite.
inline constexpr double kSigmaMin = 1e-3;
// Floor on the layer-5 normalizer; below it the sample gets a uniform score.
inline constexpr double kDeltaFloor = 1e-12;

// Full parameter set of a hedged fuzzy rule network: per-rule per-feature
// Gaussian centers/widths, hedge exponents, and per-rule class weights.
// Inactive features (feature_mask 0) keep placeholder parameters and a hedge
// of 0 so they contribute nothing to any rule.
struct RuleBase {
    int rule_count = 0;     // U
    int feature_count = 0;  // D
    int class_count = 0;    // K
    std::vector<uint8_t> feature_mask;    // D entries, 1 = active
    std::vector<double> centers;          // U×D
    std::vector<double> widths;           // U×D, >= kSigmaMin
    std::vector<double> hedges;           // U×D, >= 0 (<= 1 in constrained mode)
    std::vector<double> class_weights;    // U×K, >= 0
    std::vector<int> rule_class;          // U entries, 1..K from initialization, 0 unknown

    double center(int i, int j) const { return centers[static_cast<size_t>(i) * feature_count + j]; }
    double width(int i, int j) const { return widths[static_cast<size_t>(i) * feature_count + j]; }
    double hedge(int i, int j) const { return hedges[static_cast<size_t>(i) * feature_count + j]; }
    double weight(int i, int k) const { return class_weights[static_cast<size_t>(i) * class_count + k]; }
    double& center(int i, int j) { return centers[static_cast<size_t>(i) * feature_count + j]; }
    double& width(int i, int j) { return widths[static_cast<size_t>(i) * feature_count + j]; }
    double& hedge(int i, int j) { return hedges[static_cast<size_t>(i) * feature_count + j]; }
    double& weight(int i, int k) { return class_weights[static_cast<size_t>(i) * class_count + k]; }

    std::vector<int> active_features() const;
    int active_feature_count() const;

    // Throws std::runtime_error on any structural or bound violation.
    void validate() const;
};

// Builds an empty-but-consistent rulebase with identity hedges, unit widths,
// zero centers, and uniform small weights.
RuleBase make_rulebase(int rules, int features, int classes);

// Per-sample layer outputs retained for gradients and diagnostics.
// mu/log_mu/alpha are 1/0/1 on inactive features.
struct ForwardTrace {
    int sample_count = 0;
    int rule_count = 0;
    int feature_count = 0;
    int class_count = 0;
    std::vector<double> mu;          // S×U×D, layer-1 membership grades
    std::vector<double> log_mu;      // S×U×D
    std::vector<double> alpha;       // S×U×D, hedged grades
    std::vector<double> beta;        // S×U, rule firing strengths
    std::vector<double> weighted;    // S×K, weighted class outputs
    std::vector<double> normalized;  // S×K, rows sum to 1
    std::vector<int> predicted;      // S, class ids 1..K
    int dead_sample_count = 0;       // normalizer hit the floor, uniform fallback
    int width_clamp_count = 0;       // widths below kSigmaMin clamped

    double mu_at(int s, int i, int j) const {
        return mu[(static_cast<size_t>(s) * rule_count + i) * feature_count + j];
    }
    double log_mu_at(int s, int i, int j) const {
        return log_mu[(static_cast<size_t>(s) * rule_count + i) * feature_count + j];
    }
    double alpha_at(int s, int i, int j) const {
        return alpha[(static_cast<size_t>(s) * rule_count + i) * feature_count + j];
    }
    double beta_at(int s, int i) const { return beta[static_cast<size_t>(s) * rule_count + i]; }
    double weighted_at(int s, int k) const { return weighted[static_cast<size_t>(s) * class_count + k]; }
    double normalized_at(int s, int k) const { return normalized[static_cast<size_t>(s) * class_count + k]; }
};

// Gaussian membership exp(-0.5 ((x-c)/sigma)^2); widths below the floor are
// clamped to kSigmaMin.
double membership(double x, double c, double sigma);

// mu^p. p > 1 concentrates (result <= mu), p < 1 dilates; mu=0 with p=0
// yields 1 by the usual limit convention.
double hedge_apply(double mu, double p);

// Full five-layer pass over X (columns must match rb.feature_count; only
// active columns are read). Memberships are combined in log space so long
// products of small grades cannot underflow before the final exponential.
ForwardTrace forward(const RuleBase& rb, ConstMatrixView X);

// Lossless versioned plain-text serialization.
std::string rulebase_to_text(const RuleBase& rb);
RuleBase rulebase_from_text(std::string_view text);
void save_rulebase(const RuleBase& rb, const std::string& path);
RuleBase load_rulebase(const std::string& path);

// IF/THEN rendering of every rule, one block per rule. Names are optional
// display metadata; defaults are "feature j" / "class k".
std::string format_rules(const RuleBase& rb,
                         const std::vector<std::string>& feature_names = {},
                         const std::vector<std::string>& class_names = {});

}  // namespace lhnfc
