#include "lhnfc/network.hpp"

#include <cmath>
#include <stdexcept>

namespace lhnfc {

std::vector<int> RuleBase::active_features() const {
    std::vector<int> out;
    for (int j = 0; j < feature_count; ++j) {
        if (feature_mask[j]) out.push_back(j);
    }
    return out;
}

int RuleBase::active_feature_count() const {
    int n = 0;
    for (uint8_t m : feature_mask) n += (m != 0);
    return n;
}

void RuleBase::validate() const {
    auto fail = [](const std::string& msg) { throw std::runtime_error("invalid rulebase: " + msg); };
    if (rule_count < 1) fail("no rules");
    if (feature_count < 1) fail("no features");
    if (class_count < 2) fail("need at least 2 classes");
    const size_t ud = static_cast<size_t>(rule_count) * feature_count;
    const size_t uk = static_cast<size_t>(rule_count) * class_count;
    if (feature_mask.size() != static_cast<size_t>(feature_count)) fail("feature_mask size");
    if (centers.size() != ud || widths.size() != ud || hedges.size() != ud) fail("parameter block size");
    if (class_weights.size() != uk) fail("weight block size");
    if (rule_class.size() != static_cast<size_t>(rule_count)) fail("rule_class size");
    if (active_feature_count() == 0) fail("no active features");
    for (int i = 0; i < rule_count; ++i) {
        for (int j = 0; j < feature_count; ++j) {
            if (!feature_mask[j]) continue;
            if (!(width(i, j) >= kSigmaMin)) fail("width below floor");
            if (!(hedge(i, j) >= 0.0)) fail("negative hedge");
            if (!std::isfinite(center(i, j))) fail("non-finite center");
        }
        for (int k = 0; k < class_count; ++k) {
            if (!(weight(i, k) >= 0.0)) fail("negative class weight");
        }
        if (rule_class[i] < 0 || rule_class[i] > class_count) fail("rule class hint out of range");
    }
}

RuleBase make_rulebase(int rules, int features, int classes) {
    RuleBase rb;
    rb.rule_count = rules;
    rb.feature_count = features;
    rb.class_count = classes;
    rb.feature_mask.assign(features, 1);
    rb.centers.assign(static_cast<size_t>(rules) * features, 0.0);
    rb.widths.assign(static_cast<size_t>(rules) * features, 1.0);
    rb.hedges.assign(static_cast<size_t>(rules) * features, 1.0);
    rb.class_weights.assign(static_cast<size_t>(rules) * classes, 1.0);
    rb.rule_class.assign(rules, 0);
    return rb;
}

double membership(double x, double c, double sigma) {
    if (sigma < kSigmaMin) sigma = kSigmaMin;
    const double z = (x - c) / sigma;
    return std::exp(-0.5 * z * z);
}

double hedge_apply(double mu, double p) {
    return std::pow(mu, p);   // pow(0, 0) == 1 per IEEE, the convention used here
}

ForwardTrace forward(const RuleBase& rb, ConstMatrixView X) {
    if (X.cols != rb.feature_count) {
        throw std::runtime_error("forward: input has " + std::to_string(X.cols) +
                                 " columns, rulebase expects " + std::to_string(rb.feature_count));
    }
    const int S = X.rows, U = rb.rule_count, D = rb.feature_count, K = rb.class_count;

    ForwardTrace tr;
    tr.sample_count = S;
    tr.rule_count = U;
    tr.feature_count = D;
    tr.class_count = K;
    tr.mu.assign(static_cast<size_t>(S) * U * D, 1.0);
    tr.log_mu.assign(static_cast<size_t>(S) * U * D, 0.0);
    tr.alpha.assign(static_cast<size_t>(S) * U * D, 1.0);
    tr.beta.assign(static_cast<size_t>(S) * U, 1.0);
    tr.weighted.assign(static_cast<size_t>(S) * K, 0.0);
    tr.normalized.assign(static_cast<size_t>(S) * K, 0.0);
    tr.predicted.assign(S, 1);

    const auto active = rb.active_features();

    for (int s = 0; s < S; ++s) {
        const double* x = X.row(s);
        for (int i = 0; i < U; ++i) {
            const size_t base = (static_cast<size_t>(s) * U + i) * D;
            double log_beta = 0.0;
            for (int j : active) {
                double sigma = rb.width(i, j);
                if (sigma < kSigmaMin) {
                    sigma = kSigmaMin;
                    tr.width_clamp_count++;
                }
                const double z = (x[j] - rb.center(i, j)) / sigma;
                const double lm = -0.5 * z * z;
                tr.log_mu[base + j] = lm;
                tr.mu[base + j] = std::exp(lm);
                const double la = rb.hedge(i, j) * lm;
                tr.alpha[base + j] = std::exp(la);
                log_beta += la;
            }
            tr.beta[static_cast<size_t>(s) * U + i] = std::exp(log_beta);
        }

        double delta = 0.0;
        for (int k = 0; k < K; ++k) {
            double o = 0.0;
            for (int i = 0; i < U; ++i) {
                o += tr.beta[static_cast<size_t>(s) * U + i] * rb.weight(i, k);
            }
            tr.weighted[static_cast<size_t>(s) * K + k] = o;
            delta += o;
        }

        if (delta < kDeltaFloor) {
            tr.dead_sample_count++;
            for (int k = 0; k < K; ++k) {
                tr.normalized[static_cast<size_t>(s) * K + k] = 1.0 / K;
            }
        } else {
            for (int k = 0; k < K; ++k) {
                tr.normalized[static_cast<size_t>(s) * K + k] =
                    tr.weighted[static_cast<size_t>(s) * K + k] / delta;
            }
        }

        int best = 0;
        for (int k = 1; k < K; ++k) {
            if (tr.normalized[static_cast<size_t>(s) * K + k] >
                tr.normalized[static_cast<size_t>(s) * K + best]) {
                best = k;   // strict '>' keeps the lowest class id on ties
            }
        }
        tr.predicted[s] = best + 1;
    }
    return tr;
}

}  // namespace lhnfc
