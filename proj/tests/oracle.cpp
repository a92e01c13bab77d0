#include "oracle.hpp"

#include <cmath>

namespace oracle {

Outputs forward_sample(const lhnfc::RuleBase& rb, const std::vector<double>& x) {
    const int U = rb.rule_count, D = rb.feature_count, K = rb.class_count;
    Outputs out;
    out.mu.assign(static_cast<size_t>(U) * D, 1.0);
    out.alpha.assign(static_cast<size_t>(U) * D, 1.0);
    out.beta.assign(U, 1.0);
    out.weighted.assign(K, 0.0);
    out.normalized.assign(K, 0.0);

    for (int i = 0; i < U; ++i) {
        for (int j = 0; j < D; ++j) {
            if (!rb.feature_mask[j]) continue;
            double sigma = rb.width(i, j);
            if (sigma < lhnfc::kSigmaMin) sigma = lhnfc::kSigmaMin;
            const double z = (x[j] - rb.center(i, j)) / sigma;
            const double mu = std::exp(-0.5 * z * z);
            const double alpha = std::pow(mu, rb.hedge(i, j));
            out.mu[static_cast<size_t>(i) * D + j] = mu;
            out.alpha[static_cast<size_t>(i) * D + j] = alpha;
            out.beta[i] *= alpha;
        }
    }
    for (int k = 0; k < K; ++k) {
        for (int i = 0; i < U; ++i) out.weighted[k] += out.beta[i] * rb.weight(i, k);
    }
    double delta = 0.0;
    for (int k = 0; k < K; ++k) delta += out.weighted[k];
    if (delta <= lhnfc::kDeltaFloor) {
        for (int k = 0; k < K; ++k) out.normalized[k] = 1.0 / K;
    } else {
        for (int k = 0; k < K; ++k) out.normalized[k] = out.weighted[k] / delta;
    }
    out.predicted = 1;
    for (int k = 1; k < K; ++k) {
        if (out.normalized[k] > out.normalized[out.predicted - 1]) out.predicted = k + 1;
    }
    return out;
}

double cost(const lhnfc::RuleBase& rb, const std::vector<double>& xs,
            const std::vector<int>& labels) {
    const int D = rb.feature_count, K = rb.class_count;
    const int N = static_cast<int>(labels.size());
    double total = 0.0;
    for (int s = 0; s < N; ++s) {
        std::vector<double> x(xs.begin() + static_cast<size_t>(s) * D,
                              xs.begin() + static_cast<size_t>(s + 1) * D);
        Outputs o = forward_sample(rb, x);
        for (int k = 0; k < K; ++k) {
            const double t = (labels[s] == k + 1) ? 1.0 : 0.0;
            const double e = t - o.normalized[k];
            total += 0.5 * e * e;
        }
    }
    return total / N;
}

}  // namespace oracle
