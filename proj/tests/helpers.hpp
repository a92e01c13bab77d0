#pragma once

// Shared scaffolding for the test suite: scratch directories, tiny file IO,
// and generators for random rulebases and toy datasets.

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "lhnfc/dataset.hpp"
#include "lhnfc/network.hpp"
#include "lhnfc/rng.hpp"

namespace testutil {

// Fresh empty directory under the system temp root, unique per call.
inline std::filesystem::path scratch_dir(const std::string& hint) {
    static std::atomic<int> counter{0};
    auto dir = std::filesystem::temp_directory_path() /
               ("lhnfc-test-" + hint + "-" + std::to_string(counter++));
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Random but always-valid rulebase; hedges land in (0,1) when constrained,
// up to 2 otherwise. rule_class cycles 1..K so selection code can use it.
inline lhnfc::RuleBase random_rulebase(lhnfc::Rng& rng, int rules, int features, int classes,
                                       bool constrained_hedges = true) {
    lhnfc::RuleBase rb = lhnfc::make_rulebase(rules, features, classes);
    for (int i = 0; i < rules; ++i) {
        for (int j = 0; j < features; ++j) {
            rb.center(i, j) = rng.uniform(-0.2, 1.2);
            rb.width(i, j) = rng.uniform(0.05, 0.6);
            rb.hedge(i, j) = constrained_hedges ? rng.uniform(0.05, 0.95) : rng.uniform(0.05, 2.0);
        }
        for (int k = 0; k < classes; ++k) rb.weight(i, k) = rng.uniform(0.05, 1.5);
        rb.rule_class[i] = 1 + i % classes;
    }
    return rb;
}

inline std::vector<double> random_samples(lhnfc::Rng& rng, int n, int d) {
    std::vector<double> xs(static_cast<size_t>(n) * d);
    for (double& v : xs) v = rng.uniform(-0.1, 1.1);
    return xs;
}

inline std::vector<int> random_labels(lhnfc::Rng& rng, int n, int classes) {
    std::vector<int> labels(n);
    for (int& l : labels) l = 1 + static_cast<int>(rng.below(classes));
    return labels;
}

// Gaussian blob per class around the given centers; every class gets `per_class`
// samples. Values stay roughly in [0,1] for centers inside the unit box.
inline lhnfc::Dataset blob_dataset(lhnfc::Rng& rng, const std::vector<std::vector<double>>& centers,
                                   int per_class, double sd) {
    lhnfc::Dataset ds;
    const int k = static_cast<int>(centers.size());
    const int d = static_cast<int>(centers[0].size());
    ds.class_count = k;
    for (int j = 0; j < d; ++j) ds.feature_names.push_back("f" + std::to_string(j + 1));
    ds.degenerate_columns.assign(d, 0);
    for (int c = 0; c < k; ++c) {
        for (int s = 0; s < per_class; ++s) {
            for (int j = 0; j < d; ++j) ds.features.push_back(rng.normal(centers[c][j], sd));
            ds.labels.push_back(c + 1);
        }
    }
    return ds;
}

inline bool close(double a, double b, double tol) { return std::fabs(a - b) <= tol; }

}  // namespace testutil
