#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lhnfc/matrix.hpp"

namespace lhnfc {

enum class NormMode { none, minmax, zscore };

std::string to_string(NormMode mode);
NormMode norm_mode_from_string(std::string_view s);

// Per-feature scaling fitted on training data and re-applied verbatim to
// test data (test values may land outside [0,1] in minmax mode).
struct NormParams {
    NormMode mode = NormMode::none;
    std::vector<double> shift;         // column min (minmax) or mean (zscore)
    std::vector<double> scale;         // column range (minmax) or std (zscore)
    std::vector<uint8_t> degenerate;   // constant columns, mapped to a fixed value

    double apply(double x, int column) const;
};

// Immutable after construction; safe to share across threads.
struct Dataset {
    std::vector<double> features;   // row-major N×D
    std::vector<int> labels;        // class ids in 1..K
    int class_count = 0;            // K
    std::vector<std::string> feature_names;
    std::vector<uint8_t> degenerate_columns;   // constant at ingestion
    std::optional<NormParams> norm;            // set once normalization was applied

    int sample_count() const { return static_cast<int>(labels.size()); }
    int feature_count() const { return static_cast<int>(feature_names.size()); }
    double at(int s, int j) const { return features[static_cast<size_t>(s) * feature_count() + j]; }
    ConstMatrixView view() const { return {features.data(), sample_count(), feature_count()}; }
    std::vector<int> class_sizes() const;
};

struct CsvSchema {
    bool label_first = true;   // UCI-style: label column leads each row
};

// Plain comma-separated file, one label column plus D numeric columns per
// row. A non-numeric first row is taken as a header and supplies feature
// names. Throws std::runtime_error naming the offending line on malformed
// input; class ids must cover 1..K with no gaps.
Dataset load_csv(const std::string& path, const CsvSchema& schema = {});

NormParams fit_normalizer(const Dataset& ds, NormMode mode);
Dataset apply_normalizer(const Dataset& ds, const NormParams& params);
std::pair<Dataset, NormParams> normalize(const Dataset& ds, NormMode mode);

// Train/test split or k-fold assignment over sample indices.
struct SplitPlan {
    std::vector<int> train_indices;
    std::vector<int> test_indices;
    std::vector<int> fold_of;   // k-fold mode: fold id per sample, 0..fold_count-1
    int fold_count = 0;

    std::vector<int> fold_valid(int fold) const;
    std::vector<int> fold_train(int fold) const;
};

// Largest-remainder allocation per class keeps per-class train counts within
// one sample of train_fraction * class size.
SplitPlan stratified_split(const Dataset& ds, double train_fraction, uint64_t seed);

// Stratified folds; every sample lands in exactly one fold and global fold
// sizes differ by at most one. Errors when k exceeds the smallest class.
SplitPlan kfold(const Dataset& ds, int k, uint64_t seed);

Dataset subset(const Dataset& ds, const std::vector<int>& rows);

// Dataset dump (CSV) plus sidecar key=value metadata; reloading the CSV
// reproduces the feature values bit-for-bit.
void write_csv(const Dataset& ds, const std::string& path, const CsvSchema& schema = {});
void write_sidecar(const std::string& path, const NormParams& params, uint64_t seed,
                   const SplitPlan& plan,
                   const std::vector<std::pair<std::string, std::string>>& extra = {});

}  // namespace lhnfc
