#include "lhnfc/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "lhnfc/rng.hpp"
#include "lhnfc/text.hpp"

namespace lhnfc {

std::string to_string(NormMode mode) {
    switch (mode) {
        case NormMode::none: return "none";
        case NormMode::minmax: return "minmax";
        case NormMode::zscore: return "zscore";
    }
    return "none";
}

NormMode norm_mode_from_string(std::string_view s) {
    if (s == "none") return NormMode::none;
    if (s == "minmax") return NormMode::minmax;
    if (s == "zscore") return NormMode::zscore;
    throw std::runtime_error("unknown normalization mode: " + std::string(s));
}

double NormParams::apply(double x, int column) const {
    if (mode == NormMode::none) return x;
    if (degenerate[column]) return mode == NormMode::minmax ? 0.5 : 0.0;
    return (x - shift[column]) / scale[column];
}

std::vector<int> Dataset::class_sizes() const {
    std::vector<int> counts(class_count, 0);
    for (int label : labels) counts[label - 1]++;
    return counts;
}

namespace {

bool row_is_numeric(const std::vector<std::string_view>& fields) {
    double v;
    for (auto f : fields) {
        if (!parse_double(f, v)) return false;
    }
    return true;
}

}  // namespace

Dataset load_csv(const std::string& path, const CsvSchema& schema) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);

    Dataset ds;
    std::string line;
    int line_no = 0;
    int column_count = -1;   // label + D
    bool saw_header = false;

    while (std::getline(in, line)) {
        line_no++;
        std::string_view sv = trim(line);
        if (sv.empty()) continue;
        auto fields = split(sv, ',');
        for (auto& f : fields) f = trim(f);

        if (column_count < 0) {
            column_count = static_cast<int>(fields.size());
            if (column_count < 2) {
                throw std::runtime_error(path + ": line " + std::to_string(line_no) +
                                         ": need at least one label and one feature column");
            }
            if (!row_is_numeric(fields)) {
                saw_header = true;
                const int label_col = schema.label_first ? 0 : column_count - 1;
                for (int c = 0; c < column_count; ++c) {
                    if (c != label_col) ds.feature_names.emplace_back(fields[c]);
                }
                continue;
            }
            for (int c = 0; c < column_count - 1; ++c) {
                ds.feature_names.push_back("feature" + std::to_string(c + 1));
            }
        }

        if (static_cast<int>(fields.size()) != column_count) {
            throw std::runtime_error(path + ": line " + std::to_string(line_no) + ": expected " +
                                     std::to_string(column_count) + " fields, got " +
                                     std::to_string(fields.size()));
        }

        const int label_col = schema.label_first ? 0 : column_count - 1;
        long label;
        if (!parse_long(fields[label_col], label) || label < 1) {
            throw std::runtime_error(path + ": line " + std::to_string(line_no) +
                                     ": label must be a positive integer, got '" +
                                     std::string(fields[label_col]) + "'");
        }
        for (int c = 0; c < column_count; ++c) {
            if (c == label_col) continue;
            double v;
            if (!parse_double(fields[c], v) || !std::isfinite(v)) {
                throw std::runtime_error(path + ": line " + std::to_string(line_no) +
                                         ": non-numeric field '" + std::string(fields[c]) + "'");
            }
            ds.features.push_back(v);
        }
        ds.labels.push_back(static_cast<int>(label));
    }
    (void)saw_header;

    if (ds.labels.empty()) throw std::runtime_error(path + ": no rows");

    ds.class_count = *std::max_element(ds.labels.begin(), ds.labels.end());
    if (ds.class_count < 2) throw std::runtime_error(path + ": need at least 2 classes");
    auto counts = ds.class_sizes();
    for (int k = 0; k < ds.class_count; ++k) {
        if (counts[k] == 0) {
            throw std::runtime_error(path + ": class " + std::to_string(k + 1) +
                                     " has no samples (labels must cover 1..K)");
        }
    }

    const int d = ds.feature_count();
    ds.degenerate_columns.assign(d, 0);
    for (int j = 0; j < d; ++j) {
        double lo = ds.at(0, j), hi = lo;
        for (int s = 1; s < ds.sample_count(); ++s) {
            lo = std::min(lo, ds.at(s, j));
            hi = std::max(hi, ds.at(s, j));
        }
        if (lo == hi) ds.degenerate_columns[j] = 1;
    }
    return ds;
}

NormParams fit_normalizer(const Dataset& ds, NormMode mode) {
    const int n = ds.sample_count(), d = ds.feature_count();
    if (n < 2) throw std::runtime_error("normalization needs at least 2 samples");

    NormParams p;
    p.mode = mode;
    p.shift.assign(d, 0.0);
    p.scale.assign(d, 1.0);
    p.degenerate.assign(d, 0);
    if (mode == NormMode::none) return p;

    for (int j = 0; j < d; ++j) {
        if (mode == NormMode::minmax) {
            double lo = ds.at(0, j), hi = lo;
            for (int s = 1; s < n; ++s) {
                lo = std::min(lo, ds.at(s, j));
                hi = std::max(hi, ds.at(s, j));
            }
            p.shift[j] = lo;
            p.scale[j] = hi - lo;
            if (p.scale[j] == 0.0) {
                p.degenerate[j] = 1;
                p.scale[j] = 1.0;
            }
        } else {
            double mean = 0.0;
            for (int s = 0; s < n; ++s) mean += ds.at(s, j);
            mean /= n;
            double var = 0.0;
            for (int s = 0; s < n; ++s) {
                const double dv = ds.at(s, j) - mean;
                var += dv * dv;
            }
            const double sd = std::sqrt(var / n);
            p.shift[j] = mean;
            p.scale[j] = sd;
            if (sd < 1e-300) {
                p.degenerate[j] = 1;
                p.scale[j] = 1.0;
            }
        }
    }
    return p;
}

Dataset apply_normalizer(const Dataset& ds, const NormParams& params) {
    const int d = ds.feature_count();
    if (static_cast<int>(params.shift.size()) != d && params.mode != NormMode::none) {
        throw std::runtime_error("normalization parameters cover " +
                                 std::to_string(params.shift.size()) + " columns, dataset has " +
                                 std::to_string(d));
    }
    Dataset out = ds;
    for (int s = 0; s < ds.sample_count(); ++s) {
        for (int j = 0; j < d; ++j) {
            out.features[static_cast<size_t>(s) * d + j] = params.apply(ds.at(s, j), j);
        }
    }
    out.norm = params;
    return out;
}

std::pair<Dataset, NormParams> normalize(const Dataset& ds, NormMode mode) {
    NormParams p = fit_normalizer(ds, mode);
    return {apply_normalizer(ds, p), p};
}

std::vector<int> SplitPlan::fold_valid(int fold) const {
    std::vector<int> out;
    for (int i = 0; i < static_cast<int>(fold_of.size()); ++i) {
        if (fold_of[i] == fold) out.push_back(i);
    }
    return out;
}

std::vector<int> SplitPlan::fold_train(int fold) const {
    std::vector<int> out;
    for (int i = 0; i < static_cast<int>(fold_of.size()); ++i) {
        if (fold_of[i] != fold) out.push_back(i);
    }
    return out;
}

namespace {

std::vector<std::vector<int>> indices_by_class(const Dataset& ds) {
    std::vector<std::vector<int>> by_class(ds.class_count);
    for (int i = 0; i < ds.sample_count(); ++i) by_class[ds.labels[i] - 1].push_back(i);
    return by_class;
}

}  // namespace

SplitPlan stratified_split(const Dataset& ds, double train_fraction, uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw std::runtime_error("train fraction must lie strictly between 0 and 1");
    }
    auto by_class = indices_by_class(ds);
    for (int k = 0; k < ds.class_count; ++k) {
        if (by_class[k].size() < 2) {
            throw std::runtime_error("cannot stratify: class " + std::to_string(k + 1) +
                                     " has fewer than 2 samples");
        }
    }

    // Largest-remainder allocation: per-class base floor(f*n_c), leftover
    // train seats go to the largest fractional remainders (ties by class id).
    const long total_train = std::lround(train_fraction * ds.sample_count());
    std::vector<long> take(ds.class_count);
    std::vector<std::pair<double, int>> remainders;
    long assigned = 0;
    for (int k = 0; k < ds.class_count; ++k) {
        const double exact = train_fraction * static_cast<double>(by_class[k].size());
        take[k] = static_cast<long>(std::floor(exact));
        assigned += take[k];
        remainders.push_back({exact - static_cast<double>(take[k]), k});
    }
    std::sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    for (long seat = 0; seat < total_train - assigned; ++seat) {
        take[remainders[seat % remainders.size()].second]++;
    }

    Rng rng(derive_seed(seed, "stratified-split"));
    SplitPlan plan;
    for (int k = 0; k < ds.class_count; ++k) {
        auto& pool = by_class[k];
        rng.shuffle(pool);
        const long t = std::min<long>(take[k], static_cast<long>(pool.size()));
        for (long i = 0; i < static_cast<long>(pool.size()); ++i) {
            (i < t ? plan.train_indices : plan.test_indices).push_back(pool[i]);
        }
    }
    std::sort(plan.train_indices.begin(), plan.train_indices.end());
    std::sort(plan.test_indices.begin(), plan.test_indices.end());
    return plan;
}

SplitPlan kfold(const Dataset& ds, int k, uint64_t seed) {
    if (k < 2) throw std::runtime_error("k-fold needs k >= 2");
    auto by_class = indices_by_class(ds);
    for (int c = 0; c < ds.class_count; ++c) {
        if (static_cast<int>(by_class[c].size()) < k) {
            throw std::runtime_error("k-fold with k=" + std::to_string(k) + " impossible: class " +
                                     std::to_string(c + 1) + " has only " +
                                     std::to_string(by_class[c].size()) + " samples");
        }
    }

    Rng rng(derive_seed(seed, "kfold"));
    SplitPlan plan;
    plan.fold_count = k;
    plan.fold_of.assign(ds.sample_count(), -1);
    // Deal each class round-robin, rotating the starting fold by the number
    // of samples dealt so far so global fold sizes stay within one sample.
    int dealt = 0;
    for (int c = 0; c < ds.class_count; ++c) {
        auto& pool = by_class[c];
        rng.shuffle(pool);
        for (int i = 0; i < static_cast<int>(pool.size()); ++i) {
            plan.fold_of[pool[i]] = (dealt + i) % k;
        }
        dealt += static_cast<int>(pool.size());
    }
    return plan;
}

Dataset subset(const Dataset& ds, const std::vector<int>& rows) {
    Dataset out;
    out.class_count = ds.class_count;
    out.feature_names = ds.feature_names;
    out.degenerate_columns = ds.degenerate_columns;
    out.norm = ds.norm;
    const int d = ds.feature_count();
    out.features.reserve(rows.size() * d);
    out.labels.reserve(rows.size());
    for (int r : rows) {
        const double* src = ds.view().row(r);
        out.features.insert(out.features.end(), src, src + d);
        out.labels.push_back(ds.labels[r]);
    }
    return out;
}

void write_csv(const Dataset& ds, const std::string& path, const CsvSchema& schema) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    const int d = ds.feature_count();

    if (schema.label_first) out << "class";
    for (int j = 0; j < d; ++j) {
        if (j > 0 || schema.label_first) out << ',';
        out << ds.feature_names[j];
    }
    if (!schema.label_first) out << ",class";
    out << '\n';

    for (int s = 0; s < ds.sample_count(); ++s) {
        if (schema.label_first) out << ds.labels[s];
        for (int j = 0; j < d; ++j) {
            if (j > 0 || schema.label_first) out << ',';
            out << format_double(ds.at(s, j));
        }
        if (!schema.label_first) out << ',' << ds.labels[s];
        out << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

void write_sidecar(const std::string& path, const NormParams& params, uint64_t seed,
                   const SplitPlan& plan,
                   const std::vector<std::pair<std::string, std::string>>& extra) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << "format = lhnfc-sidecar-v1\n";
    out << "seed = " << seed << '\n';
    out << "norm.mode = " << to_string(params.mode) << '\n';
    for (size_t j = 0; j < params.shift.size(); ++j) {
        out << "norm.shift." << j << " = " << format_double(params.shift[j]) << '\n';
        out << "norm.scale." << j << " = " << format_double(params.scale[j]) << '\n';
        out << "norm.degenerate." << j << " = " << static_cast<int>(params.degenerate[j]) << '\n';
    }
    auto write_indices = [&out](const char* key, const std::vector<int>& idx) {
        if (idx.empty()) return;
        out << key << " =";
        for (int i : idx) out << ' ' << i;
        out << '\n';
    };
    write_indices("split.train", plan.train_indices);
    write_indices("split.test", plan.test_indices);
    if (plan.fold_count > 0) {
        out << "split.folds = " << plan.fold_count << '\n';
        write_indices("split.fold_of", plan.fold_of);
    }
    for (const auto& [key, value] : extra) out << key << " = " << value << '\n';
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace lhnfc
