#include "lhnfc/init.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "lhnfc/rng.hpp"

namespace lhnfc {

namespace {

double sq_dist(const double* a, const double* b, int d) {
    double acc = 0.0;
    for (int j = 0; j < d; ++j) {
        const double diff = a[j] - b[j];
        acc += diff * diff;
    }
    return acc;
}

std::vector<double> seed_centers(ConstMatrixView pts, int k, Rng& rng, bool plus_plus) {
    const int m = pts.rows, d = pts.cols;
    std::vector<double> centers(static_cast<size_t>(k) * d);
    if (!plus_plus) {
        std::vector<int> order(m);
        std::iota(order.begin(), order.end(), 0);
        rng.shuffle(order);
        for (int c = 0; c < k; ++c) {
            std::copy_n(pts.row(order[c]), d, centers.begin() + static_cast<size_t>(c) * d);
        }
        return centers;
    }
    // k-means++: first center uniform, the rest proportional to squared
    // distance from the nearest chosen center.
    int first = static_cast<int>(rng.below(m));
    std::copy_n(pts.row(first), d, centers.begin());
    std::vector<double> dist(m);
    for (int c = 1; c < k; ++c) {
        double total = 0.0;
        for (int i = 0; i < m; ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (int cc = 0; cc < c; ++cc) {
                best = std::min(best, sq_dist(pts.row(i), &centers[static_cast<size_t>(cc) * d], d));
            }
            dist[i] = best;
            total += best;
        }
        int chosen = static_cast<int>(rng.below(m));   // fallback when all points coincide
        if (total > 0.0) {
            double target = rng.uniform() * total;
            double acc = 0.0;
            for (int i = 0; i < m; ++i) {
                acc += dist[i];
                if (acc >= target) {
                    chosen = i;
                    break;
                }
            }
        }
        std::copy_n(pts.row(chosen), d, centers.begin() + static_cast<size_t>(c) * d);
    }
    return centers;
}

struct LloydOutcome {
    std::vector<double> centers;
    std::vector<int> assignment;
    double wcss = 0.0;
    int iterations = 0;
};

LloydOutcome lloyd(ConstMatrixView pts, int k, std::vector<double> centers, int max_iter) {
    const int m = pts.rows, d = pts.cols;
    std::vector<int> assignment(m, -1);
    std::vector<int> counts(k);
    int iter = 0;
    for (; iter < max_iter; ++iter) {
        bool changed = false;
        for (int i = 0; i < m; ++i) {
            int best = 0;
            double best_d = sq_dist(pts.row(i), centers.data(), d);
            for (int c = 1; c < k; ++c) {
                const double dd = sq_dist(pts.row(i), &centers[static_cast<size_t>(c) * d], d);
                if (dd < best_d) {
                    best_d = dd;
                    best = c;
                }
            }
            if (assignment[i] != best) {
                assignment[i] = best;
                changed = true;
            }
        }

        // Reseed any empty cluster to the point currently farthest from its
        // own center, then recompute means.
        std::fill(counts.begin(), counts.end(), 0);
        for (int a : assignment) counts[a]++;
        for (int c = 0; c < k; ++c) {
            if (counts[c] > 0) continue;
            int far = 0;
            double far_d = -1.0;
            for (int i = 0; i < m; ++i) {
                if (counts[assignment[i]] <= 1) continue;   // keep donor clusters nonempty
                const double dd =
                    sq_dist(pts.row(i), &centers[static_cast<size_t>(assignment[i]) * d], d);
                if (dd > far_d) {
                    far_d = dd;
                    far = i;
                }
            }
            counts[assignment[far]]--;
            assignment[far] = c;
            counts[c] = 1;
            changed = true;
        }

        std::fill(centers.begin(), centers.end(), 0.0);
        for (int i = 0; i < m; ++i) {
            double* ctr = &centers[static_cast<size_t>(assignment[i]) * d];
            const double* row = pts.row(i);
            for (int j = 0; j < d; ++j) ctr[j] += row[j];
        }
        for (int c = 0; c < k; ++c) {
            double* ctr = &centers[static_cast<size_t>(c) * d];
            for (int j = 0; j < d; ++j) ctr[j] /= counts[c];
        }

        if (!changed) break;
    }

    LloydOutcome out;
    out.centers = std::move(centers);
    out.assignment = std::move(assignment);
    out.iterations = iter;
    for (int i = 0; i < m; ++i) {
        out.wcss += sq_dist(pts.row(i), &out.centers[static_cast<size_t>(out.assignment[i]) * d], d);
    }
    return out;
}

}  // namespace

KMeansResult kmeans(ConstMatrixView points, int k, uint64_t seed, const KMeansConfig& cfg) {
    if (k < 1) throw std::runtime_error("k-means needs k >= 1");
    if (points.rows < k) {
        throw std::runtime_error("k-means: " + std::to_string(points.rows) +
                                 " points cannot form " + std::to_string(k) + " clusters");
    }

    KMeansResult best;
    best.wcss = std::numeric_limits<double>::infinity();
    const int restarts = std::max(1, cfg.restarts);
    for (int r = 0; r < restarts; ++r) {
        Rng rng(derive_seed(seed, "kmeans-restart/" + std::to_string(r)));
        auto outcome = lloyd(points, k, seed_centers(points, k, rng, cfg.plus_plus), cfg.max_iter);
        if (outcome.wcss < best.wcss) {
            best.cluster_count = k;
            best.centers = std::move(outcome.centers);
            best.assignment = std::move(outcome.assignment);
            best.wcss = outcome.wcss;
            best.iterations = outcome.iterations;
            best.best_restart = r;
        }
    }
    return best;
}

RuleBase init_rulebase(const Dataset& train, const std::vector<uint8_t>& feature_mask,
                       const InitConfig& cfg, InitDiagnostics* diag) {
    if (cfg.clusters_per_class < 1) throw std::runtime_error("clusters_per_class must be >= 1");
    const int d = train.feature_count();
    const int k_classes = train.class_count;
    if (static_cast<int>(feature_mask.size()) != d) {
        throw std::runtime_error("feature mask size does not match dataset");
    }

    std::vector<int> active;
    for (int j = 0; j < d; ++j) {
        if (feature_mask[j]) active.push_back(j);
    }
    if (active.empty()) throw std::runtime_error("feature mask deactivates every feature");

    const int U = cfg.clusters_per_class * k_classes;
    RuleBase rb = make_rulebase(U, d, k_classes);
    rb.feature_mask = feature_mask;
    // Inactive features carry inert placeholders: hedge 0 contributes
    // alpha = 1 regardless of center or width.
    for (int i = 0; i < U; ++i) {
        for (int j = 0; j < d; ++j) {
            if (!feature_mask[j]) rb.hedge(i, j) = 0.0;
        }
    }

    if (diag) {
        diag->class_wcss.assign(k_classes, 0.0);
        diag->class_iterations.assign(k_classes, 0);
        diag->rule_width_min.assign(U, 0.0);
        diag->rule_width_max.assign(U, 0.0);
    }

    int rule = 0;
    for (int cls = 1; cls <= k_classes; ++cls) {
        std::vector<int> rows;
        for (int s = 0; s < train.sample_count(); ++s) {
            if (train.labels[s] == cls) rows.push_back(s);
        }
        if (static_cast<int>(rows.size()) < cfg.clusters_per_class) {
            throw std::runtime_error("class " + std::to_string(cls) + " has " +
                                     std::to_string(rows.size()) + " samples, fewer than " +
                                     std::to_string(cfg.clusters_per_class) + " clusters");
        }

        // Cluster this class on active columns only.
        const int da = static_cast<int>(active.size());
        std::vector<double> pts(rows.size() * da);
        for (size_t r = 0; r < rows.size(); ++r) {
            for (int a = 0; a < da; ++a) pts[r * da + a] = train.at(rows[r], active[a]);
        }
        auto km = kmeans({pts.data(), static_cast<int>(rows.size()), da}, cfg.clusters_per_class,
                         derive_seed(cfg.seed, "init-class/" + std::to_string(cls)), cfg.kmeans);
        if (diag) {
            diag->class_wcss[cls - 1] = km.wcss;
            diag->class_iterations[cls - 1] = km.iterations;
        }

        for (int c = 0; c < cfg.clusters_per_class; ++c, ++rule) {
            std::vector<int> members;
            for (size_t r = 0; r < rows.size(); ++r) {
                if (km.assignment[r] == c) members.push_back(static_cast<int>(r));
            }
            for (int a = 0; a < da; ++a) {
                const int j = active[a];
                rb.center(rule, j) = km.centers[static_cast<size_t>(c) * da + a];
                double var = 0.0;
                for (int r : members) {
                    const double diff = pts[static_cast<size_t>(r) * da + a] - rb.center(rule, j);
                    var += diff * diff;
                }
                const double sd = members.empty() ? 0.0 : std::sqrt(var / members.size());
                rb.width(rule, j) = std::max(sd, kSigmaMin);
            }
            for (int k = 0; k < k_classes; ++k) {
                rb.weight(rule, k) = (k == cls - 1) ? 1.0 : 0.01;
            }
            rb.rule_class[rule] = cls;
        }
    }

    if (cfg.width_rule == WidthRule::nearest_center_half && U > 1) {
        // Rule-wide width: half the distance to the nearest other center.
        for (int i = 0; i < U; ++i) {
            double nearest = std::numeric_limits<double>::infinity();
            for (int o = 0; o < U; ++o) {
                if (o == i) continue;
                double dd = 0.0;
                for (int j : active) {
                    const double diff = rb.center(i, j) - rb.center(o, j);
                    dd += diff * diff;
                }
                nearest = std::min(nearest, dd);
            }
            const double w = std::max(0.5 * std::sqrt(nearest), kSigmaMin);
            for (int j : active) rb.width(i, j) = w;
        }
    }

    if (diag) {
        for (int i = 0; i < U; ++i) {
            double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
            for (int j : active) {
                lo = std::min(lo, rb.width(i, j));
                hi = std::max(hi, rb.width(i, j));
            }
            diag->rule_width_min[i] = lo;
            diag->rule_width_max[i] = hi;
        }
    }

    rb.validate();
    return rb;
}

RuleBase init_rulebase(const Dataset& train, const InitConfig& cfg, InitDiagnostics* diag) {
    return init_rulebase(train, std::vector<uint8_t>(train.feature_count(), 1), cfg, diag);
}

std::string format_init_diagnostics(const InitDiagnostics& diag) {
    std::string out = "initialization:\n";
    char buf[128];
    for (size_t c = 0; c < diag.class_wcss.size(); ++c) {
        std::snprintf(buf, sizeof(buf), "  class %zu: kmeans wcss %.6g, %d iterations\n", c + 1,
                      diag.class_wcss[c], diag.class_iterations[c]);
        out += buf;
    }
    for (size_t i = 0; i < diag.rule_width_min.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "  rule %zu widths in [%.6g, %.6g]\n", i + 1,
                      diag.rule_width_min[i], diag.rule_width_max[i]);
        out += buf;
    }
    return out;
}

}  // namespace lhnfc
