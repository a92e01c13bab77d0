#include "lhnfc/commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "lhnfc/eval.hpp"
#include "lhnfc/rng.hpp"
#include "lhnfc/scg.hpp"
#include "lhnfc/select.hpp"
#include "lhnfc/text.hpp"
#include "lhnfc/train.hpp"

namespace lhnfc {

namespace {

constexpr const char* kModelTag = "lhnfc-model-v1";

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error(path + ": cannot open");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    out << content;
    if (!out) throw std::runtime_error(path + ": write failed");
}

std::string join_doubles(const std::vector<double>& v) {
    std::string s;
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) s += ',';
        s += format_double(v[i]);
    }
    return s;
}

std::vector<double> parse_doubles(std::string_view line, const char* what) {
    std::vector<double> out;
    if (trim(line).empty()) return out;
    for (std::string_view part : split(line, ',')) {
        double v = 0.0;
        if (!parse_double(trim(part), v))
            throw std::runtime_error(std::string("model file: bad number in ") + what);
        out.push_back(v);
    }
    return out;
}

std::string join_names(const std::vector<std::string>& names) {
    std::string s;
    for (size_t i = 0; i < names.size(); ++i) {
        if (i) s += ',';
        s += names[i];
    }
    return s;
}

// Expects "key=value"; returns the value or throws naming the wanted key.
std::string_view expect_kv(std::string_view line, std::string_view key) {
    size_t eq = line.find('=');
    if (eq == std::string_view::npos || trim(line.substr(0, eq)) != key)
        throw std::runtime_error("model file: expected '" + std::string(key) + "=...', got '" +
                                 std::string(line) + "'");
    return line.substr(eq + 1);
}

Dataset load_input(const RunConfig& cfg) {
    if (cfg.data.empty()) throw ConfigError("config: --data is required");
    if (!std::filesystem::exists(cfg.data))
        throw ConfigError(cfg.data + ": file not found");
    CsvSchema schema;
    schema.label_first = !cfg.label_last;
    try {
        return load_csv(cfg.data, schema);
    } catch (const std::exception& e) {
        // Unreadable input is a usage problem, same as a missing path.
        throw ConfigError(e.what());
    }
}

std::filesystem::path prepare_out_dir(const RunConfig& cfg) {
    std::filesystem::path dir(cfg.out);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw ConfigError(cfg.out + ": cannot create output directory (" + ec.message() + ")");
    return dir;
}

std::string fixed4(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

std::string history_csv(const RunConfig& cfg, const FitResult& fr) {
    std::string s = artifact_header(cfg);
    s += "iteration,cost,rmse,grad_norm\n";
    for (const FitHistoryRow& row : fr.history) {
        s += std::to_string(row.iteration) + "," + format_double(row.cost) + "," +
             format_double(row.rmse) + "," + format_double(row.grad_norm) + "\n";
    }
    return s;
}

std::string metrics_report(const RunConfig& cfg, const Metrics& train, const Metrics* test) {
    std::string s = artifact_header(cfg);
    s += "== training split ==\n" + format_metrics(train);
    if (test && test->sample_count > 0) s += "== test split ==\n" + format_metrics(*test);
    return s;
}

std::string metrics_table_csv(const RunConfig& cfg, const Metrics& train, const Metrics* test) {
    std::string s = artifact_header(cfg);
    std::string header = metrics_csv_header(train.class_count);
    header.pop_back();
    s += "split," + header + "\n";
    s += "train," + metrics_csv_row(train);
    if (test && test->sample_count > 0) s += "test," + metrics_csv_row(*test);
    return s;
}

void write_model_artifacts(const RunConfig& cfg, const std::filesystem::path& dir,
                           const Dataset& ds, const ExperimentResult& res) {
    ModelArtifact art{cfg.echo_pairs(), res.norm, ds.feature_names, res.model};
    save_model(art, (dir / "model.txt").string());
    write_text_file((dir / "history.csv").string(), history_csv(cfg, res.fit));
    const Metrics* test = res.test_metrics.sample_count > 0 ? &res.test_metrics : nullptr;
    write_text_file((dir / "metrics.txt").string(), metrics_report(cfg, res.train_metrics, test));
    write_text_file((dir / "metrics.csv").string(),
                    metrics_table_csv(cfg, res.train_metrics, test));
    write_text_file((dir / "rules.txt").string(),
                    artifact_header(cfg) + format_rules(res.model, ds.feature_names));
}

void print_run_summary(const ExperimentResult& res) {
    std::cout << "training accuracy: " << fixed4(res.train_metrics.accuracy_pct) << "%\n";
    if (res.test_metrics.sample_count > 0)
        std::cout << "test accuracy: " << fixed4(res.test_metrics.accuracy_pct) << "%\n";
    std::cout << "final cost: " << format_double(res.fit.final_cost)
              << " (rmse " << format_double(res.fit.final_rmse) << ")\n";
    std::cout << "iterations: " << res.fit.iterations << " (" << to_string(res.fit.reason)
              << ")\n";
}

}  // namespace

std::string model_to_text(const ModelArtifact& m) {
    std::string s;
    s += kModelTag;
    s += '\n';
    s += "config " + std::to_string(m.config.size()) + '\n';
    for (const auto& [k, v] : m.config) s += k + "=" + v + '\n';
    s += "norm.mode=" + to_string(m.norm.mode) + '\n';
    s += "norm.shift=" + join_doubles(m.norm.shift) + '\n';
    s += "norm.scale=" + join_doubles(m.norm.scale) + '\n';
    s += "norm.degenerate=";
    for (size_t i = 0; i < m.norm.degenerate.size(); ++i) {
        if (i) s += ',';
        s += m.norm.degenerate[i] ? '1' : '0';
    }
    s += '\n';
    s += "features=" + join_names(m.feature_names) + '\n';
    s += rulebase_to_text(m.rb);
    return s;
}

ModelArtifact model_from_text(std::string_view text) {
    ModelArtifact m;
    size_t pos = 0;
    auto next_line = [&text, &pos]() -> std::string_view {
        if (pos >= text.size()) throw std::runtime_error("model file: truncated");
        size_t nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        std::string_view line = text.substr(pos, nl - pos);
        pos = nl + 1;
        return line;
    };

    if (trim(next_line()) != kModelTag)
        throw std::runtime_error("model file: missing format tag");
    std::string_view cfg_line = next_line();
    if (cfg_line.substr(0, 7) != "config ")
        throw std::runtime_error("model file: expected 'config <count>'");
    long cfg_count = 0;
    if (!parse_long(trim(cfg_line.substr(7)), cfg_count) || cfg_count < 0)
        throw std::runtime_error("model file: bad config count");
    for (long i = 0; i < cfg_count; ++i) {
        std::string_view line = next_line();
        size_t eq = line.find('=');
        if (eq == std::string_view::npos)
            throw std::runtime_error("model file: bad config line '" + std::string(line) + "'");
        m.config.emplace_back(std::string(line.substr(0, eq)), std::string(line.substr(eq + 1)));
    }
    m.norm.mode = norm_mode_from_string(trim(expect_kv(next_line(), "norm.mode")));
    m.norm.shift = parse_doubles(expect_kv(next_line(), "norm.shift"), "norm.shift");
    m.norm.scale = parse_doubles(expect_kv(next_line(), "norm.scale"), "norm.scale");
    std::string_view degen = expect_kv(next_line(), "norm.degenerate");
    m.norm.degenerate.clear();
    if (!trim(degen).empty()) {
        for (std::string_view part : split(degen, ','))
            m.norm.degenerate.push_back(trim(part) == "1" ? 1 : 0);
    }
    std::string_view names = expect_kv(next_line(), "features");
    if (!trim(names).empty()) {
        for (std::string_view part : split(names, ','))
            m.feature_names.emplace_back(trim(part));
    }
    m.rb = rulebase_from_text(text.substr(pos));
    return m;
}

void save_model(const ModelArtifact& m, const std::string& path) {
    write_text_file(path, model_to_text(m));
}

ModelArtifact load_model(const std::string& path) {
    return model_from_text(read_text_file(path));
}

int cmd_train(const RunConfig& cfg) {
    cfg.validate();
    Dataset ds = load_input(cfg);
    std::filesystem::path dir = prepare_out_dir(cfg);

    SplitPlan plan = stratified_split(ds, cfg.split, cfg.seed);
    Dataset train_raw = subset(ds, plan.train_indices);
    Dataset test_raw = subset(ds, plan.test_indices);

    ExperimentConfig ec = make_experiment_config(cfg);
    ec.with_selection = false;
    ExperimentResult res = run_experiment(train_raw, test_raw, ec);

    write_model_artifacts(cfg, dir, ds, res);
    std::cout << "split: " << train_raw.sample_count() << " train / " << test_raw.sample_count()
              << " test\n";
    print_run_summary(res);
    std::cout << "artifacts: " << dir.string() << "\n";
    return 0;
}

int cmd_select(const RunConfig& cfg) {
    cfg.validate();
    Dataset ds = load_input(cfg);
    std::filesystem::path dir = prepare_out_dir(cfg);

    SplitPlan plan = stratified_split(ds, cfg.split, cfg.seed);
    Dataset train_raw = subset(ds, plan.train_indices);
    Dataset test_raw = subset(ds, plan.test_indices);

    ExperimentConfig ec = make_experiment_config(cfg);
    ec.with_selection = true;
    ExperimentResult res = run_experiment(train_raw, test_raw, ec);

    write_model_artifacts(cfg, dir, ds, res);
    write_text_file((dir / "selection.txt").string(),
                    artifact_header(cfg) +
                        format_selection_report(*res.selection, ds.feature_names));
    write_text_file((dir / "selection.csv").string(),
                    artifact_header(cfg) + selection_report_csv(*res.selection, ds.feature_names));
    write_text_file((dir / "phase1_history.csv").string(), history_csv(cfg, *res.phase1));

    std::cout << "kept features:";
    for (int j : res.selection->kept) std::cout << " " << j + 1;
    std::cout << "\ndropped features:";
    for (int j : res.selection->dropped) std::cout << " " << j + 1;
    std::cout << "\n";
    print_run_summary(res);
    std::cout << "artifacts: " << dir.string() << "\n";
    return 0;
}

int cmd_cv(const RunConfig& cfg) {
    cfg.validate();
    Dataset ds = load_input(cfg);
    std::filesystem::path dir = prepare_out_dir(cfg);

    ExperimentConfig ec = make_experiment_config(cfg);
    std::vector<uint64_t> seeds;
    for (int i = 0; i < cfg.seeds; ++i) seeds.push_back(cfg.seed + static_cast<uint64_t>(i));
    CvSummary cv = cross_validate(ds, ec, cfg.folds, seeds);

    write_text_file((dir / "cv_summary.txt").string(), artifact_header(cfg) + format_cv_summary(cv));
    write_text_file((dir / "cv_detail.csv").string(), artifact_header(cfg) + cv_detail_csv(cv));

    std::cout << "validation accuracy: " << fixed4(cv.mean_valid_accuracy) << "% +/- "
              << fixed4(cv.std_valid_accuracy) << " over " << cv.folds.size() << " folds\n";
    std::cout << "artifacts: " << dir.string() << "\n";
    return 0;
}

int cmd_evaluate(const RunConfig& cfg) {
    cfg.validate();
    if (cfg.model.empty()) throw ConfigError("config: --model is required");
    if (!std::filesystem::exists(cfg.model)) throw ConfigError(cfg.model + ": file not found");
    ModelArtifact art;
    try {
        art = load_model(cfg.model);
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
    Dataset raw = load_input(cfg);
    if (raw.feature_count() != art.rb.feature_count)
        throw ConfigError("dataset has " + std::to_string(raw.feature_count()) +
                          " features, model expects " + std::to_string(art.rb.feature_count));
    Dataset ds = apply_normalizer(raw, art.norm);
    Metrics m = evaluate(art.rb, ds);

    std::filesystem::path dir = prepare_out_dir(cfg);
    write_text_file((dir / "metrics.txt").string(), metrics_report(cfg, m, nullptr));
    write_text_file((dir / "metrics.csv").string(), metrics_table_csv(cfg, m, nullptr));

    if (!cfg.surface.empty()) {
        auto parts = split(cfg.surface, ',');
        long a = 0, b = 0;
        parse_long(trim(parts[0]), a);
        parse_long(trim(parts[1]), b);
        if (a > ds.feature_count() || b > ds.feature_count())
            throw ConfigError("surface feature out of range (dataset has " +
                              std::to_string(ds.feature_count()) + " features)");
        const int ja = static_cast<int>(a) - 1, jb = static_cast<int>(b) - 1;
        const int n = ds.sample_count(), d = ds.feature_count();
        std::vector<double> base(d, 0.0), lo(d, 0.0), hi(d, 0.0);
        for (int j = 0; j < d; ++j) {
            double mn = ds.at(0, j), mx = mn, sum = 0.0;
            for (int s = 0; s < n; ++s) {
                mn = std::min(mn, ds.at(s, j));
                mx = std::max(mx, ds.at(s, j));
                sum += ds.at(s, j);
            }
            base[j] = sum / n;
            lo[j] = mn;
            hi[j] = mx;
        }
        std::string s = artifact_header(cfg);
        s += "x,y";
        for (int k = 1; k <= art.rb.class_count; ++k) s += ",score_" + std::to_string(k);
        s += ",predicted\n";
        const int steps = cfg.surface_steps;
        std::vector<double> point = base;
        for (int iy = 0; iy < steps; ++iy) {
            const double y = lo[jb] + (hi[jb] - lo[jb]) * iy / (steps - 1);
            for (int ix = 0; ix < steps; ++ix) {
                const double x = lo[ja] + (hi[ja] - lo[ja]) * ix / (steps - 1);
                point[ja] = x;
                point[jb] = y;
                ForwardTrace t = forward(art.rb, {point.data(), 1, d});
                s += format_double(x) + "," + format_double(y);
                for (int k = 0; k < art.rb.class_count; ++k)
                    s += "," + format_double(t.normalized_at(0, k));
                s += "," + std::to_string(t.predicted[0]) + "\n";
            }
        }
        write_text_file((dir / "surface.csv").string(), s);
    }

    std::cout << "accuracy: " << fixed4(m.accuracy_pct) << "% on " << m.sample_count
              << " samples\n";
    std::cout << "artifacts: " << dir.string() << "\n";
    return 0;
}

int cmd_export_rules(const RunConfig& cfg) {
    cfg.validate();
    if (cfg.model.empty()) throw ConfigError("config: --model is required");
    if (!std::filesystem::exists(cfg.model)) throw ConfigError(cfg.model + ": file not found");
    ModelArtifact art;
    try {
        art = load_model(cfg.model);
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
    std::string text = format_rules(art.rb, art.feature_names);
    std::filesystem::path dir = prepare_out_dir(cfg);
    write_text_file((dir / "rules.txt").string(), artifact_header(cfg) + text);
    std::cout << text;
    return 0;
}

int cmd_grad_check(const RunConfig& cfg) {
    cfg.validate();
    Dataset raw = load_input(cfg);
    auto [ds, params] = normalize(raw, norm_mode_from_string(cfg.norm));
    (void)params;

    ExperimentConfig ec = make_experiment_config(cfg);
    RuleBase rb0 = init_rulebase(ds, ec.init);

    std::string report = artifact_header(cfg);
    bool ok = true;
    for (HedgeMode mode : {HedgeMode::constrained01, HedgeMode::nonneg_unconstrained}) {
        TrainingProblem problem(rb0, ds.view(), ds.labels, mode, ec.train.trainable);
        Objective f = [&problem](std::span<const double> t) { return problem.objective(t); };
        GradientFn g = [&problem](std::span<const double> t, std::span<double> out) {
            problem.gradient(t, out);
        };
        std::vector<double> theta = problem.initial_theta();
        double dev = grad_check(f, g, theta, cfg.gc_step);
        bool pass = dev <= cfg.gc_tol;
        ok = ok && pass;
        std::string line = "hedge mode " + to_string(mode) + ": max relative deviation " +
                           format_double(dev) + " (tolerance " + format_double(cfg.gc_tol) +
                           ") -> " + (pass ? "ok" : "MISMATCH") + "\n";
        report += line;
        std::cout << line;
    }
    std::filesystem::path dir = prepare_out_dir(cfg);
    write_text_file((dir / "gradcheck.txt").string(), report);
    if (!ok) throw std::runtime_error("gradient check failed");
    return 0;
}

}  // namespace lhnfc
