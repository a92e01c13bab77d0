#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "lhnfc/network.hpp"
#include "lhnfc/text.hpp"

namespace lhnfc {

namespace {

constexpr const char* kFormatTag = "lhnfc-rulebase-v1";

void append_row(std::string& out, const char* key, const double* values, int n) {
    out += key;
    for (int j = 0; j < n; ++j) {
        out += ' ';
        out += format_double(values[j]);
    }
    out += '\n';
}

class LineReader {
public:
    explicit LineReader(std::string_view text) : rest_(text) {}

    // Next non-empty line, trimmed; throws at end of input.
    std::string_view next(const char* what) {
        while (!rest_.empty()) {
            size_t pos = rest_.find('\n');
            std::string_view line = rest_.substr(0, pos);
            rest_ = pos == std::string_view::npos ? std::string_view{} : rest_.substr(pos + 1);
            line = trim(line);
            if (!line.empty()) return line;
        }
        throw std::runtime_error(std::string("rulebase text ended while reading ") + what);
    }

private:
    std::string_view rest_;
};

std::vector<double> parse_row(std::string_view line, const char* key, int expect) {
    auto fields = split(line, ' ');
    if (fields.empty() || fields[0] != key) {
        throw std::runtime_error("rulebase text: expected '" + std::string(key) + "' row, got '" +
                                 std::string(line) + "'");
    }
    std::vector<double> out;
    for (size_t i = 1; i < fields.size(); ++i) {
        if (trim(fields[i]).empty()) continue;
        double v;
        if (!parse_double(fields[i], v)) {
            throw std::runtime_error("rulebase text: bad number '" + std::string(fields[i]) + "'");
        }
        out.push_back(v);
    }
    if (static_cast<int>(out.size()) != expect) {
        throw std::runtime_error("rulebase text: '" + std::string(key) + "' row has " +
                                 std::to_string(out.size()) + " values, expected " +
                                 std::to_string(expect));
    }
    return out;
}

long parse_scalar(std::string_view line, const char* key) {
    auto fields = split(line, ' ');
    long v;
    if (fields.size() != 2 || fields[0] != key || !parse_long(fields[1], v)) {
        throw std::runtime_error("rulebase text: expected '" + std::string(key) +
                                 " <n>', got '" + std::string(line) + "'");
    }
    return v;
}

}  // namespace

std::string rulebase_to_text(const RuleBase& rb) {
    std::string out;
    out += kFormatTag;
    out += '\n';
    out += "rules " + std::to_string(rb.rule_count) + '\n';
    out += "features " + std::to_string(rb.feature_count) + '\n';
    out += "classes " + std::to_string(rb.class_count) + '\n';
    out += "mask";
    for (uint8_t m : rb.feature_mask) out += m ? " 1" : " 0";
    out += '\n';
    out += "hints";
    for (int h : rb.rule_class) out += ' ' + std::to_string(h);
    out += '\n';
    for (int i = 0; i < rb.rule_count; ++i) {
        out += "rule " + std::to_string(i + 1) + '\n';
        append_row(out, "centers", &rb.centers[static_cast<size_t>(i) * rb.feature_count], rb.feature_count);
        append_row(out, "widths", &rb.widths[static_cast<size_t>(i) * rb.feature_count], rb.feature_count);
        append_row(out, "hedges", &rb.hedges[static_cast<size_t>(i) * rb.feature_count], rb.feature_count);
        append_row(out, "weights", &rb.class_weights[static_cast<size_t>(i) * rb.class_count], rb.class_count);
    }
    return out;
}

RuleBase rulebase_from_text(std::string_view text) {
    LineReader reader(text);
    if (reader.next("format tag") != kFormatTag) {
        throw std::runtime_error("rulebase text: unknown format tag (expected " +
                                 std::string(kFormatTag) + ")");
    }
    RuleBase rb;
    rb.rule_count = static_cast<int>(parse_scalar(reader.next("rules"), "rules"));
    rb.feature_count = static_cast<int>(parse_scalar(reader.next("features"), "features"));
    rb.class_count = static_cast<int>(parse_scalar(reader.next("classes"), "classes"));
    if (rb.rule_count < 1 || rb.feature_count < 1 || rb.class_count < 2) {
        throw std::runtime_error("rulebase text: implausible dimensions");
    }

    auto mask = parse_row(reader.next("mask"), "mask", rb.feature_count);
    for (double m : mask) rb.feature_mask.push_back(m != 0.0 ? 1 : 0);
    auto hints = parse_row(reader.next("hints"), "hints", rb.rule_count);
    for (double h : hints) rb.rule_class.push_back(static_cast<int>(h));

    for (int i = 0; i < rb.rule_count; ++i) {
        if (parse_scalar(reader.next("rule"), "rule") != i + 1) {
            throw std::runtime_error("rulebase text: rules out of order");
        }
        auto c = parse_row(reader.next("centers"), "centers", rb.feature_count);
        auto w = parse_row(reader.next("widths"), "widths", rb.feature_count);
        auto h = parse_row(reader.next("hedges"), "hedges", rb.feature_count);
        auto cw = parse_row(reader.next("weights"), "weights", rb.class_count);
        rb.centers.insert(rb.centers.end(), c.begin(), c.end());
        rb.widths.insert(rb.widths.end(), w.begin(), w.end());
        rb.hedges.insert(rb.hedges.end(), h.begin(), h.end());
        rb.class_weights.insert(rb.class_weights.end(), cw.begin(), cw.end());
    }
    rb.validate();
    return rb;
}

void save_rulebase(const RuleBase& rb, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << rulebase_to_text(rb);
    if (!out) throw std::runtime_error("write failed: " + path);
}

RuleBase load_rulebase(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return rulebase_from_text(ss.str());
}

std::string format_rules(const RuleBase& rb, const std::vector<std::string>& feature_names,
                         const std::vector<std::string>& class_names) {
    auto feature_label = [&](int j) {
        if (j < static_cast<int>(feature_names.size()) && !feature_names[j].empty()) {
            return feature_names[j];
        }
        return "feature " + std::to_string(j + 1);
    };
    auto class_label = [&](int k) {
        if (k - 1 < static_cast<int>(class_names.size()) && !class_names[k - 1].empty()) {
            return class_names[k - 1];
        }
        return "class " + std::to_string(k);
    };
    auto short_num = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.4g", v);
        return std::string(buf);
    };

    std::string out;
    for (int i = 0; i < rb.rule_count; ++i) {
        out += 'R' + std::to_string(i + 1) + ": IF ";
        bool first = true;
        for (int j = 0; j < rb.feature_count; ++j) {
            if (!rb.feature_mask[j]) continue;
            if (!first) out += " AND ";
            first = false;
            out += feature_label(j) + " is A" + std::to_string(i + 1) + ',' + std::to_string(j + 1) +
                   " with p=" + short_num(rb.hedge(i, j));
        }
        int cls = rb.rule_class[i];
        if (cls == 0) {
            // no initializer hint; report the class this rule pushes hardest
            int best = 0;
            for (int k = 1; k < rb.class_count; ++k) {
                if (rb.weight(i, k) > rb.weight(i, best)) best = k;
            }
            cls = best + 1;
        }
        out += " THEN class is " + class_label(cls) + '\n';
        out += "    (A" + std::to_string(i + 1) + ",j: gaussian, center/width per feature:";
        for (int j = 0; j < rb.feature_count; ++j) {
            if (!rb.feature_mask[j]) continue;
            out += ' ' + short_num(rb.center(i, j)) + '/' + short_num(rb.width(i, j));
        }
        out += "; class weights:";
        for (int k = 0; k < rb.class_count; ++k) out += ' ' + short_num(rb.weight(i, k));
        out += ")\n";
    }
    return out;
}

}  // namespace lhnfc
