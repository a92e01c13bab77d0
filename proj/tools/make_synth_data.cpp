// Generates the bundled desk-scale diagnosis dataset: 430 samples, 5 serum
// measurements, 3 classes sized 300/70/60. Feature 4 is label-independent
// noise so there is a known-irrelevant column. Classes 1 and 3 are each a
// pair of subgroups staggered along one diagonal line in the order
// 1A 1B 3A 3B: each class's overall mean sits inside its own territory, so
// even a single Gaussian prototype per class ranks its own samples first,
// while the 1B/3A boundary (and the class-2 end of the line) leaves a
// residual confusion that one prototype per class cannot remove. The
// subgroups themselves stand far enough apart that multi-cluster models
// separate everything cleanly. The committed CSV was produced by this
// program with its defaults; it exists so the data's provenance is
// reproducible.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "lhnfc/rng.hpp"
#include "lhnfc/text.hpp"

namespace {

struct Profile {
    double mean;
    double sd;
    double lo;   // resample outside [lo, hi]
    double hi;
};

double draw(lhnfc::Rng& rng, const Profile& p) {
    for (;;) {
        double v = rng.normal(p.mean, p.sd);
        if (v >= p.lo && v <= p.hi) return v;
    }
}

// one decimal place, like lab sheets report
double round1(double v) { return std::round(v * 10.0) / 10.0; }

}  // namespace

int main(int argc, char** argv) {
    std::string out_path = "data/thyroid_synthetic.csv";
    uint64_t seed = 9;
    double gap = 2.0;       // 1B-to-3A boundary distance, in subgroup sigmas
    double step = 4.0;      // within-class subgroup distance, in subgroup sigmas
    for (int i = 1; i < argc; ++i) {
        std::string arg = argv[i];
        if (arg == "--out" && i + 1 < argc) {
            out_path = argv[++i];
        } else if (arg == "--seed" && i + 1 < argc) {
            seed = std::stoull(argv[++i]);
        } else if (arg == "--gap" && i + 1 < argc) {
            gap = std::stod(argv[++i]);
        } else if (arg == "--step" && i + 1 < argc) {
            step = std::stod(argv[++i]);
        } else {
            std::cerr << "usage: make_synth_data [--out path] [--seed n] [--gap s] [--step s]\n";
            return 2;
        }
    }

    // per-class generator profiles, one per feature
    const Profile noise{14.0, 4.0, 1.0, 30.0};   // feature 4, shared by all classes

    // informative feature axes: start value, subgroup sigma, direction, and
    // clamp range; subgroup means step along the shared diagonal by `step`
    // sigmas within a class and `gap` sigmas across the 1B/3A boundary
    struct Axis {
        double start;
        double sd;
        double dir;
        double lo, hi;
    };
    const std::vector<Axis> axes = {
        {95.0, 2.2, +1.0, 80.0, 150.0},   // f1
        {18.5, 1.3, -1.0, 0.1, 40.0},     // f2
        {5.4, 0.35, -1.0, 0.05, 9.0},     // f3
        {2.0, 0.55, +1.0, 0.2, 50.0},     // f5
    };
    auto subgroup = [&](double offset_sigmas) {
        std::vector<Profile> p;
        for (const Axis& a : axes)
            p.push_back({a.start + a.dir * offset_sigmas * a.sd, a.sd, a.lo, a.hi});
        p.insert(p.begin() + 3, noise);   // f4 slots in between f3 and f5
        return p;
    };
    const std::vector<Profile> class1_a = subgroup(0.0);
    const std::vector<Profile> class1_b = subgroup(step);
    const std::vector<Profile> class3_a = subgroup(step + gap);
    const std::vector<Profile> class3_b = subgroup(2.0 * step + gap);

    // class 2 closes the line past 3B as an island, ~4.5 subgroup sigmas out
    // on every informative feature: far enough that no boundary with it
    // survives, near enough to stay on the same measurement scale
    const std::vector<Profile>& c3b = class3_b;
    const std::vector<Profile> class2 = {
        {c3b[0].mean + 4.5 * 2.2, 3.0, 80.0, 150.0},
        {std::max(0.5, c3b[1].mean - 4.5 * 1.3), 0.9, 0.1, 40.0},
        {std::max(0.2, c3b[2].mean - 4.5 * 0.35), 0.25, 0.05, 9.0},
        noise,
        {c3b[4].mean + 4.5 * 0.55, 0.8, 0.2, 50.0},
    };

    struct Block {
        int label;
        int count;
        const std::vector<Profile>* profiles;
    };
    const std::vector<Block> blocks = {
        {1, 150, &class1_a},
        {1, 150, &class1_b},
        {2, 70, &class2},
        {3, 30, &class3_a},
        {3, 30, &class3_b},
    };

    lhnfc::Rng rng(lhnfc::derive_seed(seed, "synth-data"));
    std::ofstream out(out_path, std::ios::binary);
    if (!out) {
        std::cerr << out_path << ": cannot open for writing\n";
        return 1;
    }
    int written = 0;
    for (const Block& b : blocks) {
        for (int s = 0; s < b.count; ++s) {
            out << b.label;
            for (const Profile& p : *b.profiles)
                out << ',' << lhnfc::format_double(round1(draw(rng, p)));
            out << '\n';
            ++written;
        }
    }
    if (!out.flush()) {
        std::cerr << out_path << ": write failed\n";
        return 1;
    }
    std::cout << "wrote " << written << " samples to " << out_path << "\n";
    return 0;
}
