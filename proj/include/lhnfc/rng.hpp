#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace lhnfc {

// Portable counter-based RNG (splitmix64). std:: engines and distributions
// are implementation-defined across standard libraries; every stochastic
// component in this project draws from this one so that a seed means the
// same thing on every platform.
class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    uint64_t next_u64() {
        uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, n). Lemire multiply-shift; bias < 2^-64 is
    // irrelevant at the sample counts used here.
    uint64_t below(uint64_t n) {
        return static_cast<uint64_t>((static_cast<__uint128_t>(next_u64()) * n) >> 64);
    }

    // Box-Muller; deterministic given the stream position.
    double normal(double mean = 0.0, double stddev = 1.0);

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            size_t j = static_cast<size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    uint64_t state_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

// Derives an independent child seed from a root seed and a stream name.
// Adding a new named consumer never perturbs the draws of existing ones.
uint64_t derive_seed(uint64_t root, std::string_view stream);

}  // namespace lhnfc
