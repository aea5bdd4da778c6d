#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace sketchsql {

inline uint64_t fnv1a64(std::string_view s) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Every random stage in a run draws from a generator derived from the single
// top-level seed plus the stage name, so one seed pins a whole experiment.
inline uint64_t derive_seed(uint64_t seed, std::string_view stage) {
    uint64_t state = seed ^ fnv1a64(stage);
    return splitmix64(state);
}

// Deterministic generator with portable bounded sampling (standard
// distributions are not bit-stable across library implementations).
class rng {
public:
    explicit rng(uint64_t seed) : state_(seed) {
        // scramble so that small seeds do not start in a similar region
        next();
        next();
    }

    static rng for_stage(uint64_t seed, std::string_view stage) {
        return rng(derive_seed(seed, stage));
    }

    uint64_t next() { return splitmix64(state_); }

    // uniform in [0, bound)
    uint64_t next_below(uint64_t bound) {
        if (bound <= 1) return 0;
        // rejection sampling to avoid modulo bias
        uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        uint64_t x = next();
        while (x >= limit) x = next();
        return x % bound;
    }

    size_t index(size_t n) { return static_cast<size_t>(next_below(n)); }

    // uniform in [0, 1)
    double real() { return double(next() >> 11) * 0x1.0p-53; }

    // uniform in [lo, hi]
    int64_t range(int64_t lo, int64_t hi) {
        return lo + int64_t(next_below(uint64_t(hi - lo + 1)));
    }

    bool chance(double p) { return real() < p; }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            size_t j = index(i);
            using std::swap;
            swap(v[i - 1], v[j]);
        }
    }

    // k distinct indices out of n, in draw order
    std::vector<size_t> sample_without_replacement(size_t n, size_t k) {
        std::vector<size_t> pool(n);
        for (size_t i = 0; i < n; ++i) pool[i] = i;
        shuffle(pool);
        if (k < n) pool.resize(k);
        return pool;
    }

private:
    uint64_t state_;
};

} // namespace sketchsql
