#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace hat::rng {

// splitmix64; used to derive independent stream seeds from (seed, name).
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t hash_name(std::string_view name) {
    std::uint64_t h = 0xcbf29ce484222325ULL; // FNV-1a
    for (unsigned char c : name) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

// A named deterministic random stream. The mt19937_64 engine output is fixed
// by the standard; the distribution code below is ours, so sequences are
// identical across standard libraries.
class Stream {
public:
    Stream() : engine_(0) {}
    explicit Stream(std::uint64_t seed) : engine_(mix64(seed)) {}
    Stream(std::uint64_t seed, std::string_view name)
        : engine_(mix64(seed ^ hash_name(name))) {}

    std::uint64_t bits() { return engine_(); }

    // Uniform in [0, 1) with 53-bit resolution.
    double uniform01() { return static_cast<double>(bits() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Uniform integer in [0, n). n must be > 0.
    std::uint64_t below(std::uint64_t n) {
        // multiply-shift; bias < 2^-64, irrelevant at our scales
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(bits()) * n) >> 64);
    }

    int int_in(int lo, int hi) { // inclusive bounds
        return lo + static_cast<int>(below(static_cast<std::uint64_t>(hi - lo + 1)));
    }

    // Box–Muller, one value per call (the pair's second half is discarded to
    // keep the draw count independent of call sites).
    double normal(double mean = 0.0, double stddev = 1.0) {
        double u1 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        double u2 = uniform01();
        double r = std::sqrt(-2.0 * std::log(u1));
        return mean + stddev * r * std::cos(6.283185307179586476925286766559 * u2);
    }

    template <typename T>
    void shuffle(std::vector<T>& v) { // Fisher–Yates
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    // k distinct indices from [0, n), in random order.
    std::vector<int> sample_without_replacement(int n, int k) {
        std::vector<int> ids(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) ids[static_cast<std::size_t>(i)] = i;
        shuffle(ids);
        ids.resize(static_cast<std::size_t>(k < n ? k : n));
        return ids;
    }

private:
    std::mt19937_64 engine_;
};

} // namespace hat::rng
