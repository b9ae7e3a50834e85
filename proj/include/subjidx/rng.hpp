#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace subjidx {

/// FNV-1a hash, used to derive per-item seed salts from string ids.
inline std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

/// splitmix64 finalizer; combines a base seed with a salt into a new seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

/// Deterministic random source. Wraps std::mt19937_64 (whose output sequence
/// is fixed by the standard) and implements all derived draws by hand so the
/// same seed produces the same values on every platform and stdlib.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform double in [0, 1).
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform index in {0, ..., n-1}; n must be > 0.
    std::size_t next_index(std::size_t n) { return static_cast<std::size_t>(next_u64() % n); }

    /// In-place Fisher-Yates shuffle.
    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = next_index(i);
            std::swap(v[i - 1], v[j]);
        }
    }

    /// Uniform draw from the (n-1)-simplex via normalized exponential draws.
    std::vector<double> simplex(std::size_t n) {
        std::vector<double> w(n);
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            w[i] = -std::log(1.0 - next_double());
            sum += w[i];
        }
        for (double& x : w) x /= sum;
        return w;
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace subjidx
