#pragma once

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

namespace subjidx {

/// Sparse vector: (index, value) pairs sorted by index, indices unique.
struct SparseVec {
    std::vector<std::pair<std::uint32_t, double>> entries;

    bool empty() const { return entries.empty(); }
    std::size_t nnz() const { return entries.size(); }
};

inline double dot(const SparseVec& a, const SparseVec& b) {
    double s = 0.0;
    auto ia = a.entries.begin();
    auto ib = b.entries.begin();
    while (ia != a.entries.end() && ib != b.entries.end()) {
        if (ia->first < ib->first) {
            ++ia;
        } else if (ib->first < ia->first) {
            ++ib;
        } else {
            s += ia->second * ib->second;
            ++ia;
            ++ib;
        }
    }
    return s;
}

inline double dot(const SparseVec& a, const std::vector<double>& dense) {
    double s = 0.0;
    for (const auto& [i, v] : a.entries) {
        if (i < dense.size()) s += v * dense[i];
    }
    return s;
}

/// acc += scale * v, with acc a dense vector covering all indices of v.
inline void add_scaled(std::vector<double>& acc, const SparseVec& v, double scale) {
    for (const auto& [i, x] : v.entries) acc[i] += scale * x;
}

inline double l2_norm(const SparseVec& v) {
    double s = 0.0;
    for (const auto& [i, x] : v.entries) s += x * x;
    return std::sqrt(s);
}

/// Scales v to unit L2 norm; zero vectors are left unchanged.
inline void l2_normalize(SparseVec& v) {
    double n = l2_norm(v);
    if (n == 0.0) return;
    for (auto& [i, x] : v.entries) x /= n;
}

}  // namespace subjidx
