#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "subjidx/corpus.hpp"
#include "subjidx/run_io.hpp"

namespace subjidx {

struct HyperoptTrial {
    std::vector<double> weights;
    double score = 0.0;  // mean nDCG@10 on the development set
};

struct HyperoptResult {
    std::vector<double> weights;
    double best_score = 0.0;
    std::size_t best_trial = 0;  // 1-based trial number
};

/// Seeded random search over the weight simplex: each trial draws weights
/// uniformly (normalized exponential draws), fuses the cached member lists by
/// weighted average, and scores mean nDCG@10 against the development gold.
/// The first trial reaching the best score wins ties. Deterministic per seed.
HyperoptResult optimize_weights(
    const std::vector<Run>& member_runs, const Corpus& dev, int trials, std::uint64_t seed,
    const std::function<void(std::size_t, const HyperoptTrial&)>& on_trial = nullptr);

}  // namespace subjidx
