#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "subjidx/corpus.hpp"
#include "subjidx/run_io.hpp"
#include "subjidx/suggestion.hpp"

namespace subjidx {

/// Candidate pool per member when fusing: the member's top-100 suggestions.
inline constexpr std::size_t kMemberPoolLimit = 100;

/// Checks nonnegative weights summing to 1 within 1e-9; throws
/// SimplexViolationError otherwise.
void check_simplex(const std::vector<double>& weights);

/// Weighted average of member scores; a subject missing from a member scores
/// 0 for it. Sorted descending with id tiebreak and truncated.
SuggestionList weighted_average(const std::vector<SuggestionList>& lists,
                                const std::vector<double>& weights, std::size_t limit);

/// Sums per-subject scores of two monolingual runs for the same document and
/// keeps the top `limit`. Scores are intentionally not renormalized, so the
/// result may exceed 1.
SuggestionList merge_multilingual(const SuggestionList& run_de, const SuggestionList& run_en,
                                  std::size_t limit = 50);

struct NeuralAdjusterConfig {
    int hidden_units = 100;
    double learning_rate = 0.01;
    int epochs = 10;
    std::uint64_t seed = 42;
};

/// Shared per-subject scoring network: one input per member backend (missing
/// scores are 0), one rectified hidden layer, a single sigmoid output. The
/// same weights apply to every subject.
struct NeuralAdjuster {
    NeuralAdjusterConfig config;
    std::size_t member_count = 0;
    std::vector<double> w1;  // hidden_units x member_count, row-major
    std::vector<double> b1;  // hidden_units
    std::vector<double> w2;  // hidden_units
    double b2 = 0.0;
    std::vector<double> epoch_losses;  // [0] = loss before training

    /// Network output in (0,1) for one subject's member scores.
    double forward(const std::vector<double>& member_scores) const;

    nlohmann::json to_json() const;
    static NeuralAdjuster from_json(const nlohmann::json& j);
};

/// Flat parameter gradient in the order w1, b1, w2, b2; used by training and
/// by finite-difference checks.
struct AdjusterGradient {
    std::vector<double> w1;
    std::vector<double> b1;
    std::vector<double> w2;
    double b2 = 0.0;
};

NeuralAdjuster init_adjuster(const NeuralAdjusterConfig& config, std::size_t member_count);

/// Binary cross-entropy of forward(x) against target y.
double adjuster_loss(const NeuralAdjuster& a, const std::vector<double>& x, double y);

/// Analytic gradient of adjuster_loss for one example.
AdjusterGradient adjuster_gradient(const NeuralAdjuster& a, const std::vector<double>& x, double y);

/// Trains the adjuster on a development corpus: per document, the candidate
/// set is the union of the members' lists; targets are gold membership; one
/// SGD step per document (mean gradient over its candidates), `epochs`
/// passes in corpus order. Deterministic for a fixed seed.
NeuralAdjuster train_neural(const NeuralAdjusterConfig& config,
                            const std::vector<Run>& member_runs, const Corpus& dev);

/// Rescoring: the candidate union of the member lists, each candidate scored
/// by the network over its per-member scores.
SuggestionList suggest_neural(const NeuralAdjuster& adjuster,
                              const std::vector<SuggestionList>& member_lists, std::size_t limit);

}  // namespace subjidx
