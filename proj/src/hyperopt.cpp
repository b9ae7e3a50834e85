#include "subjidx/hyperopt.hpp"

#include "subjidx/ensemble.hpp"
#include "subjidx/errors.hpp"
#include "subjidx/evaluation.hpp"
#include "subjidx/rng.hpp"

namespace subjidx {

HyperoptResult optimize_weights(
    const std::vector<Run>& member_runs, const Corpus& dev, int trials, std::uint64_t seed,
    const std::function<void(std::size_t, const HyperoptTrial&)>& on_trial) {
    if (member_runs.size() < 2) throw ValidationError("optimize_weights: need at least 2 members");
    if (trials < 1) throw ValidationError("optimize_weights: trials must be >= 1");
    if (dev.empty()) throw ValidationError("optimize_weights: empty development corpus");

    // Member lists are fixed across trials; cache them per document.
    static const SuggestionList kEmpty;
    std::vector<std::vector<const SuggestionList*>> doc_lists(dev.size());
    for (std::size_t d = 0; d < dev.size(); ++d) {
        doc_lists[d].reserve(member_runs.size());
        for (const Run& run : member_runs) {
            auto it = run.find(dev.records[d].id);
            doc_lists[d].push_back(it == run.end() ? &kEmpty : &it->second);
        }
    }

    Rng rng(seed);
    HyperoptResult best;
    best.best_score = -1.0;

    for (int t = 0; t < trials; ++t) {
        HyperoptTrial trial;
        trial.weights = rng.simplex(member_runs.size());

        double sum = 0.0;
        for (std::size_t d = 0; d < dev.size(); ++d) {
            std::vector<SuggestionList> lists;
            lists.reserve(doc_lists[d].size());
            for (const SuggestionList* l : doc_lists[d]) lists.push_back(*l);
            SuggestionList fused = weighted_average(lists, trial.weights, 10);
            sum += ndcg_at_k(fused, dev.records[d].subjects, 10);
        }
        trial.score = sum / static_cast<double>(dev.size());

        if (on_trial) on_trial(static_cast<std::size_t>(t) + 1, trial);
        if (trial.score > best.best_score) {
            best.best_score = trial.score;
            best.weights = trial.weights;
            best.best_trial = static_cast<std::size_t>(t) + 1;
        }
    }
    return best;
}

}  // namespace subjidx
