#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "subjidx/corpus.hpp"
#include "subjidx/run_io.hpp"
#include "subjidx/suggestion.hpp"

namespace subjidx {

/// P = hits / min(k, |pred|) with empty predictions scoring 0. A system that
/// returns fewer than k items is not penalized for the absent slots.
double precision_at_k(const SuggestionList& pred, const std::set<std::string>& gold,
                      std::size_t k);

/// R = hits / |gold| with empty gold scoring 0.
double recall_at_k(const SuggestionList& pred, const std::set<std::string>& gold, std::size_t k);

/// Harmonic mean of precision_at_k and recall_at_k; 0 when both are 0.
double f1_at_k(const SuggestionList& pred, const std::set<std::string>& gold, std::size_t k);

/// Binary-relevance nDCG with log2(i+1) discounts; 0 when gold is empty.
double ndcg_at_k(const SuggestionList& pred, const std::set<std::string>& gold, std::size_t k);

/// Per-metric sample averages over a document set.
struct EvaluationReport {
    std::map<std::string, double> per_metric;
    std::vector<int> thresholds;
    std::size_t n_documents = 0;
};

/// {5, 10, ..., 50}
std::vector<int> default_thresholds();

/// Sample-averaged metrics over every document of the gold corpus: F1@5,
/// nDCG@10, P/R/F1 at each threshold, and average recall (mean of recall@k
/// over the thresholds). A gold document missing from the run counts as an
/// empty prediction. Throws on an empty gold corpus.
EvaluationReport evaluate_run(const Run& run, const Corpus& gold,
                              const std::vector<int>& thresholds = default_thresholds());

std::string format_report_table(const EvaluationReport& report);
nlohmann::json report_to_json(const EvaluationReport& report);

}  // namespace subjidx
