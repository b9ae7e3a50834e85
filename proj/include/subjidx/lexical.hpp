#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "subjidx/analyzer.hpp"
#include "subjidx/corpus.hpp"
#include "subjidx/logreg.hpp"
#include "subjidx/suggestion.hpp"
#include "subjidx/vocabulary.hpp"

namespace subjidx {

/// Heuristic features of one vocabulary-label match inside a document.
struct CandidateFeatures {
    int match_count = 0;        // label occurrences in the document, >= 1
    double first_position = 0;  // token offset of first match / document tokens
    double spread = 0;          // (last match - first match) / document tokens
    bool is_pref_label = false;
    int label_token_len = 0;    // tokens in the matched label, >= 1
    double subject_prior = 0;   // training-set frequency of the subject
};

struct Candidate {
    std::string subject_id;
    CandidateFeatures features;
};

/// Lexical matching model: a logistic scorer over the six candidate features
/// plus the per-subject prior table gathered at training time.
struct LexicalModel {
    LogisticModel scorer;  // 6 weights + bias
    AnalyzerConfig analyzer;
    std::map<std::string, double> subject_prior;

    double score(const CandidateFeatures& f) const;

    nlohmann::json to_json() const;
    static LexicalModel from_json(const nlohmann::json& j);
};

/// Feature vector layout used by the scorer, exposed for gradient checks.
SparseVec candidate_feature_vector(const CandidateFeatures& f);

/// One candidate per subject whose normalized preferred or alternate label
/// occurs as a contiguous token subsequence of the document (under the
/// vocabulary's own normalization). Occurrences of all of a subject's labels
/// aggregate into one candidate; the label-specific fields come from the best
/// match (preferred over alternate, then earliest). subject_prior is 0 here.
std::vector<Candidate> generate_candidates(std::string_view text, const SubjectVocabulary& vocab,
                                           const std::string& language);

/// Trains the logistic scorer on candidates from every record: label 1 when
/// the candidate subject is in the record's gold set. Deterministic per seed.
/// Throws NoTrainingSignalError when no record yields any candidate.
LexicalModel train_lexical(const Corpus& corpus, const SubjectVocabulary& vocab,
                           const std::string& language, const AnalyzerConfig& analyzer,
                           std::uint64_t seed = 42);

/// Scores candidates with the trained model, sorted descending with id
/// tiebreak and truncated to limit.
SuggestionList suggest_lexical(const LexicalModel& model, std::string_view text,
                               const SubjectVocabulary& vocab, const std::string& language,
                               std::size_t limit);

}  // namespace subjidx
