#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "subjidx/sparse.hpp"

namespace subjidx {

enum class Normalizer { lowercase_only, suffix_stemmer };

std::string to_string(Normalizer n);
Normalizer normalizer_from_string(std::string_view s);

/// Text-processing settings shared by vocabulary indexing and both backends.
struct AnalyzerConfig {
    std::string language = "en";
    Normalizer normalizer = Normalizer::lowercase_only;
    int min_token_len = 3;
    int ngram = 1;  // 1 or 2
    int min_df = 1;

    void validate() const;  // throws ConfigError
    bool operator==(const AnalyzerConfig&) const = default;
};

/// True when two configs normalize tokens identically (language, normalizer
/// and token length agree; ngram/min_df are vectorizer-only settings).
bool same_normalization(const AnalyzerConfig& a, const AnalyzerConfig& b);

/// Splits text into word-character runs, case-folds them (ASCII + Latin-1),
/// drops tokens shorter than min_token_len or without a letter, then applies
/// the configured normalizer. Deterministic and idempotent on its own output.
std::vector<std::string> tokenize(std::string_view text, const AnalyzerConfig& config);

/// Tokenizes a label and joins the tokens with single spaces. Empty when no
/// token survives.
std::string normalize_label(std::string_view label, const AnalyzerConfig& config);

/// Unigram (and, with ngram=2, adjacent-bigram) features of a text. Bigrams
/// never cross line boundaries, so title/abstract fields stay separate.
std::vector<std::string> extract_features(std::string_view text, const AnalyzerConfig& config);

/// TF-IDF vectorizer over the feature space defined by extract_features.
class Vectorizer {
public:
    Vectorizer() = default;

    /// Builds the feature space from the corpus: features kept when they occur
    /// in at least min_df documents, idf(f) = ln((1+N)/(1+df(f))) + 1.
    /// Throws EmptyFeatureSpaceError when nothing survives.
    static Vectorizer fit(const std::vector<std::string>& corpus_texts,
                          const AnalyzerConfig& config);

    /// Raw term counts times idf, L2-normalized. Unknown features are ignored;
    /// an all-unknown text yields the zero vector.
    SparseVec transform(std::string_view text) const;

    const AnalyzerConfig& config() const { return config_; }
    std::size_t feature_count() const { return idf_.size(); }
    const std::unordered_map<std::string, std::uint32_t>& vocabulary_map() const {
        return vocabulary_map_;
    }
    const std::vector<double>& idf() const { return idf_; }

    nlohmann::json to_json() const;
    static Vectorizer from_json(const nlohmann::json& j);

private:
    AnalyzerConfig config_;
    std::unordered_map<std::string, std::uint32_t> vocabulary_map_;
    std::vector<double> idf_;  // indexed by column
};

}  // namespace subjidx
