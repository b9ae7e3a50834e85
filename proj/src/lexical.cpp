#include "subjidx/lexical.hpp"

#include <algorithm>

#include <nlohmann/json.hpp>

#include "subjidx/errors.hpp"

namespace subjidx {

namespace {

struct Occurrence {
    std::size_t position;
    std::size_t label_tokens;
    bool is_pref;
};

void check_vocab_normalization(const SubjectVocabulary& vocab, const AnalyzerConfig& analyzer,
                               const std::string& language) {
    AnalyzerConfig expected = vocab.normalization();
    expected.language = language;
    AnalyzerConfig got = analyzer;
    got.language = language;
    if (!same_normalization(expected, got))
        throw ConfigError(
            "analyzer normalization does not match the vocabulary's label index; "
            "load the vocabulary with the same normalizer and min_token_len");
}

}  // namespace

SparseVec candidate_feature_vector(const CandidateFeatures& f) {
    SparseVec x;
    x.entries = {{0, static_cast<double>(f.match_count)},
                 {1, f.first_position},
                 {2, f.spread},
                 {3, f.is_pref_label ? 1.0 : 0.0},
                 {4, static_cast<double>(f.label_token_len)},
                 {5, f.subject_prior}};
    return x;
}

double LexicalModel::score(const CandidateFeatures& f) const {
    return scorer.predict(candidate_feature_vector(f));
}

std::vector<Candidate> generate_candidates(std::string_view text, const SubjectVocabulary& vocab,
                                           const std::string& language) {
    const auto& index = vocab.label_index(language);
    std::vector<Candidate> out;
    if (index.empty()) return out;

    AnalyzerConfig cfg = vocab.normalization();
    cfg.language = language;
    const std::vector<std::string> tokens = tokenize(text, cfg);
    if (tokens.empty()) return out;

    const std::size_t n = tokens.size();
    const std::size_t max_len = std::min(vocab.max_label_tokens(language), n);

    // All label occurrences, grouped per subject.
    std::map<std::string, std::vector<Occurrence>> matches;
    for (std::size_t i = 0; i < n; ++i) {
        std::string phrase;
        for (std::size_t len = 1; len <= max_len && i + len <= n; ++len) {
            if (len > 1) phrase.push_back(' ');
            phrase += tokens[i + len - 1];
            auto it = index.find(phrase);
            if (it == index.end()) continue;
            for (const std::string& id : it->second) {
                const std::string* pref = vocab.normalized_pref(language, id);
                matches[id].push_back({i, len, pref != nullptr && *pref == phrase});
            }
        }
    }

    const double doc_len = static_cast<double>(n);
    for (auto& [id, occurrences] : matches) {
        // Best occurrence: preferred label first, then earliest, then longest.
        const Occurrence* best = &occurrences.front();
        std::size_t first = occurrences.front().position;
        std::size_t last = occurrences.front().position;
        for (const Occurrence& occ : occurrences) {
            first = std::min(first, occ.position);
            last = std::max(last, occ.position);
            if (std::tuple(!occ.is_pref, occ.position, -static_cast<long>(occ.label_tokens)) <
                std::tuple(!best->is_pref, best->position, -static_cast<long>(best->label_tokens)))
                best = &occ;
        }
        CandidateFeatures f;
        f.match_count = static_cast<int>(occurrences.size());
        f.first_position = static_cast<double>(first) / doc_len;
        f.spread = static_cast<double>(last - first) / doc_len;
        f.is_pref_label = best->is_pref;
        f.label_token_len = static_cast<int>(best->label_tokens);
        out.push_back({id, f});
    }
    return out;
}

LexicalModel train_lexical(const Corpus& corpus, const SubjectVocabulary& vocab,
                           const std::string& language, const AnalyzerConfig& analyzer,
                           std::uint64_t seed) {
    check_vocab_normalization(vocab, analyzer, language);

    LexicalModel model;
    model.analyzer = analyzer;
    model.analyzer.language = language;

    // Prior = fraction of records whose gold set contains the subject.
    const double total = static_cast<double>(corpus.size());
    for (const DocumentRecord& rec : corpus.records) {
        for (const std::string& id : rec.subjects) {
            if (vocab.contains(id)) model.subject_prior[id] += 1.0;
        }
    }
    for (auto& [id, count] : model.subject_prior) count /= total;

    std::vector<LogisticExample> examples;
    for (const DocumentRecord& rec : corpus.records) {
        std::vector<Candidate> candidates =
            generate_candidates(document_text(rec), vocab, language);
        for (Candidate& c : candidates) {
            auto prior = model.subject_prior.find(c.subject_id);
            c.features.subject_prior = prior == model.subject_prior.end() ? 0.0 : prior->second;
            examples.push_back(
                {candidate_feature_vector(c.features), rec.subjects.count(c.subject_id) ? 1.0 : 0.0});
        }
    }
    if (examples.empty())
        throw NoTrainingSignalError("no vocabulary label occurs in any training document");

    LogisticOptions options;
    options.seed = seed;
    model.scorer = train_logistic(examples, 6, options);
    return model;
}

SuggestionList suggest_lexical(const LexicalModel& model, std::string_view text,
                               const SubjectVocabulary& vocab, const std::string& language,
                               std::size_t limit) {
    check_vocab_normalization(vocab, model.analyzer, language);
    std::vector<Candidate> candidates = generate_candidates(text, vocab, language);
    std::vector<Suggestion> scored;
    scored.reserve(candidates.size());
    for (Candidate& c : candidates) {
        auto prior = model.subject_prior.find(c.subject_id);
        c.features.subject_prior = prior == model.subject_prior.end() ? 0.0 : prior->second;
        scored.push_back({std::move(c.subject_id), model.score(c.features)});
    }
    return SuggestionList::ranked(std::move(scored), "lexical", limit);
}

nlohmann::json LexicalModel::to_json() const {
    return nlohmann::json{{"kind", "lexical"},
                          {"weights", scorer.weights},
                          {"bias", scorer.bias},
                          {"analyzer",
                           {{"language", analyzer.language},
                            {"normalizer", to_string(analyzer.normalizer)},
                            {"min_token_len", analyzer.min_token_len},
                            {"ngram", analyzer.ngram},
                            {"min_df", analyzer.min_df}}},
                          {"subject_prior", subject_prior}};
}

LexicalModel LexicalModel::from_json(const nlohmann::json& j) {
    if (j.value("kind", "") != std::string("lexical"))
        throw ParseError("expected a lexical model");
    LexicalModel m;
    m.scorer.weights = j.at("weights").get<std::vector<double>>();
    m.scorer.bias = j.at("bias").get<double>();
    const auto& a = j.at("analyzer");
    m.analyzer.language = a.at("language").get<std::string>();
    m.analyzer.normalizer = normalizer_from_string(a.at("normalizer").get<std::string>());
    m.analyzer.min_token_len = a.at("min_token_len").get<int>();
    m.analyzer.ngram = a.at("ngram").get<int>();
    m.analyzer.min_df = a.at("min_df").get<int>();
    m.subject_prior = j.at("subject_prior").get<std::map<std::string, double>>();
    return m;
}

}  // namespace subjidx
