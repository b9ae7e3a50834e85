#include <doctest.h>

#include <random>

#include <nlohmann/json.hpp>

#include "subjidx/analyzer.hpp"
#include "subjidx/errors.hpp"

using namespace subjidx;

namespace {

AnalyzerConfig cfg(std::string lang = "en", Normalizer norm = Normalizer::lowercase_only,
                   int min_len = 3, int ngram = 1, int min_df = 1) {
    return {std::move(lang), norm, min_len, ngram, min_df};
}

std::string join(const std::vector<std::string>& tokens) {
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i) out.push_back(' ');
        out += tokens[i];
    }
    return out;
}

}  // namespace

TEST_CASE("tokenize: basic word runs, case folding, length filter") {
    CHECK(tokenize("Climate-Change affects us", cfg()) ==
          std::vector<std::string>{"climate", "change", "affects"});
    CHECK(tokenize("", cfg()).empty());
    // "AI" too short, "in" too short, "2024" has no letter
    CHECK(tokenize("AI in 2024", cfg()).empty());
}

TEST_CASE("tokenize: latin-1 folding and umlauts") {
    CHECK(tokenize("Über ÄPFEL", cfg("de")) == std::vector<std::string>{"über", "äpfel"});
    // mixed digit/letter tokens survive the letters-required rule
    CHECK(tokenize("ipv6 2024", cfg()) == std::vector<std::string>{"ipv6"});
}

TEST_CASE("tokenize: suffix stemmer") {
    AnalyzerConfig en = cfg("en", Normalizer::suffix_stemmer);
    CHECK(tokenize("changes", en) == std::vector<std::string>{"chang"});
    CHECK(tokenize("running", en) == std::vector<std::string>{"runn"});
    CHECK(tokenize("glass", en) == std::vector<std::string>{"glass"});  // ss guard
    AnalyzerConfig de = cfg("de", Normalizer::suffix_stemmer);
    CHECK(tokenize("Familien", de) == std::vector<std::string>{"famili"});
}

TEST_CASE("tokenize: idempotent on its own output") {
    std::mt19937 gen(7);
    const std::string alphabet = "abcdefghij AEIOU-.,;09";
    const std::vector<std::string> extras = {"ä", "Ö", "ü", "ß", "É"};
    for (int trial = 0; trial < 200; ++trial) {
        std::string text;
        for (int i = 0; i < 60; ++i) {
            if (gen() % 8 == 0) text += extras[gen() % extras.size()];
            else text.push_back(alphabet[gen() % alphabet.size()]);
        }
        for (const char* lang : {"en", "de"}) {
            for (Normalizer norm : {Normalizer::lowercase_only, Normalizer::suffix_stemmer}) {
                for (int min_len : {1, 3, 4}) {
                    AnalyzerConfig c = cfg(lang, norm, min_len);
                    std::vector<std::string> once = tokenize(text, c);
                    CHECK(tokenize(join(once), c) == once);
                }
            }
        }
    }
}

TEST_CASE("fit_vectorizer: smoothed idf value") {
    Vectorizer v = Vectorizer::fit({"alpha beta", "alpha gamma", "delta"}, cfg("en", Normalizer::lowercase_only, 3, 1, 2));
    auto it = v.vocabulary_map().find("alpha");
    REQUIRE(it != v.vocabulary_map().end());
    CHECK(v.idf()[it->second] == doctest::Approx(1.2876820724517808).epsilon(1e-12));
    // only "alpha" reaches min_df=2
    CHECK(v.feature_count() == 1);
}

TEST_CASE("fit_vectorizer: unigrams and bigrams with min_token_len=1") {
    Vectorizer v = Vectorizer::fit({"a b"}, cfg("en", Normalizer::lowercase_only, 1, 2, 1));
    CHECK(v.feature_count() == 3);
    CHECK(v.vocabulary_map().count("a") == 1);
    CHECK(v.vocabulary_map().count("b") == 1);
    CHECK(v.vocabulary_map().count("a b") == 1);
}

TEST_CASE("fit_vectorizer: bigrams do not cross line boundaries") {
    AnalyzerConfig c = cfg("en", Normalizer::lowercase_only, 1, 2, 1);
    Vectorizer same_line = Vectorizer::fit({"x y"}, c);
    CHECK(same_line.vocabulary_map().count("x y") == 1);
    Vectorizer split_lines = Vectorizer::fit({"x\ny"}, c);
    CHECK(split_lines.vocabulary_map().count("x y") == 0);
}

TEST_CASE("fit_vectorizer: min_df filtering everything is an error") {
    CHECK_THROWS_AS(Vectorizer::fit({"one", "two", "three"}, cfg("en", Normalizer::lowercase_only, 3, 1, 5)),
                    EmptyFeatureSpaceError);
    CHECK_THROWS_AS(Vectorizer::fit({}, cfg()), EmptyFeatureSpaceError);
}

TEST_CASE("transform: zero vector for unknown text, unit vectors otherwise") {
    Vectorizer v = Vectorizer::fit({"alpha beta", "alpha"}, cfg());
    CHECK(v.transform("unknown words only").empty());

    SparseVec one = v.transform("beta");
    REQUIRE(one.nnz() == 1);
    CHECK(one.entries[0].second == doctest::Approx(1.0));

    // two features, equal counts, equal idf -> both 1/sqrt(2)
    Vectorizer v2 = Vectorizer::fit({"alpha beta", "alpha beta"}, cfg());
    SparseVec two = v2.transform("alpha beta");
    REQUIRE(two.nnz() == 2);
    CHECK(two.entries[0].second == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
    CHECK(two.entries[1].second == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("transform: L2 norm is 0 or 1; features always known") {
    std::mt19937 gen(11);
    std::vector<std::string> words = {"apple", "berry", "cedar", "dune", "ember", "frost"};
    std::vector<std::string> docs;
    for (int d = 0; d < 12; ++d) {
        std::string text;
        for (int i = 0; i < 8; ++i) text += words[gen() % words.size()] + " ";
        docs.push_back(text);
    }
    AnalyzerConfig c = cfg("en", Normalizer::lowercase_only, 3, 2, 2);
    Vectorizer v = Vectorizer::fit(docs, c);
    for (const std::string& doc : docs) {
        SparseVec x = v.transform(doc);
        double norm = l2_norm(x);
        CHECK((norm == 0.0 || std::abs(norm - 1.0) < 1e-9));
        for (const auto& [index, value] : x.entries) CHECK(index < v.feature_count());
    }
}

TEST_CASE("vectorizer: JSON round-trip preserves transforms") {
    Vectorizer v = Vectorizer::fit({"alpha beta gamma", "beta gamma", "gamma delta"},
                                   cfg("en", Normalizer::suffix_stemmer, 3, 2, 1));
    Vectorizer back = Vectorizer::from_json(v.to_json());
    CHECK(back.feature_count() == v.feature_count());
    SparseVec a = v.transform("alpha gamma delta");
    SparseVec b = back.transform("alpha gamma delta");
    REQUIRE(a.nnz() == b.nnz());
    for (std::size_t i = 0; i < a.nnz(); ++i) {
        CHECK(a.entries[i].first == b.entries[i].first);
        CHECK(a.entries[i].second == doctest::Approx(b.entries[i].second).epsilon(1e-15));
    }
}

TEST_CASE("analyzer config validation") {
    AnalyzerConfig bad = cfg();
    bad.ngram = 3;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = cfg();
    bad.min_token_len = 0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = cfg();
    bad.language = "fr";
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}
