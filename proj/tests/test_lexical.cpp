#include <doctest.h>

#include <random>

#include <nlohmann/json.hpp>

#include "helpers.hpp"
#include "subjidx/errors.hpp"
#include "subjidx/lexical.hpp"

using namespace subjidx;
using testutil::TempDir;
using testutil::write_file;

namespace {

SubjectVocabulary vocab_from_tsv(const std::string& tsv) {
    TempDir dir;
    write_file(dir.file("v.tsv"), tsv);
    return load_vocabulary_tsv(dir.file("v.tsv"), "all");
}

const Candidate* find_candidate(const std::vector<Candidate>& cs, const std::string& id) {
    for (const Candidate& c : cs)
        if (c.subject_id == id) return &c;
    return nullptr;
}

}  // namespace

TEST_CASE("generate_candidates: planted multi-token label") {
    SubjectVocabulary v = vocab_from_tsv("gnd:1\tKlimawandel\tclimate change\n");
    auto candidates = generate_candidates("Climate change is real", v, "en");
    REQUIRE(candidates.size() == 1);
    CHECK(candidates[0].subject_id == "gnd:1");
    CHECK(candidates[0].features.match_count == 1);
    CHECK(candidates[0].features.first_position == 0.0);
    CHECK(candidates[0].features.is_pref_label);
    CHECK(candidates[0].features.label_token_len == 2);
    CHECK(candidates[0].features.subject_prior == 0.0);
}

TEST_CASE("generate_candidates: no occurrences, empty text") {
    SubjectVocabulary v = vocab_from_tsv("gnd:1\tKlimawandel\tclimate change\n");
    CHECK(generate_candidates("nothing matches here", v, "en").empty());
    CHECK(generate_candidates("", v, "en").empty());
}

TEST_CASE("generate_candidates: repeated label at offsets 0 and 8 of 10 tokens") {
    SubjectVocabulary v = vocab_from_tsv("gnd:1\tWort\tsolar\n");
    // tokens: solar word word word word word word word solar word  (10 tokens)
    std::string doc = "solar woo wot wox woy woz wou wov solar wow";
    auto candidates = generate_candidates(doc, v, "en");
    REQUIRE(candidates.size() == 1);
    CHECK(candidates[0].features.match_count == 2);
    CHECK(candidates[0].features.first_position == doctest::Approx(0.0));
    CHECK(candidates[0].features.spread == doctest::Approx(0.8));
}

TEST_CASE("generate_candidates: preferred label wins over alternate") {
    SubjectVocabulary v = vocab_from_tsv("gnd:1\tWort\tsolar power\tW\twind turbine\n");
    auto candidates = generate_candidates("wind turbine and solar power", v, "en");
    REQUIRE(candidates.size() == 1);  // one subject, one candidate
    CHECK(candidates[0].features.match_count == 2);
    CHECK(candidates[0].features.is_pref_label);       // some match is the pref label
    CHECK(candidates[0].features.label_token_len == 2);
}

TEST_CASE("train_lexical: planted separable corpus scores planted candidates above 0.5") {
    std::string tsv;
    for (int i = 0; i < 6; ++i)
        tsv += "gnd:" + std::to_string(i) + "\tWort" + std::to_string(i) + "\tlabeltoken" +
               std::to_string(i) + "\n";
    SubjectVocabulary v = vocab_from_tsv(tsv);

    Corpus corpus;
    for (int d = 0; d < 24; ++d) {
        int subject = d % 6;
        DocumentRecord r = testutil::make_record(
            "d" + std::to_string(d), "en", "About labeltoken" + std::to_string(subject),
            "filler text without other labels");
        r.subjects = {"gnd:" + std::to_string(subject)};
        corpus.records.push_back(std::move(r));
    }
    LexicalModel model = train_lexical(corpus, v, "en", v.normalization(), 42);
    for (const DocumentRecord& rec : corpus.records) {
        SuggestionList out = suggest_lexical(model, document_text(rec), v, "en", 10);
        REQUIRE(out.size() == 1);
        CHECK(out.items[0].score > 0.5);
    }
}

TEST_CASE("train_lexical: no candidates anywhere -> NoTrainingSignal") {
    SubjectVocabulary v = vocab_from_tsv("gnd:1\tWort\tabsentlabel\n");
    Corpus corpus;
    DocumentRecord r = testutil::make_record("d1", "en", "nothing to see");
    r.subjects = {"gnd:1"};
    corpus.records.push_back(r);
    CHECK_THROWS_AS(train_lexical(corpus, v, "en", v.normalization(), 42), NoTrainingSignalError);
}

TEST_CASE("train_lexical: single-document corpus trains") {
    SubjectVocabulary v = vocab_from_tsv("gnd:1\tWort\tsolar\n");
    Corpus corpus;
    DocumentRecord r = testutil::make_record("d1", "en", "solar study");
    r.subjects = {"gnd:1"};
    corpus.records.push_back(r);
    LexicalModel model = train_lexical(corpus, v, "en", v.normalization(), 42);
    CHECK(model.scorer.weights.size() == 6);
}

TEST_CASE("suggest_lexical: limit and shared-label ties") {
    // two subjects share the same preferred label text
    SubjectVocabulary v = vocab_from_tsv(
        "gnd:a\tWort\tshared label\n"
        "gnd:b\tWort\tshared label\n");
    Corpus corpus;
    DocumentRecord r = testutil::make_record("d1", "en", "shared label here");
    r.subjects = {"gnd:a", "gnd:b"};
    corpus.records.push_back(r);
    LexicalModel model = train_lexical(corpus, v, "en", v.normalization(), 42);

    SuggestionList out = suggest_lexical(model, "a shared label appears", v, "en", 10);
    REQUIRE(out.size() == 2);
    CHECK(out.items[0].score == out.items[1].score);  // identical features
    CHECK(out.items[0].subject_id == "gnd:a");        // id tiebreak
    CHECK(out.items[1].subject_id == "gnd:b");

    CHECK(suggest_lexical(model, "a shared label appears", v, "en", 0).empty());
    CHECK(suggest_lexical(model, "a shared label appears", v, "en", 1).size() == 1);
}

TEST_CASE("suggest scores are monotone in subject_prior for a positive prior weight") {
    LexicalModel model;
    model.scorer.weights = {0.1, -0.2, 0.0, 0.3, 0.05, 2.0};
    model.scorer.bias = -0.5;
    CandidateFeatures f;
    f.match_count = 1;
    f.first_position = 0.25;
    f.spread = 0.0;
    f.is_pref_label = true;
    f.label_token_len = 1;
    double last = -1.0;
    for (double prior : {0.0, 0.1, 0.5, 0.9}) {
        f.subject_prior = prior;
        double score = model.score(f);
        CHECK(score > last);
        last = score;
    }
}

TEST_CASE("candidate recall: planted labels are always candidates") {
    std::mt19937 gen(31);
    std::vector<std::string> fillers = {"study", "survey", "results", "methods", "findings"};
    std::string tsv;
    std::vector<std::string> labels;
    for (int i = 0; i < 10; ++i) {
        std::string label = "planted" + std::to_string(i) +
                            (i % 2 ? " phrase" : "");  // mix single and two-token labels
        labels.push_back(label);
        tsv += "gnd:" + std::to_string(i) + "\tWort" + std::to_string(i) + "\t" + label + "\n";
    }
    SubjectVocabulary v = vocab_from_tsv(tsv);

    for (int trial = 0; trial < 100; ++trial) {
        int which = int(gen() % labels.size());
        std::string doc;
        int planted_at = int(gen() % 5);
        for (int w = 0; w < 5; ++w) {
            if (w == planted_at) doc += labels[which] + " ";
            doc += fillers[gen() % fillers.size()] + " ";
        }
        auto candidates = generate_candidates(doc, v, "en");
        CHECK(find_candidate(candidates, "gnd:" + std::to_string(which)) != nullptr);
    }
}

TEST_CASE("suggestions are always a subset of the generated candidates") {
    SubjectVocabulary v = vocab_from_tsv(
        "gnd:1\tWort\tsolar\n"
        "gnd:2\tWort2\twind\n"
        "gnd:3\tWort3\ttide\n");
    Corpus corpus;
    DocumentRecord r = testutil::make_record("d1", "en", "solar and wind and tide");
    r.subjects = {"gnd:1", "gnd:2"};
    corpus.records.push_back(r);
    LexicalModel model = train_lexical(corpus, v, "en", v.normalization(), 42);

    for (const char* text : {"solar here", "wind and tide", "no match at all", "solar wind tide"}) {
        std::set<std::string> candidate_ids;
        for (const Candidate& c : generate_candidates(text, v, "en"))
            candidate_ids.insert(c.subject_id);
        SuggestionList out = suggest_lexical(model, text, v, "en", 50);
        for (const Suggestion& s : out.items) CHECK(candidate_ids.count(s.subject_id) == 1);
    }
}

TEST_CASE("lexical model JSON round-trip preserves suggestions") {
    SubjectVocabulary v = vocab_from_tsv("gnd:1\tWort\tsolar\ngnd:2\tWort2\twind\n");
    Corpus corpus;
    DocumentRecord r1 = testutil::make_record("d1", "en", "solar panels", "solar details");
    r1.subjects = {"gnd:1"};
    DocumentRecord r2 = testutil::make_record("d2", "en", "wind farms");
    r2.subjects = {"gnd:2"};
    corpus.records = {r1, r2};
    LexicalModel model = train_lexical(corpus, v, "en", v.normalization(), 42);

    LexicalModel back = LexicalModel::from_json(model.to_json());
    SuggestionList a = suggest_lexical(model, "solar and wind", v, "en", 10);
    SuggestionList b = suggest_lexical(back, "solar and wind", v, "en", 10);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a.items[i].subject_id == b.items[i].subject_id);
        CHECK(a.items[i].score == b.items[i].score);
    }
}
