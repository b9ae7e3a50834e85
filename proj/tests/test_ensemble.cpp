#include <doctest.h>

#include <random>

#include <nlohmann/json.hpp>

#include "helpers.hpp"
#include "subjidx/ensemble.hpp"
#include "subjidx/errors.hpp"

using namespace subjidx;

namespace {

SuggestionList list(std::vector<Suggestion> items, std::string provenance = "test") {
    return SuggestionList::ranked(std::move(items), std::move(provenance));
}

SuggestionList random_list(std::mt19937& gen, int max_subjects = 12) {
    std::uniform_real_distribution<double> score(0.0, 1.0);
    std::vector<Suggestion> items;
    std::set<int> used;
    int n = 1 + int(gen() % max_subjects);
    for (int i = 0; i < n; ++i) {
        int id = int(gen() % 26);
        if (!used.insert(id).second) continue;
        items.push_back({std::string(1, char('A' + id)), score(gen)});
    }
    return list(std::move(items));
}

}  // namespace

TEST_CASE("weighted_average: worked example") {
    SuggestionList a = list({{"A", 0.8}, {"B", 0.2}});
    SuggestionList b = list({{"A", 0.4}, {"C", 0.6}});
    SuggestionList fused = weighted_average({a, b}, {0.5, 0.5}, 50);
    REQUIRE(fused.size() == 3);
    CHECK(fused.items[0].subject_id == "A");
    CHECK(fused.items[0].score == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(fused.items[1].subject_id == "C");
    CHECK(fused.items[1].score == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(fused.items[2].subject_id == "B");
    CHECK(fused.items[2].score == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("weighted_average: weight one preserves the member ranking") {
    std::mt19937 gen(2);
    for (int trial = 0; trial < 20; ++trial) {
        SuggestionList a = random_list(gen);
        SuggestionList b = random_list(gen);
        SuggestionList fused = weighted_average({a, b}, {1.0, 0.0}, SuggestionList::kNoLimit);
        // every subject of a keeps its score; b's extras score 0 and trail
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(fused.items[i].subject_id == a.items[i].subject_id);
            CHECK(fused.items[i].score == doctest::Approx(a.items[i].score).epsilon(1e-12));
        }
    }
}

TEST_CASE("weighted_average: errors") {
    SuggestionList a = list({{"A", 0.5}});
    CHECK_THROWS_AS(weighted_average({a, a}, {0.6, 0.6}, 10), SimplexViolationError);
    CHECK_THROWS_AS(weighted_average({a, a}, {-0.5, 1.5}, 10), SimplexViolationError);
    CHECK_THROWS_AS(weighted_average({a, a}, {1.0}, 10), ValidationError);
}

TEST_CASE("weighted_average: reported ensemble weights pass the simplex check") {
    CHECK_NOTHROW(check_simplex({0.8070, 0.1930}));
    CHECK_NOTHROW(check_simplex({0.8377, 0.1623}));
    CHECK_NOTHROW(check_simplex({0.8432, 0.1568}));
    CHECK_NOTHROW(check_simplex({0.8729, 0.1271}));
    CHECK_NOTHROW(check_simplex({0.4713, 0.1964, 0.3323}));
    CHECK_NOTHROW(check_simplex({0.5387, 0.1417, 0.3196}));
    CHECK_NOTHROW(check_simplex({0.4891, 0.1837, 0.3272}));
    CHECK_NOTHROW(check_simplex({0.6197, 0.1671, 0.2132}));
}

TEST_CASE("weighted_average: scaling one member scales its contribution") {
    std::mt19937 gen(9);
    for (int trial = 0; trial < 10; ++trial) {
        SuggestionList a = random_list(gen);
        SuggestionList b = random_list(gen);
        const double c = 0.37;
        SuggestionList scaled_b = b;
        for (Suggestion& s : scaled_b.items) s.score *= c;

        SuggestionList fused = weighted_average({a, scaled_b}, {0.5, 0.5}, SuggestionList::kNoLimit);
        // fused(s) = 0.5*a(s) + c*0.5*b(s)
        for (const Suggestion& s : fused.items) {
            double a_score = 0.0, b_score = 0.0;
            for (const Suggestion& x : a.items)
                if (x.subject_id == s.subject_id) a_score = x.score;
            for (const Suggestion& x : b.items)
                if (x.subject_id == s.subject_id) b_score = x.score;
            CHECK(s.score == doctest::Approx(0.5 * a_score + 0.5 * c * b_score).epsilon(1e-12));
        }

        // identical members: output ranking equals input ranking
        SuggestionList fused_same = weighted_average({a, a}, {0.3, 0.7}, SuggestionList::kNoLimit);
        REQUIRE(fused_same.size() == a.size());
        for (std::size_t i = 0; i < a.size(); ++i)
            CHECK(fused_same.items[i].subject_id == a.items[i].subject_id);
    }
}

TEST_CASE("merge_multilingual: worked example") {
    SuggestionList de = list({{"A", 0.9}, {"B", 0.5}});
    SuggestionList en = list({{"A", 0.7}, {"C", 0.6}});
    SuggestionList merged = merge_multilingual(de, en);
    REQUIRE(merged.size() == 3);
    CHECK(merged.items[0].subject_id == "A");
    CHECK(merged.items[0].score == doctest::Approx(1.6).epsilon(1e-12));
    CHECK(merged.items[1].subject_id == "C");
    CHECK(merged.items[1].score == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(merged.items[2].subject_id == "B");
    CHECK(merged.items[2].score == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("merge_multilingual: identity, truncation, commutativity") {
    SuggestionList de = list({{"A", 0.9}, {"B", 0.5}});
    SuggestionList merged = merge_multilingual(de, SuggestionList{});
    REQUIRE(merged.size() == 2);
    CHECK(merged.items[0].subject_id == "A");
    CHECK(merged.items[1].subject_id == "B");

    // 60 distinct subjects across both lists, limit 50
    std::vector<Suggestion> a_items, b_items;
    for (int i = 0; i < 30; ++i) a_items.push_back({"a" + std::to_string(i), 0.9 - i * 0.01});
    for (int i = 0; i < 30; ++i) b_items.push_back({"b" + std::to_string(i), 0.9 - i * 0.01});
    CHECK(merge_multilingual(list(a_items), list(b_items), 50).size() == 50);

    std::mt19937 gen(4);
    for (int trial = 0; trial < 20; ++trial) {
        SuggestionList x = random_list(gen);
        SuggestionList y = random_list(gen);
        SuggestionList xy = merge_multilingual(x, y, 50);
        SuggestionList yx = merge_multilingual(y, x, 50);
        REQUIRE(xy.size() == yx.size());
        for (std::size_t i = 0; i < xy.size(); ++i) {
            CHECK(xy.items[i].subject_id == yx.items[i].subject_id);
            CHECK(xy.items[i].score == yx.items[i].score);
        }
    }
}

TEST_CASE("adjuster: deterministic init, outputs in (0,1), weight sharing") {
    NeuralAdjusterConfig config;
    config.hidden_units = 8;
    config.seed = 123;
    NeuralAdjuster a = init_adjuster(config, 2);
    NeuralAdjuster b = init_adjuster(config, 2);
    CHECK(a.w1 == b.w1);
    CHECK(a.w2 == b.w2);

    std::mt19937 gen(6);
    std::uniform_real_distribution<double> val(0.0, 1.0);
    for (int i = 0; i < 50; ++i) {
        std::vector<double> x = {val(gen), val(gen)};
        double out = a.forward(x);
        CHECK(out > 0.0);
        CHECK(out < 1.0);
        CHECK(a.forward(x) == out);  // same input, same output
    }
}

TEST_CASE("adjuster gradient matches central finite differences") {
    NeuralAdjusterConfig config;
    config.hidden_units = 5;
    config.seed = 31;
    NeuralAdjuster a = init_adjuster(config, 3);
    std::mt19937 gen(8);
    std::uniform_real_distribution<double> val(0.0, 1.0);
    const double h = 1e-5;

    auto check = [&](double analytic, double numeric) {
        double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-8});
        CHECK(std::abs(analytic - numeric) / denom < 1e-4);
    };
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<double> x = {val(gen), val(gen), val(gen)};
        double y = (gen() % 2) ? 1.0 : 0.0;
        AdjusterGradient g = adjuster_gradient(a, x, y);

        for (std::size_t k = 0; k < a.w1.size(); ++k) {
            NeuralAdjuster plus = a, minus = a;
            plus.w1[k] += h;
            minus.w1[k] -= h;
            check(g.w1[k], (adjuster_loss(plus, x, y) - adjuster_loss(minus, x, y)) / (2 * h));
        }
        for (std::size_t k = 0; k < a.b1.size(); ++k) {
            NeuralAdjuster plus = a, minus = a;
            plus.b1[k] += h;
            minus.b1[k] -= h;
            check(g.b1[k], (adjuster_loss(plus, x, y) - adjuster_loss(minus, x, y)) / (2 * h));
        }
        for (std::size_t k = 0; k < a.w2.size(); ++k) {
            NeuralAdjuster plus = a, minus = a;
            plus.w2[k] += h;
            minus.w2[k] -= h;
            check(g.w2[k], (adjuster_loss(plus, x, y) - adjuster_loss(minus, x, y)) / (2 * h));
        }
        NeuralAdjuster plus = a, minus = a;
        plus.b2 += h;
        minus.b2 -= h;
        check(g.b2, (adjuster_loss(plus, x, y) - adjuster_loss(minus, x, y)) / (2 * h));
    }
}

namespace {

// Rigged development setup: member 0 always suggests the gold subject first
// with a high score, member 1 suggests junk with high scores.
void rigged_runs(Corpus& dev, std::vector<Run>& runs, int docs) {
    runs.assign(2, Run{});
    for (int d = 0; d < docs; ++d) {
        std::string doc_id = "d" + std::to_string(d);
        std::string gold = "gold" + std::to_string(d % 7);
        DocumentRecord rec = testutil::make_record(doc_id, "en", "t");
        rec.subjects = {gold};
        dev.records.push_back(rec);
        runs[0][doc_id] = SuggestionList::ranked(
            {{gold, 0.9}, {"other" + std::to_string(d % 5), 0.3}}, "m0");
        runs[1][doc_id] = SuggestionList::ranked(
            {{"junk" + std::to_string(d % 3), 0.95}, {"junk" + std::to_string(3 + d % 3), 0.8}},
            "m1");
    }
}

}  // namespace

TEST_CASE("train_neural: learns to favor the reliable member") {
    Corpus dev;
    std::vector<Run> runs;
    rigged_runs(dev, runs, 60);

    NeuralAdjusterConfig config;
    config.hidden_units = 16;
    config.epochs = 10;
    config.seed = 7;
    NeuralAdjuster adjuster = train_neural(config, runs, dev);

    // training loss decreased
    REQUIRE(adjuster.epoch_losses.size() == 11);
    CHECK(adjuster.epoch_losses.back() < adjuster.epoch_losses.front());

    // backend 0's top suggestion ranks first on at least 90% of documents
    int first = 0;
    for (const DocumentRecord& rec : dev.records) {
        std::vector<SuggestionList> members = {runs[0].at(rec.id), runs[1].at(rec.id)};
        SuggestionList out = suggest_neural(adjuster, members, 10);
        REQUIRE(!out.empty());
        if (out.items[0].subject_id == runs[0].at(rec.id).items[0].subject_id) ++first;
    }
    CHECK(first >= 54);
}

TEST_CASE("train_neural: epochs=0 returns a usable initialized network") {
    Corpus dev;
    std::vector<Run> runs;
    rigged_runs(dev, runs, 10);
    NeuralAdjusterConfig config;
    config.epochs = 0;
    NeuralAdjuster adjuster = train_neural(config, runs, dev);
    REQUIRE(adjuster.epoch_losses.size() == 1);
    std::vector<SuggestionList> members = {runs[0].at("d0"), runs[1].at("d0")};
    SuggestionList out = suggest_neural(adjuster, members, 10);
    for (const Suggestion& s : out.items) {
        CHECK(s.score > 0.0);
        CHECK(s.score < 1.0);
    }
}

TEST_CASE("train_neural: no candidates -> error") {
    Corpus dev;
    dev.records.push_back(testutil::make_record("d0", "en", "t"));
    std::vector<Run> runs(2);
    CHECK_THROWS_AS(train_neural({}, runs, dev), NoTrainingSignalError);
    CHECK_THROWS_AS(train_neural({}, {}, dev), ValidationError);
    CHECK_THROWS_AS(train_neural({}, runs, Corpus{}), ValidationError);
}

TEST_CASE("suggest_neural: empty members, single candidate, shared weights") {
    NeuralAdjusterConfig config;
    config.hidden_units = 4;
    NeuralAdjuster a = init_adjuster(config, 2);

    CHECK(suggest_neural(a, {SuggestionList{}, SuggestionList{}}, 10).empty());

    SuggestionList single = list({{"A", 0.4}});
    SuggestionList out = suggest_neural(a, {single, SuggestionList{}}, 10);
    REQUIRE(out.size() == 1);
    CHECK(out.items[0].subject_id == "A");

    // identical member inputs for two subjects -> identical adjusted scores
    SuggestionList left = list({{"A", 0.4}, {"B", 0.4}});
    SuggestionList right = list({{"A", 0.2}, {"B", 0.2}});
    SuggestionList both = suggest_neural(a, {left, right}, 10);
    REQUIRE(both.size() == 2);
    CHECK(both.items[0].score == both.items[1].score);
}

TEST_CASE("adjuster JSON round-trip") {
    Corpus dev;
    std::vector<Run> runs;
    rigged_runs(dev, runs, 12);
    NeuralAdjusterConfig config;
    config.hidden_units = 6;
    NeuralAdjuster a = train_neural(config, runs, dev);
    NeuralAdjuster b = NeuralAdjuster::from_json(a.to_json());
    std::vector<double> x = {0.3, 0.8};
    CHECK(a.forward(x) == b.forward(x));
}
