#pragma once

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "subjidx/corpus.hpp"
#include "subjidx/llm.hpp"
#include "subjidx/suggestion.hpp"
#include "subjidx/tree.hpp"

namespace testutil {

namespace fs = std::filesystem;

/// Unique scratch directory, removed on destruction.
class TempDir {
public:
    TempDir() {
        static std::atomic<unsigned> counter{0};
        path_ = fs::temp_directory_path() /
                ("subjidx-test-" + std::to_string(::getpid()) + "-" +
                 std::to_string(counter.fetch_add(1)));
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const fs::path& path() const { return path_; }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    fs::path path_;
};

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

/// Golden files end with one newline added by the editor; strip it.
inline std::string read_golden(const std::string& path) {
    std::string text = read_file(path);
    if (!text.empty() && text.back() == '\n') text.pop_back();
    return text;
}

// ---------------------------------------------------------------------------
// Brute-force metric oracles. Naive set/loop arithmetic, independent of the
// evaluation module's implementation.
// ---------------------------------------------------------------------------

inline double oracle_precision(const std::vector<std::string>& ranking,
                               const std::set<std::string>& gold, std::size_t k) {
    if (ranking.empty()) return 0.0;
    std::size_t denom = std::min(k, ranking.size());
    std::size_t hits = 0;
    for (std::size_t i = 0; i < ranking.size() && i < k; ++i)
        hits += gold.count(ranking[i]) ? 1 : 0;
    return double(hits) / double(denom);
}

inline double oracle_recall(const std::vector<std::string>& ranking,
                            const std::set<std::string>& gold, std::size_t k) {
    if (gold.empty()) return 0.0;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < ranking.size() && i < k; ++i)
        hits += gold.count(ranking[i]) ? 1 : 0;
    return double(hits) / double(gold.size());
}

inline double oracle_f1(const std::vector<std::string>& ranking,
                        const std::set<std::string>& gold, std::size_t k) {
    double p = oracle_precision(ranking, gold, k);
    double r = oracle_recall(ranking, gold, k);
    return (p + r) == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

inline double oracle_ndcg(const std::vector<std::string>& ranking,
                          const std::set<std::string>& gold, std::size_t k) {
    if (gold.empty()) return 0.0;
    double dcg = 0.0;
    for (std::size_t i = 0; i < ranking.size() && i < k; ++i) {
        if (gold.count(ranking[i])) dcg += 1.0 / (std::log(double(i) + 2.0) / std::log(2.0));
    }
    double idcg = 0.0;
    for (std::size_t i = 0; i < gold.size() && i < k; ++i)
        idcg += 1.0 / (std::log(double(i) + 2.0) / std::log(2.0));
    return dcg / idcg;
}

// ---------------------------------------------------------------------------
// Exhaustive path-product oracle for the tree backend: enumerates every
// root-to-leaf path and multiplies edge probabilities directly.
// ---------------------------------------------------------------------------

inline std::vector<subjidx::Suggestion> oracle_tree_scores(const subjidx::TreeModel& model,
                                                           const subjidx::SparseVec& x) {
    std::vector<subjidx::Suggestion> out;
    std::function<void(std::uint32_t, double)> walk = [&](std::uint32_t n, double score) {
        const subjidx::TreeNode& node = model.tree.nodes[n];
        if (node.is_leaf()) {
            out.push_back({node.subject_id, score});
            return;
        }
        for (std::size_t slot = 0; slot < node.children.size(); ++slot) {
            const subjidx::EdgeClassifier& e = model.edge_classifiers[n][slot];
            double z = e.bias;
            for (const auto& [i, v] : x.entries)
                if (i < e.weights.size()) z += v * e.weights[i];
            double p = 1.0 / (1.0 + std::exp(-z));
            walk(node.children[slot], score * p);
        }
    };
    walk(0, 1.0);
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.subject_id < b.subject_id;
    });
    return out;
}

// ---------------------------------------------------------------------------
// Scripted chat endpoint for tests: replies come from a user-supplied
// function of (call index, user prompt).
// ---------------------------------------------------------------------------

class ScriptedEndpoint : public subjidx::ChatEndpoint {
public:
    using Handler = std::function<std::string(std::size_t, const std::string&)>;

    explicit ScriptedEndpoint(Handler handler) : handler_(std::move(handler)) {}

    std::string complete(const std::string&, const std::string& user_prompt) override {
        return handler_(calls_.fetch_add(1), user_prompt);
    }

    std::size_t calls() const { return calls_.load(); }

private:
    Handler handler_;
    std::atomic<std::size_t> calls_{0};
};

// ---------------------------------------------------------------------------
// Fixture builders
// ---------------------------------------------------------------------------

inline subjidx::DocumentRecord make_record(std::string id, std::string language, std::string title,
                                           std::string abstract_text = "",
                                           std::set<std::string> subjects = {}) {
    return {std::move(id), std::move(language), std::move(title), std::move(abstract_text),
            std::move(subjects)};
}

}  // namespace testutil
