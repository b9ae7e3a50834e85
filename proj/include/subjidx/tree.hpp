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

/// Node of a shallow label tree; leaves own exactly one subject id.
struct TreeNode {
    std::vector<std::uint32_t> children;  // indices into LabelTree::nodes
    std::string subject_id;               // nonempty iff leaf

    bool is_leaf() const { return children.empty(); }
};

/// Tree over labels. nodes[0] is the root; every subject that had at least
/// one training example appears in exactly one leaf.
struct LabelTree {
    std::vector<TreeNode> nodes;
    int fanout = 100;
    int max_depth = 3;

    std::size_t leaf_count() const;
    std::vector<std::string> leaf_subjects() const;  // sorted
};

/// Per-edge binary classifier; probability that a document's subjects reach
/// the child's subtree given they reached the parent.
struct EdgeClassifier {
    std::vector<double> weights;
    double bias = 0.0;
};

struct TreeModel {
    LabelTree tree;
    // edge_classifiers[node][slot] matches tree.nodes[node].children[slot].
    std::vector<std::vector<EdgeClassifier>> edge_classifiers;
    Vectorizer vectorizer;
    int beam_width = 10;

    nlohmann::json to_json() const;
    static TreeModel from_json(const nlohmann::json& j);
};

struct TreeTrainOptions {
    int fanout = 100;
    int max_depth = 3;
    int beam_width = 10;
    std::uint64_t seed = 42;
    double learning_rate = 0.1;
    int epochs = 100;
    double l2 = 1e-4;
};

/// Clusters label representations into a shallow tree by recursive seeded
/// k-means on cosine similarity (at most 25 iterations per split). A label
/// set that fits within the fanout becomes one node's leaf children; at
/// max_depth any remaining labels become leaves under a single node.
/// Cluster sizes are not balanced.
LabelTree build_label_tree(const std::map<std::string, SparseVec>& label_reps, int fanout,
                           int max_depth, std::uint64_t seed);

/// Fits the vectorizer, builds the tree from per-subject mean document
/// vectors, and trains one logistic classifier per edge: positives are the
/// documents with a gold subject inside the child's subtree, negatives the
/// documents routed to the parent without one. Edge training order does not
/// affect the result (per-edge seeds derive from the subtree's subjects).
TreeModel train_tree(const Corpus& corpus, const SubjectVocabulary& vocab,
                     const AnalyzerConfig& analyzer, const TreeTrainOptions& options);

/// Beam search over path-probability products: keeps the beam_width best
/// frontier nodes per level, then ranks the surviving leaves.
SuggestionList suggest_tree(const TreeModel& model, std::string_view text, int beam_width,
                            std::size_t limit);

/// Same search over an already-vectorized document.
SuggestionList suggest_tree_vec(const TreeModel& model, const SparseVec& x, int beam_width,
                                std::size_t limit);

/// Indented text rendering of the tree, for debugging.
std::string dump_tree(const LabelTree& tree);

}  // namespace subjidx
