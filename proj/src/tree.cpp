#include "subjidx/tree.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "subjidx/errors.hpp"
#include "subjidx/rng.hpp"

namespace subjidx {

namespace {

using DocSet = std::vector<std::uint32_t>;  // sorted doc indices

DocSet merge_sets(const std::vector<const DocSet*>& sets) {
    DocSet out;
    for (const DocSet* s : sets) out.insert(out.end(), s->begin(), s->end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<double> to_dense(const SparseVec& v, std::size_t dim) {
    std::vector<double> d(dim, 0.0);
    for (const auto& [i, x] : v.entries) d[i] = x;
    return d;
}

// Spherical k-means with deterministic seeded init; at most 25 iterations.
// Returns nonempty clusters in centroid order; sizes are not balanced.
std::vector<std::vector<std::size_t>> kmeans_cosine(const std::vector<const SparseVec*>& points,
                                                    std::size_t k, std::size_t dim,
                                                    std::uint64_t seed) {
    const std::size_t n = points.size();
    k = std::min(k, n);

    // Sample k distinct points as initial centroids (partial Fisher-Yates).
    Rng rng(seed);
    std::vector<std::size_t> pick(n);
    std::iota(pick.begin(), pick.end(), std::size_t{0});
    for (std::size_t i = 0; i < k; ++i) {
        std::size_t j = i + rng.next_index(n - i);
        std::swap(pick[i], pick[j]);
    }
    std::vector<std::vector<double>> centroids;
    centroids.reserve(k);
    for (std::size_t i = 0; i < k; ++i) centroids.push_back(to_dense(*points[pick[i]], dim));

    std::vector<std::size_t> assign(n, 0);
    for (int iter = 0; iter < 25; ++iter) {
        bool changed = false;
        for (std::size_t p = 0; p < n; ++p) {
            std::size_t best = 0;
            double best_sim = -2.0;
            for (std::size_t c = 0; c < k; ++c) {
                double sim = dot(*points[p], centroids[c]);
                if (sim > best_sim) {
                    best_sim = sim;
                    best = c;
                }
            }
            if (assign[p] != best) {
                assign[p] = best;
                changed = true;
            }
        }
        if (!changed && iter > 0) break;

        for (std::size_t c = 0; c < k; ++c) std::fill(centroids[c].begin(), centroids[c].end(), 0.0);
        std::vector<std::size_t> count(k, 0);
        for (std::size_t p = 0; p < n; ++p) {
            add_scaled(centroids[assign[p]], *points[p], 1.0);
            ++count[assign[p]];
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (count[c] == 0) continue;  // empty cluster keeps its (zeroed) centroid
            double norm = 0.0;
            for (double x : centroids[c]) norm += x * x;
            norm = std::sqrt(norm);
            if (norm > 0.0)
                for (double& x : centroids[c]) x /= norm;
        }
    }

    std::vector<std::vector<std::size_t>> clusters(k);
    for (std::size_t p = 0; p < n; ++p) clusters[assign[p]].push_back(p);
    clusters.erase(std::remove_if(clusters.begin(), clusters.end(),
                                  [](const auto& c) { return c.empty(); }),
                   clusters.end());
    return clusters;
}

struct TreeBuilder {
    const std::map<std::string, SparseVec>& reps;
    std::size_t dim;
    int fanout;
    int max_depth;
    std::uint64_t seed;
    std::vector<TreeNode> nodes;

    std::uint32_t add_leaf(const std::string& subject_id) {
        nodes.push_back(TreeNode{{}, subject_id});
        return static_cast<std::uint32_t>(nodes.size() - 1);
    }

    // ids sorted; returns the index of the created internal node.
    std::uint32_t build(const std::vector<std::string>& ids, int depth) {
        std::uint32_t index = static_cast<std::uint32_t>(nodes.size());
        nodes.emplace_back();

        if (ids.size() <= static_cast<std::size_t>(fanout) || depth >= max_depth) {
            // Fits as direct leaves, or depth budget exhausted: leaf dump.
            std::vector<std::uint32_t> children;
            children.reserve(ids.size());
            for (const std::string& id : ids) children.push_back(add_leaf(id));
            nodes[index].children = std::move(children);
            return index;
        }

        std::vector<const SparseVec*> points;
        points.reserve(ids.size());
        for (const std::string& id : ids) points.push_back(&reps.at(id));
        std::uint64_t node_seed = mix_seed(seed, fnv1a(ids.front()) ^ static_cast<std::uint64_t>(depth));
        std::vector<std::vector<std::size_t>> clusters =
            kmeans_cosine(points, static_cast<std::size_t>(fanout), dim, node_seed);

        if (clusters.size() < 2) {
            // Degenerate clustering (e.g. identical representations): split
            // the sorted id list in half so recursion always terminates.
            std::size_t half = ids.size() / 2;
            clusters = {{}, {}};
            for (std::size_t i = 0; i < ids.size(); ++i) clusters[i < half ? 0 : 1].push_back(i);
        }

        std::vector<std::uint32_t> children;
        children.reserve(clusters.size());
        for (const std::vector<std::size_t>& cluster : clusters) {
            if (cluster.size() == 1) {
                children.push_back(add_leaf(ids[cluster[0]]));
            } else {
                std::vector<std::string> sub;
                sub.reserve(cluster.size());
                for (std::size_t i : cluster) sub.push_back(ids[i]);
                children.push_back(build(sub, depth + 1));
            }
        }
        nodes[index].children = std::move(children);
        return index;
    }
};

}  // namespace

std::size_t LabelTree::leaf_count() const {
    std::size_t n = 0;
    for (const TreeNode& node : nodes)
        if (node.is_leaf()) ++n;
    return n;
}

std::vector<std::string> LabelTree::leaf_subjects() const {
    std::vector<std::string> out;
    for (const TreeNode& node : nodes)
        if (node.is_leaf()) out.push_back(node.subject_id);
    std::sort(out.begin(), out.end());
    return out;
}

LabelTree build_label_tree(const std::map<std::string, SparseVec>& label_reps, int fanout,
                           int max_depth, std::uint64_t seed) {
    if (label_reps.empty()) throw ValidationError("build_label_tree: no label representations");
    if (fanout < 2) throw ConfigError("fanout must be >= 2");
    if (max_depth < 1) throw ConfigError("max_depth must be >= 1");

    std::size_t dim = 0;
    std::vector<std::string> ids;
    ids.reserve(label_reps.size());
    for (const auto& [id, rep] : label_reps) {
        ids.push_back(id);
        if (!rep.entries.empty()) dim = std::max(dim, static_cast<std::size_t>(rep.entries.back().first) + 1);
    }

    TreeBuilder builder{label_reps, dim, fanout, max_depth, seed, {}};
    builder.build(ids, 0);

    LabelTree tree;
    tree.nodes = std::move(builder.nodes);
    tree.fanout = fanout;
    tree.max_depth = max_depth;
    return tree;
}

TreeModel train_tree(const Corpus& corpus, const SubjectVocabulary& vocab,
                     const AnalyzerConfig& analyzer, const TreeTrainOptions& options) {
    if (corpus.empty()) throw NoTrainingSignalError("empty training corpus");

    std::vector<std::string> texts;
    texts.reserve(corpus.size());
    for (const DocumentRecord& rec : corpus.records) texts.push_back(document_text(rec));

    TreeModel model;
    model.vectorizer = Vectorizer::fit(texts, analyzer);
    model.beam_width = options.beam_width;

    std::vector<SparseVec> doc_vecs;
    doc_vecs.reserve(texts.size());
    for (const std::string& t : texts) doc_vecs.push_back(model.vectorizer.transform(t));

    // Subjects with at least one training example, restricted to the vocabulary.
    std::map<std::string, DocSet> subject_docs;
    for (std::uint32_t d = 0; d < corpus.size(); ++d) {
        for (const std::string& id : corpus.records[d].subjects) {
            if (vocab.contains(id)) subject_docs[id].push_back(d);
        }
    }
    if (subject_docs.empty())
        throw NoTrainingSignalError("no training record carries a vocabulary subject");

    // Label representation: normalized mean of the subject's document vectors;
    // single-document subjects fall back to their preferred-label text.
    std::map<std::string, SparseVec> reps;
    for (const auto& [id, docs] : subject_docs) {
        SparseVec rep;
        if (docs.size() == 1) {
            const Subject* subject = vocab.find(id);
            auto pref = subject->pref_label.find(analyzer.language);
            if (pref != subject->pref_label.end()) rep = model.vectorizer.transform(pref->second);
            if (rep.empty()) rep = doc_vecs[docs[0]];
        } else {
            std::map<std::uint32_t, double> acc;
            for (std::uint32_t d : docs)
                for (const auto& [i, x] : doc_vecs[d].entries) acc[i] += x;
            for (const auto& [i, x] : acc) rep.entries.emplace_back(i, x);
            l2_normalize(rep);
        }
        reps[id] = std::move(rep);
    }

    model.tree = build_label_tree(reps, options.fanout, options.max_depth, options.seed);
    const std::vector<TreeNode>& nodes = model.tree.nodes;

    // Route documents: node_docs[n] = docs with a gold subject in n's subtree.
    // Also record each subtree's smallest subject id as a stable seed salt.
    std::vector<DocSet> node_docs(nodes.size());
    std::vector<std::string> node_key(nodes.size());
    std::function<void(std::uint32_t)> route = [&](std::uint32_t n) {
        if (nodes[n].is_leaf()) {
            node_docs[n] = subject_docs.at(nodes[n].subject_id);
            node_key[n] = nodes[n].subject_id;
            return;
        }
        std::vector<const DocSet*> parts;
        parts.reserve(nodes[n].children.size());
        for (std::uint32_t c : nodes[n].children) {
            route(c);
            parts.push_back(&node_docs[c]);
            if (node_key[n].empty() || node_key[c] < node_key[n]) node_key[n] = node_key[c];
        }
        node_docs[n] = merge_sets(parts);
    };
    route(0);

    const std::size_t dim = model.vectorizer.feature_count();
    model.edge_classifiers.resize(nodes.size());
    for (std::uint32_t n = 0; n < nodes.size(); ++n) {
        if (nodes[n].is_leaf()) continue;
        model.edge_classifiers[n].resize(nodes[n].children.size());
        for (std::size_t slot = 0; slot < nodes[n].children.size(); ++slot) {
            std::uint32_t child = nodes[n].children[slot];
            std::vector<LogisticExample> examples;
            examples.reserve(node_docs[n].size());
            const DocSet& positives = node_docs[child];
            for (std::uint32_t d : node_docs[n]) {
                bool positive = std::binary_search(positives.begin(), positives.end(), d);
                examples.push_back({doc_vecs[d], positive ? 1.0 : 0.0});
            }
            LogisticOptions lo;
            lo.learning_rate = options.learning_rate;
            lo.epochs = options.epochs;
            lo.l2 = options.l2;
            lo.seed = mix_seed(options.seed, fnv1a(node_key[child]));
            LogisticModel lm = train_logistic(examples, dim, lo);
            model.edge_classifiers[n][slot] = {std::move(lm.weights), lm.bias};
        }
    }
    return model;
}

SuggestionList suggest_tree(const TreeModel& model, std::string_view text, int beam_width,
                            std::size_t limit) {
    return suggest_tree_vec(model, model.vectorizer.transform(text), beam_width, limit);
}

SuggestionList suggest_tree_vec(const TreeModel& model, const SparseVec& x, int beam_width,
                                std::size_t limit) {
    if (beam_width < 1) throw ConfigError("beam_width must be >= 1");
    const std::vector<TreeNode>& nodes = model.tree.nodes;
    if (nodes.empty()) return SuggestionList{{}, "tree"};

    struct Beam {
        std::uint32_t node;
        double score;
    };
    std::vector<Beam> frontier{{0, 1.0}};

    auto has_internal = [&](const std::vector<Beam>& f) {
        for (const Beam& b : f)
            if (!nodes[b.node].is_leaf()) return true;
        return false;
    };

    while (has_internal(frontier)) {
        std::vector<Beam> expanded;
        for (const Beam& b : frontier) {
            if (nodes[b.node].is_leaf()) {
                expanded.push_back(b);
                continue;
            }
            const std::vector<EdgeClassifier>& edges = model.edge_classifiers[b.node];
            for (std::size_t slot = 0; slot < nodes[b.node].children.size(); ++slot) {
                double p = sigmoid(dot(x, edges[slot].weights) + edges[slot].bias);
                expanded.push_back({nodes[b.node].children[slot], b.score * p});
            }
        }
        std::sort(expanded.begin(), expanded.end(), [](const Beam& a, const Beam& b) {
            if (a.score != b.score) return a.score > b.score;
            return a.node < b.node;
        });
        if (expanded.size() > static_cast<std::size_t>(beam_width))
            expanded.resize(static_cast<std::size_t>(beam_width));
        frontier = std::move(expanded);
    }

    std::vector<Suggestion> leaves;
    leaves.reserve(frontier.size());
    for (const Beam& b : frontier) leaves.push_back({nodes[b.node].subject_id, b.score});
    return SuggestionList::ranked(std::move(leaves), "tree", limit);
}

std::string dump_tree(const LabelTree& tree) {
    std::ostringstream out;
    std::function<void(std::uint32_t, int)> walk = [&](std::uint32_t n, int depth) {
        for (int i = 0; i < depth; ++i) out << "  ";
        const TreeNode& node = tree.nodes[n];
        if (node.is_leaf()) {
            out << "leaf " << node.subject_id << '\n';
            return;
        }
        out << "node (" << node.children.size() << " children)\n";
        for (std::uint32_t c : node.children) walk(c, depth + 1);
    };
    if (!tree.nodes.empty()) walk(0, 0);
    return out.str();
}

nlohmann::json TreeModel::to_json() const {
    nlohmann::json jnodes = nlohmann::json::array();
    for (const TreeNode& n : tree.nodes)
        jnodes.push_back({{"children", n.children}, {"subject", n.subject_id}});
    nlohmann::json jedges = nlohmann::json::array();
    for (const auto& per_node : edge_classifiers) {
        nlohmann::json slots = nlohmann::json::array();
        for (const EdgeClassifier& e : per_node)
            slots.push_back({{"weights", e.weights}, {"bias", e.bias}});
        jedges.push_back(std::move(slots));
    }
    return nlohmann::json{{"kind", "tree"},
                          {"fanout", tree.fanout},
                          {"max_depth", tree.max_depth},
                          {"beam_width", beam_width},
                          {"nodes", jnodes},
                          {"edges", jedges},
                          {"vectorizer", vectorizer.to_json()}};
}

TreeModel TreeModel::from_json(const nlohmann::json& j) {
    if (j.value("kind", "") != std::string("tree")) throw ParseError("expected a tree model");
    TreeModel m;
    m.tree.fanout = j.at("fanout").get<int>();
    m.tree.max_depth = j.at("max_depth").get<int>();
    m.beam_width = j.at("beam_width").get<int>();
    for (const auto& jn : j.at("nodes"))
        m.tree.nodes.push_back(
            {jn.at("children").get<std::vector<std::uint32_t>>(), jn.at("subject").get<std::string>()});
    for (const auto& jslots : j.at("edges")) {
        std::vector<EdgeClassifier> per_node;
        for (const auto& je : jslots)
            per_node.push_back({je.at("weights").get<std::vector<double>>(), je.at("bias").get<double>()});
        m.edge_classifiers.push_back(std::move(per_node));
    }
    m.vectorizer = Vectorizer::from_json(j.at("vectorizer"));
    if (m.edge_classifiers.size() != m.tree.nodes.size())
        throw ParseError("tree model: edges and nodes differ in length");
    return m;
}

}  // namespace subjidx
