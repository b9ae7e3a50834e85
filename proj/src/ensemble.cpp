#include "subjidx/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <nlohmann/json.hpp>

#include "subjidx/errors.hpp"
#include "subjidx/logreg.hpp"
#include "subjidx/rng.hpp"

namespace subjidx {

void check_simplex(const std::vector<double>& weights) {
    double sum = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw SimplexViolationError("negative ensemble weight");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw SimplexViolationError("ensemble weights sum to " + std::to_string(sum) +
                                    ", expected 1");
}

SuggestionList weighted_average(const std::vector<SuggestionList>& lists,
                                const std::vector<double>& weights, std::size_t limit) {
    if (lists.size() != weights.size())
        throw ValidationError("weighted_average: " + std::to_string(lists.size()) + " lists but " +
                              std::to_string(weights.size()) + " weights");
    check_simplex(weights);

    std::map<std::string, double> scores;
    for (std::size_t b = 0; b < lists.size(); ++b) {
        for (const Suggestion& s : lists[b].items) scores[s.subject_id] += weights[b] * s.score;
    }
    std::vector<Suggestion> items;
    items.reserve(scores.size());
    for (auto& [id, score] : scores) items.push_back({id, score});
    return SuggestionList::ranked(std::move(items), "weighted_average", limit);
}

SuggestionList merge_multilingual(const SuggestionList& run_de, const SuggestionList& run_en,
                                  std::size_t limit) {
    std::map<std::string, double> scores;
    for (const Suggestion& s : run_de.items) scores[s.subject_id] += s.score;
    for (const Suggestion& s : run_en.items) scores[s.subject_id] += s.score;
    std::vector<Suggestion> items;
    items.reserve(scores.size());
    for (auto& [id, score] : scores) items.push_back({id, score});
    return SuggestionList::ranked(std::move(items), "merged", limit);
}

double NeuralAdjuster::forward(const std::vector<double>& member_scores) const {
    if (member_scores.size() != member_count)
        throw ValidationError("adjuster expects " + std::to_string(member_count) +
                              " member scores, got " + std::to_string(member_scores.size()));
    const std::size_t h = b1.size();
    double z = b2;
    for (std::size_t j = 0; j < h; ++j) {
        double a = b1[j];
        const double* row = w1.data() + j * member_count;
        for (std::size_t i = 0; i < member_count; ++i) a += row[i] * member_scores[i];
        if (a > 0.0) z += w2[j] * a;  // ReLU
    }
    return sigmoid(z);
}

NeuralAdjuster init_adjuster(const NeuralAdjusterConfig& config, std::size_t member_count) {
    if (config.hidden_units < 1) throw ConfigError("hidden_units must be >= 1");
    if (member_count < 1) throw ConfigError("adjuster needs at least one member");

    NeuralAdjuster a;
    a.config = config;
    a.member_count = member_count;
    const std::size_t h = static_cast<std::size_t>(config.hidden_units);
    a.w1.resize(h * member_count);
    a.b1.assign(h, 0.0);
    a.w2.resize(h);
    a.b2 = 0.0;

    // Symmetric uniform init scaled by fan-in.
    Rng rng(config.seed);
    const double s1 = 1.0 / std::sqrt(static_cast<double>(member_count));
    for (double& w : a.w1) w = (2.0 * rng.next_double() - 1.0) * s1;
    const double s2 = 1.0 / std::sqrt(static_cast<double>(h));
    for (double& w : a.w2) w = (2.0 * rng.next_double() - 1.0) * s2;
    return a;
}

double adjuster_loss(const NeuralAdjuster& a, const std::vector<double>& x, double y) {
    double p = a.forward(x);
    // Clamp away from 0/1; forward() cannot return exactly either, but the
    // logs must stay finite under rounding.
    p = std::min(std::max(p, 1e-12), 1.0 - 1e-12);
    return -(y * std::log(p) + (1.0 - y) * std::log(1.0 - p));
}

AdjusterGradient adjuster_gradient(const NeuralAdjuster& a, const std::vector<double>& x,
                                   double y) {
    const std::size_t h = a.b1.size();
    const std::size_t m = a.member_count;

    std::vector<double> pre(h), act(h);
    double z = a.b2;
    for (std::size_t j = 0; j < h; ++j) {
        double s = a.b1[j];
        const double* row = a.w1.data() + j * m;
        for (std::size_t i = 0; i < m; ++i) s += row[i] * x[i];
        pre[j] = s;
        act[j] = s > 0.0 ? s : 0.0;
        z += a.w2[j] * act[j];
    }
    const double p = sigmoid(z);
    const double dz = p - y;  // dL/dz for BCE through sigmoid

    AdjusterGradient g;
    g.w1.assign(h * m, 0.0);
    g.b1.assign(h, 0.0);
    g.w2.assign(h, 0.0);
    g.b2 = dz;
    for (std::size_t j = 0; j < h; ++j) {
        g.w2[j] = dz * act[j];
        if (pre[j] > 0.0) {
            double da = dz * a.w2[j];
            g.b1[j] = da;
            double* row = g.w1.data() + j * m;
            for (std::size_t i = 0; i < m; ++i) row[i] = da * x[i];
        }
    }
    return g;
}

namespace {

struct TrainingDoc {
    std::vector<std::vector<double>> inputs;  // one vector per candidate
    std::vector<double> targets;
};

std::vector<TrainingDoc> collect_training_docs(const std::vector<Run>& member_runs,
                                               const Corpus& dev) {
    std::vector<TrainingDoc> docs;
    for (const DocumentRecord& rec : dev.records) {
        // Candidate union across members, each capped to the pool limit.
        std::map<std::string, std::vector<double>> candidates;
        for (std::size_t b = 0; b < member_runs.size(); ++b) {
            auto it = member_runs[b].find(rec.id);
            if (it == member_runs[b].end()) continue;
            std::size_t taken = 0;
            for (const Suggestion& s : it->second.items) {
                if (taken++ == kMemberPoolLimit) break;
                auto [entry, inserted] =
                    candidates.try_emplace(s.subject_id, member_runs.size(), 0.0);
                entry->second[b] = s.score;
            }
        }
        if (candidates.empty()) continue;
        TrainingDoc doc;
        for (auto& [id, input] : candidates) {
            doc.inputs.push_back(std::move(input));
            doc.targets.push_back(rec.subjects.count(id) ? 1.0 : 0.0);
        }
        docs.push_back(std::move(doc));
    }
    return docs;
}

double mean_loss(const NeuralAdjuster& a, const std::vector<TrainingDoc>& docs) {
    double loss = 0.0;
    std::size_t n = 0;
    for (const TrainingDoc& doc : docs) {
        for (std::size_t i = 0; i < doc.inputs.size(); ++i) {
            loss += adjuster_loss(a, doc.inputs[i], doc.targets[i]);
            ++n;
        }
    }
    return loss / static_cast<double>(n);
}

}  // namespace

NeuralAdjuster train_neural(const NeuralAdjusterConfig& config,
                            const std::vector<Run>& member_runs, const Corpus& dev) {
    if (member_runs.empty()) throw ValidationError("train_neural: no member runs");
    if (dev.empty()) throw ValidationError("train_neural: empty development corpus");

    std::vector<TrainingDoc> docs = collect_training_docs(member_runs, dev);
    if (docs.empty())
        throw NoTrainingSignalError("no development document has any member suggestion");

    NeuralAdjuster a = init_adjuster(config, member_runs.size());
    a.epoch_losses.push_back(mean_loss(a, docs));

    const std::size_t h = a.b1.size();
    const std::size_t m = a.member_count;
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        for (const TrainingDoc& doc : docs) {
            // One step per document: mean gradient over its candidates.
            AdjusterGradient acc;
            acc.w1.assign(h * m, 0.0);
            acc.b1.assign(h, 0.0);
            acc.w2.assign(h, 0.0);
            for (std::size_t i = 0; i < doc.inputs.size(); ++i) {
                AdjusterGradient g = adjuster_gradient(a, doc.inputs[i], doc.targets[i]);
                for (std::size_t k = 0; k < acc.w1.size(); ++k) acc.w1[k] += g.w1[k];
                for (std::size_t k = 0; k < h; ++k) acc.b1[k] += g.b1[k];
                for (std::size_t k = 0; k < h; ++k) acc.w2[k] += g.w2[k];
                acc.b2 += g.b2;
            }
            const double step = config.learning_rate / static_cast<double>(doc.inputs.size());
            for (std::size_t k = 0; k < acc.w1.size(); ++k) a.w1[k] -= step * acc.w1[k];
            for (std::size_t k = 0; k < h; ++k) a.b1[k] -= step * acc.b1[k];
            for (std::size_t k = 0; k < h; ++k) a.w2[k] -= step * acc.w2[k];
            a.b2 -= step * acc.b2;
        }
        a.epoch_losses.push_back(mean_loss(a, docs));
    }
    return a;
}

SuggestionList suggest_neural(const NeuralAdjuster& adjuster,
                              const std::vector<SuggestionList>& member_lists, std::size_t limit) {
    if (member_lists.size() != adjuster.member_count)
        throw ValidationError("adjuster trained for " + std::to_string(adjuster.member_count) +
                              " members, got " + std::to_string(member_lists.size()));

    std::map<std::string, std::vector<double>> candidates;
    for (std::size_t b = 0; b < member_lists.size(); ++b) {
        std::size_t taken = 0;
        for (const Suggestion& s : member_lists[b].items) {
            if (taken++ == kMemberPoolLimit) break;
            auto [entry, inserted] = candidates.try_emplace(s.subject_id, member_lists.size(), 0.0);
            entry->second[b] = s.score;
        }
    }
    std::vector<Suggestion> items;
    items.reserve(candidates.size());
    for (const auto& [id, input] : candidates) items.push_back({id, adjuster.forward(input)});
    return SuggestionList::ranked(std::move(items), "neural_ensemble", limit);
}

nlohmann::json NeuralAdjuster::to_json() const {
    return nlohmann::json{{"kind", "neural_adjuster"},
                          {"hidden_units", config.hidden_units},
                          {"learning_rate", config.learning_rate},
                          {"epochs", config.epochs},
                          {"seed", config.seed},
                          {"member_count", member_count},
                          {"w1", w1},
                          {"b1", b1},
                          {"w2", w2},
                          {"b2", b2},
                          {"epoch_losses", epoch_losses}};
}

NeuralAdjuster NeuralAdjuster::from_json(const nlohmann::json& j) {
    if (j.value("kind", "") != std::string("neural_adjuster"))
        throw ParseError("expected a neural adjuster model");
    NeuralAdjuster a;
    a.config.hidden_units = j.at("hidden_units").get<int>();
    a.config.learning_rate = j.at("learning_rate").get<double>();
    a.config.epochs = j.at("epochs").get<int>();
    a.config.seed = j.at("seed").get<std::uint64_t>();
    a.member_count = j.at("member_count").get<std::size_t>();
    a.w1 = j.at("w1").get<std::vector<double>>();
    a.b1 = j.at("b1").get<std::vector<double>>();
    a.w2 = j.at("w2").get<std::vector<double>>();
    a.b2 = j.at("b2").get<double>();
    a.epoch_losses = j.at("epoch_losses").get<std::vector<double>>();
    if (a.w1.size() != a.b1.size() * a.member_count || a.w2.size() != a.b1.size())
        throw ParseError("neural adjuster: inconsistent parameter shapes");
    return a;
}

}  // namespace subjidx
