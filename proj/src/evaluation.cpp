#include "subjidx/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "subjidx/errors.hpp"

namespace subjidx {

namespace {

std::size_t hits_at_k(const SuggestionList& pred, const std::set<std::string>& gold,
                      std::size_t k) {
    std::size_t hits = 0;
    const std::size_t top = std::min(k, pred.items.size());
    for (std::size_t i = 0; i < top; ++i)
        if (gold.count(pred.items[i].subject_id)) ++hits;
    return hits;
}

std::string metric_key(const char* name, int k) {
    return std::string(name) + "@" + std::to_string(k);
}

}  // namespace

double precision_at_k(const SuggestionList& pred, const std::set<std::string>& gold,
                      std::size_t k) {
    if (pred.items.empty()) return 0.0;
    const std::size_t denom = std::min(k, pred.items.size());
    return static_cast<double>(hits_at_k(pred, gold, k)) / static_cast<double>(denom);
}

double recall_at_k(const SuggestionList& pred, const std::set<std::string>& gold, std::size_t k) {
    if (gold.empty()) return 0.0;
    return static_cast<double>(hits_at_k(pred, gold, k)) / static_cast<double>(gold.size());
}

double f1_at_k(const SuggestionList& pred, const std::set<std::string>& gold, std::size_t k) {
    const double p = precision_at_k(pred, gold, k);
    const double r = recall_at_k(pred, gold, k);
    if (p + r == 0.0) return 0.0;
    return 2.0 * p * r / (p + r);
}

double ndcg_at_k(const SuggestionList& pred, const std::set<std::string>& gold, std::size_t k) {
    if (gold.empty()) return 0.0;
    double dcg = 0.0;
    const std::size_t top = std::min(k, pred.items.size());
    for (std::size_t i = 0; i < top; ++i) {
        if (gold.count(pred.items[i].subject_id))
            dcg += 1.0 / std::log2(static_cast<double>(i) + 2.0);
    }
    double idcg = 0.0;
    const std::size_t ideal = std::min(k, gold.size());
    for (std::size_t i = 0; i < ideal; ++i) idcg += 1.0 / std::log2(static_cast<double>(i) + 2.0);
    return dcg / idcg;
}

std::vector<int> default_thresholds() { return {5, 10, 15, 20, 25, 30, 35, 40, 45, 50}; }

EvaluationReport evaluate_run(const Run& run, const Corpus& gold,
                              const std::vector<int>& thresholds) {
    if (gold.empty()) throw ValidationError("evaluate_run: empty gold corpus");
    if (thresholds.empty()) throw ValidationError("evaluate_run: no thresholds");

    EvaluationReport report;
    report.thresholds = thresholds;
    report.n_documents = gold.size();

    std::map<std::string, double> sums;
    static const SuggestionList kEmpty;
    for (const DocumentRecord& rec : gold.records) {
        auto it = run.find(rec.id);
        const SuggestionList& pred = it == run.end() ? kEmpty : it->second;
        // Headline F1@5 coincides with the k=5 threshold metric; assigning
        // into a per-document map keeps it counted once.
        std::map<std::string, double> doc;
        doc["F1@5"] = f1_at_k(pred, rec.subjects, 5);
        doc["nDCG@10"] = ndcg_at_k(pred, rec.subjects, 10);
        for (int k : thresholds) {
            doc[metric_key("P", k)] = precision_at_k(pred, rec.subjects, static_cast<std::size_t>(k));
            doc[metric_key("R", k)] = recall_at_k(pred, rec.subjects, static_cast<std::size_t>(k));
            doc[metric_key("F1", k)] = f1_at_k(pred, rec.subjects, static_cast<std::size_t>(k));
        }
        for (const auto& [name, value] : doc) sums[name] += value;
    }
    const double n = static_cast<double>(gold.size());
    for (auto& [name, value] : sums) report.per_metric[name] = value / n;

    double avg_recall = 0.0;
    for (int k : thresholds) avg_recall += report.per_metric[metric_key("R", k)];
    report.per_metric["avg_recall"] = avg_recall / static_cast<double>(thresholds.size());
    return report;
}

std::string format_report_table(const EvaluationReport& report) {
    std::ostringstream out;
    std::set<std::string> printed;
    auto row = [&](const std::string& name, double value) {
        if (!printed.insert(name).second) return;
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.4f", value);
        out << name;
        for (std::size_t i = name.size(); i < 12; ++i) out << ' ';
        out << buf << '\n';
    };
    row("F1@5", report.per_metric.at("F1@5"));
    row("nDCG@10", report.per_metric.at("nDCG@10"));
    for (int k : report.thresholds) {
        row(metric_key("P", k), report.per_metric.at(metric_key("P", k)));
        row(metric_key("R", k), report.per_metric.at(metric_key("R", k)));
        row(metric_key("F1", k), report.per_metric.at(metric_key("F1", k)));
    }
    row("avg_recall", report.per_metric.at("avg_recall"));
    out << "documents   " << report.n_documents << '\n';
    return out.str();
}

nlohmann::json report_to_json(const EvaluationReport& report) {
    return nlohmann::json{{"metrics", report.per_metric},
                          {"thresholds", report.thresholds},
                          {"n_documents", report.n_documents}};
}

}  // namespace subjidx
