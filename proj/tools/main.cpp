#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "subjidx/corpus.hpp"
#include "subjidx/ensemble.hpp"
#include "subjidx/errors.hpp"
#include "subjidx/evaluation.hpp"
#include "subjidx/hyperopt.hpp"
#include "subjidx/lexical.hpp"
#include "subjidx/llm.hpp"
#include "subjidx/project_config.hpp"
#include "subjidx/run_io.hpp"
#include "subjidx/tree.hpp"
#include "subjidx/vocabulary.hpp"

namespace fs = std::filesystem;
using namespace subjidx;

namespace {

// ---------------------------------------------------------------------------
// shared option bundles
// ---------------------------------------------------------------------------

struct EndpointFlags {
    bool mock = false;
    std::string base_url = "http://localhost:8000/v1";
    std::string model = "default";
    double temperature = 0.0;
    int max_in_flight = 4;
    int timeout_seconds = 60;
    int retries = 2;
    std::string prompts_dir;
};

void add_endpoint_flags(CLI::App* cmd, EndpointFlags& flags) {
    cmd->add_flag("--mock", flags.mock, "Use the deterministic offline endpoint");
    cmd->add_option("--base-url", flags.base_url, "Chat-completions base URL (e.g. .../v1)");
    cmd->add_option("--model", flags.model, "Model name sent with each request");
    cmd->add_option("--temperature", flags.temperature, "Sampling temperature (default 0)");
    cmd->add_option("--max-in-flight", flags.max_in_flight, "Concurrent request bound");
    cmd->add_option("--timeout", flags.timeout_seconds, "Per-request timeout in seconds");
    cmd->add_option("--retries", flags.retries, "Retries per request");
    cmd->add_option("--prompts-dir", flags.prompts_dir,
                    "Load prompt templates from this directory instead of the built-ins");
}

std::unique_ptr<ChatEndpoint> make_endpoint(const EndpointFlags& flags) {
    if (flags.mock) return std::make_unique<MockChatEndpoint>();
    LlmEndpointConfig config;
    config.base_url = flags.base_url;
    config.model = flags.model;
    config.api_key = api_key_from_env();
    config.temperature = flags.temperature;
    config.max_in_flight = flags.max_in_flight;
    config.timeout_seconds = flags.timeout_seconds;
    config.retries = flags.retries;
    return std::make_unique<HttpChatEndpoint>(std::move(config));
}

struct Prompts {
    PromptTemplate translate = record_translation_template();
    PromptTemplate synthesize = record_synthesis_template();
    PromptTemplate terms = term_translation_template();
};

Prompts load_prompts(const std::string& dir) {
    Prompts p;
    if (dir.empty()) return p;
    p.translate = PromptTemplate::load(dir + "/translate_record.txt");
    p.synthesize = PromptTemplate::load(dir + "/synthesize_record.txt");
    p.terms = PromptTemplate::load(dir + "/translate_terms.txt");
    return p;
}

// ---------------------------------------------------------------------------
// vocabulary / model loading
// ---------------------------------------------------------------------------

SubjectVocabulary load_vocab_file(const std::string& path, std::string format,
                                  const std::string& variant,
                                  const AnalyzerConfig& normalization) {
    if (format.empty()) {
        std::string ext = fs::path(path).extension().string();
        format = (ext == ".nt" || ext == ".ntriples") ? "ntriples" : "tsv";
    }
    if (format == "ntriples") return load_vocabulary_ntriples(path, variant, normalization);
    return load_vocabulary_tsv(path, variant, normalization);
}

SubjectVocabulary load_vocab_for(const ProjectConfig& cfg) {
    return load_vocab_file(cfg.vocabulary_path, cfg.vocab_format, cfg.variant, cfg.analyzer);
}

std::string model_path(const std::string& data_dir, const std::string& project) {
    return data_dir + "/" + project + "/model.json";
}

void save_model_json(const std::string& data_dir, const std::string& project,
                     const nlohmann::json& j) {
    fs::create_directories(fs::path(data_dir) / project);
    const std::string path = model_path(data_dir, project);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << j.dump(2) << '\n';
    if (!out) throw IoError("write failed: " + path);
}

nlohmann::json load_model_json(const std::string& data_dir, const std::string& project) {
    const std::string path = model_path(data_dir, project);
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("no trained model for project \"" + project + "\" (expected " + path + ")");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    return j;
}

// ---------------------------------------------------------------------------
// project execution
// ---------------------------------------------------------------------------

void train_project(const ProjectConfig& cfg, const std::vector<ProjectConfig>& configs,
                   const Corpus& corpus, const std::string& data_dir);

Run run_project(const ProjectConfig& cfg, const std::vector<ProjectConfig>& configs,
                const Corpus& corpus, const std::string& data_dir, std::size_t limit,
                int beam_width_override = 0) {
    Run run;
    switch (cfg.backend) {
        case BackendKind::lexical: {
            LexicalModel model = LexicalModel::from_json(load_model_json(data_dir, cfg.name));
            SubjectVocabulary vocab = load_vocab_for(cfg);
            for (const DocumentRecord& rec : corpus.records)
                run[rec.id] =
                    suggest_lexical(model, document_text(rec), vocab, cfg.language, limit);
            break;
        }
        case BackendKind::tree: {
            TreeModel model = TreeModel::from_json(load_model_json(data_dir, cfg.name));
            const int beam = beam_width_override > 0 ? beam_width_override : model.beam_width;
            for (const DocumentRecord& rec : corpus.records)
                run[rec.id] = suggest_tree(model, document_text(rec), beam, limit);
            break;
        }
        case BackendKind::simple_ensemble: {
            std::vector<Run> member_runs;
            std::vector<double> weights;
            for (const MemberRef& ref : cfg.members) {
                member_runs.push_back(run_project(find_project(configs, ref.project), configs,
                                                  corpus, data_dir, kMemberPoolLimit,
                                                  beam_width_override));
                weights.push_back(ref.weight);
            }
            for (const DocumentRecord& rec : corpus.records) {
                std::vector<SuggestionList> lists;
                lists.reserve(member_runs.size());
                for (const Run& r : member_runs) lists.push_back(r.at(rec.id));
                run[rec.id] = weighted_average(lists, weights, limit);
            }
            break;
        }
        case BackendKind::neural_ensemble: {
            nlohmann::json j = load_model_json(data_dir, cfg.name);
            if (j.value("kind", "") != std::string("neural_ensemble"))
                throw ParseError("expected a neural ensemble model for \"" + cfg.name + "\"");
            NeuralAdjuster adjuster = NeuralAdjuster::from_json(j.at("adjuster"));
            std::vector<Run> member_runs;
            for (const MemberRef& ref : cfg.members)
                member_runs.push_back(run_project(find_project(configs, ref.project), configs,
                                                  corpus, data_dir, kMemberPoolLimit,
                                                  beam_width_override));
            for (const DocumentRecord& rec : corpus.records) {
                std::vector<SuggestionList> lists;
                lists.reserve(member_runs.size());
                for (const Run& r : member_runs) lists.push_back(r.at(rec.id));
                run[rec.id] = suggest_neural(adjuster, lists, limit);
            }
            break;
        }
        case BackendKind::xtransformer:
            throw Error("project \"" + cfg.name +
                        "\": the xtransformer backend is a configuration slot only; no "
                        "implementation is available");
    }
    return run;
}

void train_project(const ProjectConfig& cfg, const std::vector<ProjectConfig>& configs,
                   const Corpus& corpus, const std::string& data_dir) {
    switch (cfg.backend) {
        case BackendKind::lexical: {
            SubjectVocabulary vocab = load_vocab_for(cfg);
            LexicalModel model = train_lexical(corpus, vocab, cfg.language, cfg.analyzer, cfg.seed);
            save_model_json(data_dir, cfg.name, model.to_json());
            break;
        }
        case BackendKind::tree: {
            SubjectVocabulary vocab = load_vocab_for(cfg);
            TreeTrainOptions options;
            options.fanout = cfg.fanout;
            options.max_depth = cfg.max_depth;
            options.beam_width = cfg.beam_width;
            options.seed = cfg.seed;
            TreeModel model = train_tree(corpus, vocab, cfg.analyzer, options);
            save_model_json(data_dir, cfg.name, model.to_json());
            break;
        }
        case BackendKind::simple_ensemble: {
            nlohmann::json members = nlohmann::json::array();
            for (const MemberRef& ref : cfg.members) {
                load_model_json(data_dir, ref.project);  // must exist
                members.push_back({{"project", ref.project}, {"weight", ref.weight}});
            }
            save_model_json(data_dir, cfg.name,
                            {{"kind", "simple_ensemble"}, {"members", members}});
            break;
        }
        case BackendKind::neural_ensemble: {
            std::vector<Run> member_runs;
            nlohmann::json members = nlohmann::json::array();
            for (const MemberRef& ref : cfg.members) {
                member_runs.push_back(run_project(find_project(configs, ref.project), configs,
                                                  corpus, data_dir, kMemberPoolLimit));
                members.push_back({{"project", ref.project}, {"weight", ref.weight}});
            }
            NeuralAdjusterConfig nc;
            nc.hidden_units = cfg.hidden_units;
            nc.epochs = cfg.epochs;
            nc.seed = cfg.seed;
            NeuralAdjuster adjuster = train_neural(nc, member_runs, corpus);
            save_model_json(
                data_dir, cfg.name,
                {{"kind", "neural_ensemble"}, {"members", members}, {"adjuster", adjuster.to_json()}});
            break;
        }
        case BackendKind::xtransformer:
            throw Error("project \"" + cfg.name +
                        "\": the xtransformer backend is a configuration slot only; no "
                        "implementation is available");
    }
}

// ---------------------------------------------------------------------------
// run merging
// ---------------------------------------------------------------------------

std::string canonical_doc_id(const std::string& id) {
    if (id.size() > 3 && (id.ends_with("-de") || id.ends_with("-en")))
        return id.substr(0, id.size() - 3);
    return id;
}

Run canonicalize_run(const Run& run) {
    Run out;
    for (const auto& [doc_id, list] : run) {
        std::string canon = canonical_doc_id(doc_id);
        if (!out.emplace(canon, list).second)
            throw ValidationError("doc ids \"" + canon + "\" collide after suffix stripping");
    }
    return out;
}

Run merge_runs(const Run& run_a, const Run& run_b, std::size_t limit) {
    Run a = canonicalize_run(run_a);
    Run b = canonicalize_run(run_b);
    Run merged;
    for (const auto& [doc_id, list] : a) {
        auto it = b.find(doc_id);
        if (it == b.end()) {
            SuggestionList copy = list;
            copy.truncate(limit);
            merged[doc_id] = std::move(copy);
        } else {
            merged[doc_id] = merge_multilingual(list, it->second, limit);
        }
    }
    for (const auto& [doc_id, list] : b) {
        if (merged.count(doc_id)) continue;
        SuggestionList copy = list;
        copy.truncate(limit);
        merged[doc_id] = std::move(copy);
    }
    return merged;
}

// ---------------------------------------------------------------------------
// misc helpers
// ---------------------------------------------------------------------------

std::vector<int> parse_thresholds(const std::string& flag) {
    if (flag.empty()) return default_thresholds();
    std::vector<int> out;
    std::size_t start = 0;
    while (start <= flag.size()) {
        std::size_t comma = flag.find(',', start);
        std::string item =
            flag.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        start = comma == std::string::npos ? flag.size() + 1 : comma + 1;
        if (item.empty()) continue;
        try {
            out.push_back(std::stoi(item));
        } catch (const std::exception&) {
            throw UsageError("invalid threshold \"" + item + "\"");
        }
        if (out.back() < 1) throw UsageError("thresholds must be >= 1");
    }
    if (out.empty()) throw UsageError("no thresholds given");
    return out;
}

void ensure_parent_dir(const std::string& path) {
    fs::path parent = fs::path(path).parent_path();
    if (!parent.empty()) fs::create_directories(parent);
}

void write_report(const EvaluationReport& report, const std::string& title,
                  const std::string& json_path) {
    std::cout << "== " << title << " ==\n" << format_report_table(report);
    if (!json_path.empty()) {
        ensure_parent_dir(json_path);
        std::ofstream out(json_path, std::ios::binary);
        if (!out) throw IoError("cannot write " + json_path);
        out << report_to_json(report).dump(2) << '\n';
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"subjidx: automated subject indexing toolkit"};
    app.require_subcommand(1);

    std::string config_path = "configs/projects.cfg";
    std::string data_dir = "data";
    app.add_option("-c,--config", config_path, "Project configuration file")
        ->envname("SUBJIDX_CONFIG");
    app.add_option("--data-dir", data_dir, "Directory holding trained models");

    // --- load-vocab ---
    auto* cmd_load_vocab = app.add_subcommand("load-vocab", "Load and validate a vocabulary");
    struct {
        std::string vocab, format, variant = "all", subset_ids, subset_variant = "subset", out;
    } lv;
    cmd_load_vocab->add_option("--vocab", lv.vocab, "Vocabulary file (TSV or N-Triples)")
        ->required();
    cmd_load_vocab->add_option("--format", lv.format, "tsv | ntriples (default: by extension)");
    cmd_load_vocab->add_option("--variant", lv.variant, "Variant name for the loaded vocabulary");
    cmd_load_vocab->add_option("--subset", lv.subset_ids, "Restrict to the ids listed in a file");
    cmd_load_vocab->add_option("--subset-variant", lv.subset_variant,
                               "Variant name for the subset");
    cmd_load_vocab->add_option("--out", lv.out, "Write the (subsetted) vocabulary as TSV");

    // --- train ---
    auto* cmd_train = app.add_subcommand("train", "Train a project on a corpus");
    struct {
        std::string project, corpus;
        std::uint64_t seed = 0;
    } tr;
    cmd_train->add_option("project", tr.project, "Project name from the configuration")->required();
    cmd_train->add_option("--corpus", tr.corpus, "Training corpus (JSONL)")->required();
    auto* tr_seed = cmd_train->add_option("--seed", tr.seed, "Override the project's seed");

    // --- suggest ---
    auto* cmd_suggest = app.add_subcommand("suggest", "Produce a run file for a corpus");
    struct {
        std::string project, corpus, out = "runs/run.tsv";
        std::size_t limit = 50;
        int beam_width = 0;
    } su;
    cmd_suggest->add_option("project", su.project)->required();
    cmd_suggest->add_option("--corpus", su.corpus, "Input corpus (JSONL)")->required();
    cmd_suggest->add_option("--limit", su.limit, "Suggestions per document (default 50)");
    cmd_suggest->add_option("--beam-width", su.beam_width, "Override the tree beam width");
    cmd_suggest->add_option("--out", su.out, "Run file to write");

    // --- eval ---
    auto* cmd_eval = app.add_subcommand("eval", "Evaluate a run against gold subjects");
    struct {
        std::string run, gold, thresholds, json_out;
    } ev;
    cmd_eval->add_option("--run", ev.run, "Run file (TSV)")->required();
    cmd_eval->add_option("--gold", ev.gold, "Gold corpus (JSONL with subjects)")->required();
    cmd_eval->add_option("--thresholds", ev.thresholds,
                         "Comma-separated list (default 5,10,...,50)");
    cmd_eval->add_option("--json", ev.json_out, "Also write the report as JSON");

    // --- merge-runs ---
    auto* cmd_merge = app.add_subcommand("merge-runs", "Merge two monolingual runs");
    struct {
        std::string run_a, run_b, out;
        std::size_t limit = 50;
    } mr;
    cmd_merge->add_option("--run-a", mr.run_a)->required();
    cmd_merge->add_option("--run-b", mr.run_b)->required();
    cmd_merge->add_option("--limit", mr.limit, "Suggestions per document (default 50)");
    cmd_merge->add_option("--out", mr.out, "Merged run file")->required();

    // --- hyperopt ---
    auto* cmd_hyperopt =
        app.add_subcommand("hyperopt", "Optimize ensemble weights on a development corpus");
    struct {
        std::string project, corpus;
        int trials = 100;
        std::uint64_t seed = 42;
    } hy;
    cmd_hyperopt->add_option("project", hy.project)->required();
    cmd_hyperopt->add_option("--corpus", hy.corpus, "Development corpus (JSONL)")->required();
    cmd_hyperopt->add_option("--trials", hy.trials, "Weight draws to evaluate (default 100)");
    cmd_hyperopt->add_option("--seed", hy.seed, "Random seed");

    // --- translate ---
    auto* cmd_translate = app.add_subcommand("translate", "Translate a corpus with an LLM");
    struct {
        std::string corpus, target, out;
    } tl;
    EndpointFlags tl_ep;
    cmd_translate->add_option("--corpus", tl.corpus)->required();
    cmd_translate->add_option("--target-language", tl.target, "de | en")->required();
    cmd_translate->add_option("--out", tl.out, "Translated corpus (JSONL)")->required();
    add_endpoint_flags(cmd_translate, tl_ep);

    // --- translate-vocab ---
    auto* cmd_translate_vocab = app.add_subcommand(
        "translate-vocab", "Fill missing English preferred labels via an LLM");
    struct {
        std::string vocab, format, variant = "all", out;
        std::size_t batch_size = 100;
    } tv;
    EndpointFlags tv_ep;
    cmd_translate_vocab->add_option("--vocab", tv.vocab)->required();
    cmd_translate_vocab->add_option("--format", tv.format, "tsv | ntriples");
    cmd_translate_vocab->add_option("--variant", tv.variant);
    cmd_translate_vocab->add_option("--out", tv.out, "Output vocabulary (TSV)")->required();
    cmd_translate_vocab->add_option("--batch-size", tv.batch_size, "Terms per request");
    add_endpoint_flags(cmd_translate_vocab, tv_ep);

    // --- synthesize ---
    auto* cmd_synthesize =
        app.add_subcommand("synthesize", "Generate synthetic training records");
    struct {
        std::string corpus, vocab, format, variant = "all", out_prefix, mix_out;
        int passes = 3;
        std::uint64_t seed = 42;
    } sy;
    EndpointFlags sy_ep;
    cmd_synthesize->add_option("--corpus", sy.corpus)->required();
    cmd_synthesize->add_option("--vocab", sy.vocab)->required();
    cmd_synthesize->add_option("--format", sy.format, "tsv | ntriples");
    cmd_synthesize->add_option("--variant", sy.variant);
    cmd_synthesize->add_option("--out-prefix", sy.out_prefix, "Writes <prefix>-part<k>.jsonl")
        ->required();
    cmd_synthesize->add_option("--passes", sy.passes, "Synthetic parts to generate (default 3)");
    cmd_synthesize->add_option("--seed", sy.seed, "Random seed");
    cmd_synthesize->add_option("--mix-out", sy.mix_out,
                               "Also write original + parts as one mixed corpus");
    add_endpoint_flags(cmd_synthesize, sy_ep);

    // --- pipeline ---
    auto* cmd_pipeline = app.add_subcommand(
        "pipeline", "translate -> synthesize -> train -> suggest -> merge -> eval");
    struct {
        std::string project_de, project_en, train, test, dev, out_dir = "pipeline-out";
        int passes = 3;
        std::uint64_t seed = 42;
        std::size_t limit = 50;
    } pl;
    EndpointFlags pl_ep;
    cmd_pipeline->add_option("--project-de", pl.project_de, "German project name")->required();
    cmd_pipeline->add_option("--project-en", pl.project_en, "English project name")->required();
    cmd_pipeline->add_option("--train", pl.train, "Training corpus (JSONL)")->required();
    cmd_pipeline->add_option("--test", pl.test, "Test corpus with gold subjects (JSONL)")
        ->required();
    cmd_pipeline->add_option("--dev", pl.dev, "Development corpus (needed for neural ensembles)");
    cmd_pipeline->add_option("--out-dir", pl.out_dir, "Output directory");
    cmd_pipeline->add_option("--passes", pl.passes, "Synthetic parts per language (default 3)");
    cmd_pipeline->add_option("--seed", pl.seed, "Random seed");
    cmd_pipeline->add_option("--limit", pl.limit, "Suggestions per document (default 50)");
    add_endpoint_flags(cmd_pipeline, pl_ep);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*cmd_load_vocab) {
            SubjectVocabulary vocab = load_vocab_file(lv.vocab, lv.format, lv.variant, {});
            std::cout << "loaded " << vocab.size() << " subjects (variant \"" << vocab.variant_name()
                      << "\")\n";
            std::cout << "languages:";
            for (const std::string& lang : vocab.languages()) std::cout << ' ' << lang;
            std::cout << '\n';
            if (!lv.subset_ids.empty()) {
                SubsetResult sub = subset(vocab, lv.subset_ids, lv.subset_variant);
                for (const std::string& w : sub.warnings) std::cerr << "warning: " << w << '\n';
                std::cout << "subset \"" << lv.subset_variant << "\": " << sub.vocabulary.size()
                          << " subjects\n";
                vocab = std::move(sub.vocabulary);
            }
            if (!lv.out.empty()) {
                ensure_parent_dir(lv.out);
                save_vocabulary_tsv(vocab, lv.out);
                std::cout << "wrote " << lv.out << '\n';
            }
        } else if (*cmd_train) {
            std::vector<ProjectConfig> configs = load_config(config_path);
            ProjectConfig cfg = find_project(configs, tr.project);
            if (tr_seed->count() > 0) cfg.seed = tr.seed;
            Corpus corpus = load_corpus_jsonl(tr.corpus);
            train_project(cfg, configs, corpus, data_dir);
            std::cout << "trained \"" << cfg.name << "\" -> " << model_path(data_dir, cfg.name)
                      << '\n';
        } else if (*cmd_suggest) {
            std::vector<ProjectConfig> configs = load_config(config_path);
            const ProjectConfig& cfg = find_project(configs, su.project);
            Corpus corpus = load_corpus_jsonl(su.corpus);
            Run run = run_project(cfg, configs, corpus, data_dir, su.limit, su.beam_width);
            ensure_parent_dir(su.out);
            write_run_file(run, su.out);
            std::cout << "wrote " << su.out << " (" << run.size() << " documents)\n";
        } else if (*cmd_eval) {
            Run run = read_run_file(ev.run);
            Corpus gold = load_corpus_jsonl(ev.gold);
            for (const auto& [doc_id, list] : run) {
                if (gold.find(doc_id) == nullptr)
                    std::cerr << "warning: run document \"" << doc_id << "\" absent from gold\n";
            }
            EvaluationReport report = evaluate_run(run, gold, parse_thresholds(ev.thresholds));
            write_report(report, ev.run, ev.json_out);
        } else if (*cmd_merge) {
            Run merged = merge_runs(read_run_file(mr.run_a), read_run_file(mr.run_b), mr.limit);
            ensure_parent_dir(mr.out);
            write_run_file(merged, mr.out);
            std::cout << "wrote " << mr.out << " (" << merged.size() << " documents)\n";
        } else if (*cmd_hyperopt) {
            std::vector<ProjectConfig> configs = load_config(config_path);
            const ProjectConfig& cfg = find_project(configs, hy.project);
            if (!backend_is_ensemble(cfg.backend))
                throw Error("project \"" + cfg.name + "\" is not an ensemble");
            Corpus dev = load_corpus_jsonl(hy.corpus);
            std::vector<Run> member_runs;
            for (const MemberRef& ref : cfg.members)
                member_runs.push_back(run_project(find_project(configs, ref.project), configs, dev,
                                                  data_dir, kMemberPoolLimit));
            HyperoptResult result = optimize_weights(
                member_runs, dev, hy.trials, hy.seed,
                [&](std::size_t t, const HyperoptTrial& trial) {
                    std::printf("trial %3zu  nDCG@10 %.4f  weights", t, trial.score);
                    for (double w : trial.weights) std::printf(" %.4f", w);
                    std::printf("\n");
                });
            std::printf("best trial %zu  nDCG@10 %.4f\n", result.best_trial, result.best_score);
            std::cout << "members = ";
            for (std::size_t m = 0; m < cfg.members.size(); ++m) {
                char buf[32];
                std::snprintf(buf, sizeof(buf), "%.4f", result.weights[m]);
                std::cout << (m ? ", " : "") << cfg.members[m].project << '=' << buf;
            }
            std::cout << '\n';
        } else if (*cmd_translate) {
            if (tl.target != "de" && tl.target != "en")
                throw UsageError("--target-language must be de or en");
            Prompts prompts = load_prompts(tl_ep.prompts_dir);
            std::unique_ptr<ChatEndpoint> endpoint = make_endpoint(tl_ep);
            Corpus corpus = load_corpus_jsonl(tl.corpus);
            Corpus translated =
                translate_corpus(corpus, tl.target, *endpoint, tl_ep.max_in_flight, prompts.translate);
            ensure_parent_dir(tl.out);
            save_corpus_jsonl(translated, tl.out);
            std::cout << "wrote " << tl.out << " (" << translated.size() << " records)\n";
        } else if (*cmd_translate_vocab) {
            Prompts prompts = load_prompts(tv_ep.prompts_dir);
            std::unique_ptr<ChatEndpoint> endpoint = make_endpoint(tv_ep);
            SubjectVocabulary vocab = load_vocab_file(tv.vocab, tv.format, tv.variant, {});
            SubjectVocabulary translated =
                translate_vocabulary_terms(vocab, *endpoint, tv.batch_size,
                                           tv_ep.max_in_flight, prompts.terms);
            ensure_parent_dir(tv.out);
            save_vocabulary_tsv(translated, tv.out);
            std::cout << "wrote " << tv.out << '\n';
        } else if (*cmd_synthesize) {
            Prompts prompts = load_prompts(sy_ep.prompts_dir);
            std::unique_ptr<ChatEndpoint> endpoint = make_endpoint(sy_ep);
            Corpus corpus = load_corpus_jsonl(sy.corpus);
            SubjectVocabulary vocab = load_vocab_file(sy.vocab, sy.format, sy.variant, {});
            std::vector<Corpus> parts;
            for (int p = 1; p <= sy.passes; ++p) {
                parts.push_back(synthesize_corpus(corpus, vocab, *endpoint, sy.seed, p,
                                                  sy_ep.max_in_flight, prompts.synthesize));
                std::string path = sy.out_prefix + "-part" + std::to_string(p) + ".jsonl";
                ensure_parent_dir(path);
                save_corpus_jsonl(parts.back(), path);
                std::cout << "wrote " << path << " (" << parts.back().size() << " records)\n";
            }
            if (!sy.mix_out.empty()) {
                Corpus mixed = mix_synthetic(corpus, parts);
                ensure_parent_dir(sy.mix_out);
                save_corpus_jsonl(mixed, sy.mix_out);
                std::cout << "wrote " << sy.mix_out << " (" << mixed.size() << " records)\n";
            }
        } else if (*cmd_pipeline) {
            std::vector<ProjectConfig> configs = load_config(config_path);
            const ProjectConfig& project_de = find_project(configs, pl.project_de);
            const ProjectConfig& project_en = find_project(configs, pl.project_en);
            Prompts prompts = load_prompts(pl_ep.prompts_dir);
            std::unique_ptr<ChatEndpoint> endpoint = make_endpoint(pl_ep);
            const std::string models_dir = pl.out_dir + "/models";
            fs::create_directories(pl.out_dir + "/corpora");
            fs::create_directories(pl.out_dir + "/runs");
            fs::create_directories(pl.out_dir + "/reports");

            Corpus train_corpus = load_corpus_jsonl(pl.train);
            Corpus test_corpus = load_corpus_jsonl(pl.test);
            std::optional<Corpus> dev_corpus;
            if (!pl.dev.empty()) dev_corpus = load_corpus_jsonl(pl.dev);

            std::map<std::string, Corpus> train_tr, test_tr, dev_tr;
            for (const std::string& lang : {std::string("de"), std::string("en")}) {
                train_tr[lang] = translate_corpus(train_corpus, lang, *endpoint,
                                                  pl_ep.max_in_flight, prompts.translate);
                save_corpus_jsonl(train_tr[lang], pl.out_dir + "/corpora/train-" + lang + ".jsonl");
                test_tr[lang] = translate_corpus(test_corpus, lang, *endpoint,
                                                 pl_ep.max_in_flight, prompts.translate);
                save_corpus_jsonl(test_tr[lang], pl.out_dir + "/corpora/test-" + lang + ".jsonl");
                if (dev_corpus) {
                    dev_tr[lang] = translate_corpus(*dev_corpus, lang, *endpoint,
                                                    pl_ep.max_in_flight, prompts.translate);
                    save_corpus_jsonl(dev_tr[lang], pl.out_dir + "/corpora/dev-" + lang + ".jsonl");
                }
            }

            for (const ProjectConfig* ensemble : {&project_de, &project_en}) {
                std::vector<const ProjectConfig*> bases;
                if (backend_is_ensemble(ensemble->backend)) {
                    for (const MemberRef& ref : ensemble->members)
                        bases.push_back(&find_project(configs, ref.project));
                } else {
                    bases.push_back(ensemble);
                }
                for (const ProjectConfig* base : bases) {
                    Corpus corpus = train_tr.at(base->language);
                    if (base->use_synthetic && pl.passes > 0) {
                        SubjectVocabulary vocab = load_vocab_for(*base);
                        std::vector<Corpus> parts;
                        for (int p = 1; p <= pl.passes; ++p)
                            parts.push_back(synthesize_corpus(corpus, vocab, *endpoint, pl.seed, p,
                                                              pl_ep.max_in_flight,
                                                              prompts.synthesize));
                        corpus = mix_synthetic(corpus, parts);
                        save_corpus_jsonl(corpus, pl.out_dir + "/corpora/train-" + base->language +
                                                      "-mixed-" + base->name + ".jsonl");
                    }
                    std::cout << "training " << base->name << " on " << corpus.size()
                              << " records\n";
                    train_project(*base, configs, corpus, models_dir);
                }
                if (ensemble->backend == BackendKind::neural_ensemble) {
                    if (!dev_corpus)
                        throw UsageError("project \"" + ensemble->name +
                                         "\" is a neural ensemble; pass --dev");
                    train_project(*ensemble, configs, dev_tr.at(ensemble->language), models_dir);
                } else if (ensemble->backend == BackendKind::simple_ensemble) {
                    train_project(*ensemble, configs, train_tr.at(ensemble->language), models_dir);
                }
            }

            Run run_de =
                run_project(project_de, configs, test_tr.at(project_de.language), models_dir, pl.limit);
            Run run_en =
                run_project(project_en, configs, test_tr.at(project_en.language), models_dir, pl.limit);
            write_run_file(run_de, pl.out_dir + "/runs/de.tsv");
            write_run_file(run_en, pl.out_dir + "/runs/en.tsv");
            Run merged = merge_runs(run_de, run_en, pl.limit);
            write_run_file(merged, pl.out_dir + "/runs/merged.tsv");

            write_report(evaluate_run(run_de, test_tr.at(project_de.language)), "run de",
                         pl.out_dir + "/reports/de.json");
            write_report(evaluate_run(run_en, test_tr.at(project_en.language)), "run en",
                         pl.out_dir + "/reports/en.json");
            write_report(evaluate_run(merged, test_corpus), "run merged (de+en)",
                         pl.out_dir + "/reports/merged.json");
        }
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
