#include "subjidx/project_config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "subjidx/ensemble.hpp"
#include "subjidx/errors.hpp"

namespace subjidx {

namespace {

std::string trim(std::string_view s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void fail(const std::string& section, const std::string& msg) {
    throw ConfigError("[" + section + "] " + msg);
}

int parse_int(const std::string& section, const std::string& key, const std::string& value) {
    int out = 0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc() || ptr != value.data() + value.size())
        fail(section, key + ": expected an integer, got \"" + value + "\"");
    return out;
}

double parse_double(const std::string& section, const std::string& key, const std::string& value) {
    double out = 0.0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc() || ptr != value.data() + value.size())
        fail(section, key + ": expected a number, got \"" + value + "\"");
    return out;
}

bool parse_bool(const std::string& section, const std::string& key, const std::string& value) {
    if (value == "true") return true;
    if (value == "false") return false;
    fail(section, key + ": expected true or false, got \"" + value + "\"");
}

std::vector<MemberRef> parse_members(const std::string& section, const std::string& value) {
    std::vector<MemberRef> members;
    std::size_t start = 0;
    while (start <= value.size()) {
        std::size_t comma = value.find(',', start);
        std::string item = trim(value.substr(
            start, comma == std::string::npos ? std::string::npos : comma - start));
        start = comma == std::string::npos ? value.size() + 1 : comma + 1;
        if (item.empty()) continue;
        std::size_t eq = item.find('=');
        if (eq == std::string::npos)
            fail(section, "members: expected \"project=weight\", got \"" + item + "\"");
        MemberRef ref;
        ref.project = trim(item.substr(0, eq));
        ref.weight = parse_double(section, "members", trim(item.substr(eq + 1)));
        if (ref.project.empty()) fail(section, "members: empty project name");
        members.push_back(std::move(ref));
    }
    return members;
}

const std::set<std::string>& keys_for(BackendKind kind) {
    static const std::set<std::string> kCommon = {"backend", "vocabulary", "vocab_format",
                                                  "variant", "language", "seed"};
    static const std::set<std::string> kAnalyzer = {"normalizer", "min_token_len", "ngram",
                                                    "min_df"};
    static const auto make = [](std::initializer_list<const std::set<std::string>*> groups,
                                std::initializer_list<const char*> extra) {
        std::set<std::string> out;
        for (const auto* g : groups) out.insert(g->begin(), g->end());
        for (const char* k : extra) out.insert(k);
        return out;
    };
    static const std::set<std::string> kLexical = make({&kCommon, &kAnalyzer}, {"synthetic"});
    static const std::set<std::string> kTree =
        make({&kCommon, &kAnalyzer}, {"synthetic", "fanout", "max_depth", "beam_width"});
    static const std::set<std::string> kSimple = make({&kCommon}, {"members"});
    static const std::set<std::string> kNeural =
        make({&kCommon}, {"members", "hidden_units", "epochs"});
    static const std::set<std::string> kXtrans = make({&kCommon, &kAnalyzer}, {"synthetic"});
    switch (kind) {
        case BackendKind::lexical: return kLexical;
        case BackendKind::tree: return kTree;
        case BackendKind::simple_ensemble: return kSimple;
        case BackendKind::neural_ensemble: return kNeural;
        case BackendKind::xtransformer: return kXtrans;
    }
    return kCommon;
}

}  // namespace

std::string to_string(BackendKind k) {
    switch (k) {
        case BackendKind::lexical: return "lexical";
        case BackendKind::tree: return "tree";
        case BackendKind::simple_ensemble: return "simple_ensemble";
        case BackendKind::neural_ensemble: return "neural_ensemble";
        case BackendKind::xtransformer: return "xtransformer";
    }
    return "lexical";
}

BackendKind backend_kind_from_string(const std::string& s, const std::string& section) {
    if (s == "lexical") return BackendKind::lexical;
    if (s == "tree") return BackendKind::tree;
    if (s == "simple_ensemble") return BackendKind::simple_ensemble;
    if (s == "neural_ensemble") return BackendKind::neural_ensemble;
    if (s == "xtransformer") return BackendKind::xtransformer;
    fail(section, "unknown backend kind \"" + s + "\"");
}

bool backend_is_ensemble(BackendKind k) {
    return k == BackendKind::simple_ensemble || k == BackendKind::neural_ensemble;
}

std::vector<ProjectConfig> parse_config(const std::string& text, const std::string& source_name) {
    struct Section {
        std::string name;
        std::vector<std::pair<std::string, std::string>> entries;
    };
    std::vector<Section> sections;
    std::set<std::string> section_names;

    std::istringstream in(text);
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = trim(raw);
        if (line.empty() || line[0] == '#') continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError(source_name + " line " + std::to_string(line_no) +
                                  ": unterminated section header");
            std::string name = trim(line.substr(1, line.size() - 2));
            if (name.empty())
                throw ConfigError(source_name + " line " + std::to_string(line_no) +
                                  ": empty section name");
            if (!section_names.insert(name).second)
                throw ConfigError("duplicate section [" + name + "]");
            sections.push_back({name, {}});
            continue;
        }
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(source_name + " line " + std::to_string(line_no) +
                              ": expected \"key = value\"");
        if (sections.empty())
            throw ConfigError(source_name + " line " + std::to_string(line_no) +
                              ": key outside any section");
        sections.back().entries.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }

    std::vector<ProjectConfig> configs;
    for (const Section& section : sections) {
        ProjectConfig cfg;
        cfg.name = section.name;

        // The backend kind decides which keys are legal; find it first.
        for (const auto& [key, value] : section.entries) {
            if (key == "backend") cfg.backend = backend_kind_from_string(value, section.name);
        }
        bool saw_backend = false;
        bool saw_synthetic = false;
        std::set<std::string> seen_keys;
        for (const auto& [key, value] : section.entries) {
            if (!keys_for(cfg.backend).count(key))
                fail(section.name, "unknown key \"" + key + "\" for backend " +
                                       to_string(cfg.backend));
            if (!seen_keys.insert(key).second) fail(section.name, "duplicate key \"" + key + "\"");
            if (key == "backend") {
                saw_backend = true;
            } else if (key == "vocabulary") {
                cfg.vocabulary_path = value;
            } else if (key == "vocab_format") {
                if (value != "tsv" && value != "ntriples")
                    fail(section.name, "vocab_format must be tsv or ntriples");
                cfg.vocab_format = value;
            } else if (key == "variant") {
                cfg.variant = value;
            } else if (key == "language") {
                cfg.language = value;
            } else if (key == "normalizer") {
                cfg.analyzer.normalizer = normalizer_from_string(value);
            } else if (key == "min_token_len") {
                cfg.analyzer.min_token_len = parse_int(section.name, key, value);
            } else if (key == "ngram") {
                cfg.analyzer.ngram = parse_int(section.name, key, value);
            } else if (key == "min_df") {
                cfg.analyzer.min_df = parse_int(section.name, key, value);
            } else if (key == "fanout") {
                cfg.fanout = parse_int(section.name, key, value);
            } else if (key == "max_depth") {
                cfg.max_depth = parse_int(section.name, key, value);
            } else if (key == "beam_width") {
                cfg.beam_width = parse_int(section.name, key, value);
            } else if (key == "members") {
                cfg.members = parse_members(section.name, value);
            } else if (key == "hidden_units") {
                cfg.hidden_units = parse_int(section.name, key, value);
            } else if (key == "epochs") {
                cfg.epochs = parse_int(section.name, key, value);
            } else if (key == "synthetic") {
                cfg.use_synthetic = parse_bool(section.name, key, value);
                saw_synthetic = true;
            } else if (key == "seed") {
                unsigned long long seed = 0;
                auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), seed);
                if (ec != std::errc() || ptr != value.data() + value.size())
                    fail(section.name, "seed: expected an unsigned integer, got \"" + value + "\"");
                cfg.seed = seed;
            }
        }
        if (!saw_backend) fail(section.name, "missing key \"backend\"");
        if (!saw_synthetic) cfg.use_synthetic = cfg.backend == BackendKind::tree;

        if (cfg.language != "de" && cfg.language != "en")
            fail(section.name, "language must be \"de\" or \"en\"");
        cfg.analyzer.language = cfg.language;
        try {
            cfg.analyzer.validate();
        } catch (const ConfigError& e) {
            fail(section.name, e.what());
        }

        if (backend_is_ensemble(cfg.backend)) {
            if (cfg.members.size() < 2)
                fail(section.name, "an ensemble needs at least 2 members");
        } else {
            if (!cfg.members.empty())
                fail(section.name, "members is only valid for ensembles");
            if (cfg.vocabulary_path.empty())
                fail(section.name, "missing key \"vocabulary\"");
        }
        configs.push_back(std::move(cfg));
    }

    // Cross-reference validation.
    std::map<std::string, const ProjectConfig*> by_name;
    for (const ProjectConfig& cfg : configs) by_name[cfg.name] = &cfg;
    for (const ProjectConfig& cfg : configs) {
        if (!backend_is_ensemble(cfg.backend)) continue;
        std::vector<double> weights;
        for (const MemberRef& ref : cfg.members) {
            auto it = by_name.find(ref.project);
            if (it == by_name.end())
                throw DanglingReferenceError("[" + cfg.name + "] member \"" + ref.project +
                                             "\" is not defined");
            const ProjectConfig& member = *it->second;
            if (backend_is_ensemble(member.backend))
                fail(cfg.name, "member \"" + ref.project + "\" must be a base backend");
            if (member.language != cfg.language)
                fail(cfg.name, "member \"" + ref.project + "\" has language " + member.language +
                                   ", ensemble has " + cfg.language);
            if (member.variant != cfg.variant)
                fail(cfg.name, "member \"" + ref.project + "\" has variant " + member.variant +
                                   ", ensemble has " + cfg.variant);
            weights.push_back(ref.weight);
        }
        try {
            check_simplex(weights);
        } catch (const SimplexViolationError& e) {
            throw SimplexViolationError("[" + cfg.name + "] " + e.what());
        }
    }
    return configs;
}

std::vector<ProjectConfig> load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_config(text, path);
}

std::string serialize_config(const std::vector<ProjectConfig>& configs) {
    std::ostringstream out;
    auto weight_str = [](double w) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.10g", w);
        return std::string(buf);
    };
    for (std::size_t i = 0; i < configs.size(); ++i) {
        const ProjectConfig& cfg = configs[i];
        if (i) out << '\n';
        out << '[' << cfg.name << "]\n";
        out << "backend = " << to_string(cfg.backend) << '\n';
        if (!cfg.vocabulary_path.empty()) out << "vocabulary = " << cfg.vocabulary_path << '\n';
        if (!cfg.vocab_format.empty()) out << "vocab_format = " << cfg.vocab_format << '\n';
        out << "variant = " << cfg.variant << '\n';
        out << "language = " << cfg.language << '\n';
        if (!backend_is_ensemble(cfg.backend)) {
            out << "normalizer = " << to_string(cfg.analyzer.normalizer) << '\n';
            out << "min_token_len = " << cfg.analyzer.min_token_len << '\n';
            out << "ngram = " << cfg.analyzer.ngram << '\n';
            out << "min_df = " << cfg.analyzer.min_df << '\n';
            out << "synthetic = " << (cfg.use_synthetic ? "true" : "false") << '\n';
        }
        if (cfg.backend == BackendKind::tree) {
            out << "fanout = " << cfg.fanout << '\n';
            out << "max_depth = " << cfg.max_depth << '\n';
            out << "beam_width = " << cfg.beam_width << '\n';
        }
        if (backend_is_ensemble(cfg.backend)) {
            out << "members = ";
            for (std::size_t m = 0; m < cfg.members.size(); ++m) {
                if (m) out << ", ";
                out << cfg.members[m].project << '=' << weight_str(cfg.members[m].weight);
            }
            out << '\n';
        }
        if (cfg.backend == BackendKind::neural_ensemble) {
            out << "hidden_units = " << cfg.hidden_units << '\n';
            out << "epochs = " << cfg.epochs << '\n';
        }
        out << "seed = " << cfg.seed << '\n';
    }
    return out.str();
}

const ProjectConfig& find_project(const std::vector<ProjectConfig>& configs,
                                  const std::string& name) {
    for (const ProjectConfig& cfg : configs) {
        if (cfg.name == name) return cfg;
    }
    throw UsageError("unknown project \"" + name + "\"");
}

}  // namespace subjidx
