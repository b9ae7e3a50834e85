#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "subjidx/analyzer.hpp"

namespace subjidx {

/// Backend kinds a project section may declare. The xtransformer slot is
/// accepted by configuration and ensembles so a third base backend can plug
/// in, but no implementation ships; training one fails at the CLI.
enum class BackendKind { lexical, tree, simple_ensemble, neural_ensemble, xtransformer };

std::string to_string(BackendKind k);
BackendKind backend_kind_from_string(const std::string& s, const std::string& section);

bool backend_is_ensemble(BackendKind k);

struct MemberRef {
    std::string project;
    double weight = 0.0;

    bool operator==(const MemberRef&) const = default;
};

/// One project: a vocabulary variant, a language, and a configured backend.
struct ProjectConfig {
    std::string name;
    BackendKind backend = BackendKind::lexical;
    std::string vocabulary_path;
    std::string vocab_format;  // "tsv" | "ntriples" | "" = by file extension
    std::string variant = "all";
    std::string language = "en";
    AnalyzerConfig analyzer;
    // tree backend
    int fanout = 100;
    int max_depth = 3;
    int beam_width = 10;
    // ensembles
    std::vector<MemberRef> members;
    int hidden_units = 100;
    int epochs = 10;
    // whether the pipeline feeds this backend the synthetic-augmented corpus
    bool use_synthetic = false;
    std::uint64_t seed = 42;

    bool operator==(const ProjectConfig&) const = default;
};

/// Parses and validates the sectioned key-value format. Every error names
/// the offending section (and key).
std::vector<ProjectConfig> parse_config(const std::string& text, const std::string& source_name);
std::vector<ProjectConfig> load_config(const std::string& path);

/// Canonical rendering; parsing it back yields equal configs.
std::string serialize_config(const std::vector<ProjectConfig>& configs);

/// Throws UsageError when the project is not defined.
const ProjectConfig& find_project(const std::vector<ProjectConfig>& configs,
                                  const std::string& name);

}  // namespace subjidx
