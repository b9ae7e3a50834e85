#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "subjidx/analyzer.hpp"

namespace subjidx {

/// One controlled-vocabulary subject with per-language labels.
struct Subject {
    std::string id;                                            // opaque URI string
    std::map<std::string, std::string> pref_label;             // language -> label
    std::map<std::string, std::vector<std::string>> alt_labels;  // language -> labels

    bool operator==(const Subject&) const = default;
};

/// Immutable set of subjects with a per-language index from normalized label
/// strings to subject ids. Safe for concurrent reads after construction.
class SubjectVocabulary {
public:
    /// normalized label -> ids of subjects carrying that label
    using LabelIndex = std::map<std::string, std::set<std::string>>;

    SubjectVocabulary() = default;
    SubjectVocabulary(std::vector<Subject> subjects, std::string variant_name,
                      AnalyzerConfig normalization);

    const std::string& variant_name() const { return variant_name_; }
    std::size_t size() const { return subjects_.size(); }
    bool contains(const std::string& id) const { return subjects_.count(id) != 0; }
    const Subject* find(const std::string& id) const;
    const std::map<std::string, Subject>& subjects() const { return subjects_; }

    /// Normalization settings used for the label index; the language field is
    /// overridden per indexed language.
    const AnalyzerConfig& normalization() const { return normalization_; }

    /// Languages that have at least one indexed label.
    std::vector<std::string> languages() const;

    /// Index for one language; empty index when the language is absent.
    const LabelIndex& label_index(const std::string& language) const;

    /// Normalized preferred label of a subject, or nullptr when the subject
    /// has no preferred label in that language (or it normalizes to nothing).
    const std::string* normalized_pref(const std::string& language, const std::string& id) const;

    /// Longest indexed label for a language, measured in tokens.
    std::size_t max_label_tokens(const std::string& language) const;

    /// Recomputes the label index from the subjects; the constructor already
    /// does this, so calling it again is a fixed point.
    void rebuild_label_index();

private:
    std::map<std::string, Subject> subjects_;
    std::string variant_name_;
    AnalyzerConfig normalization_;
    std::map<std::string, LabelIndex> label_index_;
    std::map<std::string, std::map<std::string, std::string>> pref_norm_;  // lang -> id -> phrase
    std::map<std::string, std::size_t> max_label_tokens_;
};

/// Loads the tab-separated vocabulary format:
///   id<TAB>pref_de<TAB>pref_en<TAB>alt_de<TAB>alt_en
/// with ';' joining alternate labels; the last two columns are optional.
SubjectVocabulary load_vocabulary_tsv(const std::string& path, const std::string& variant_name,
                                      const AnalyzerConfig& normalization = {});

/// Loads the N-Triples subset: skos:prefLabel / skos:altLabel triples with
/// language-tagged literals; every other well-formed triple is ignored.
SubjectVocabulary load_vocabulary_ntriples(const std::string& path,
                                           const std::string& variant_name,
                                           const AnalyzerConfig& normalization = {});

/// Writes the TSV format (de/en columns only).
void save_vocabulary_tsv(const SubjectVocabulary& vocab, const std::string& path);

struct SubsetResult {
    SubjectVocabulary vocabulary;
    std::vector<std::string> warnings;  // ids listed but absent from the source
};

/// Restricts a vocabulary to the ids listed in ids_path (one per line, '#'
/// comments allowed). Missing ids are collected as warnings; an empty
/// intersection throws EmptySubsetError.
SubsetResult subset(const SubjectVocabulary& vocab, const std::string& ids_path,
                    const std::string& variant_name);

}  // namespace subjidx
