#pragma once

#include <set>
#include <string>
#include <vector>

namespace subjidx {

/// Bibliographic record: the unit of train/dev/test corpora. Test records
/// carry an empty subject set.
struct DocumentRecord {
    std::string id;
    std::string language;  // "de" | "en"
    std::string title;
    std::string abstract_text;
    std::set<std::string> subjects;

    bool operator==(const DocumentRecord&) const = default;
};

enum class CorpusOrigin { original, synthetic, mixed };

std::string to_string(CorpusOrigin o);

struct Corpus {
    std::vector<DocumentRecord> records;
    CorpusOrigin origin = CorpusOrigin::original;

    std::size_t size() const { return records.size(); }
    bool empty() const { return records.empty(); }
    const DocumentRecord* find(const std::string& id) const;

    bool operator==(const Corpus&) const = default;
};

/// Loads one JSON object per line with keys id, language, title, abstract and
/// optional subjects. Errors carry the 1-based line number.
Corpus load_corpus_jsonl(const std::string& path);

/// Writes the same format; loading the output reproduces the corpus.
void save_corpus_jsonl(const Corpus& corpus, const std::string& path);

/// Title and abstract joined by a single newline; an empty abstract yields
/// the title alone.
std::string document_text(const DocumentRecord& rec);

/// Concatenates the original corpus with equally sized synthetic parts.
/// Record ids must stay unique across all parts; every original record is
/// preserved verbatim and in order.
Corpus mix_synthetic(const Corpus& original, const std::vector<Corpus>& synthetic_parts);

}  // namespace subjidx
