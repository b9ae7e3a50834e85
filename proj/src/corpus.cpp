#include "subjidx/corpus.hpp"

#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "subjidx/errors.hpp"

namespace subjidx {

std::string to_string(CorpusOrigin o) {
    switch (o) {
        case CorpusOrigin::original: return "original";
        case CorpusOrigin::synthetic: return "synthetic";
        case CorpusOrigin::mixed: return "mixed";
    }
    return "original";
}

const DocumentRecord* Corpus::find(const std::string& id) const {
    for (const DocumentRecord& r : records) {
        if (r.id == id) return &r;
    }
    return nullptr;
}

Corpus load_corpus_jsonl(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);

    Corpus corpus;
    std::set<std::string> seen;
    std::string line;
    std::size_t line_no = 0;

    while (std::getline(in, line)) {
        ++line_no;
        if (line_no == 1 && line.size() >= 3 && line[0] == '\xEF' && line[1] == '\xBB' &&
            line[2] == '\xBF')
            line.erase(0, 3);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;

        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw ParseError(std::string("invalid JSON: ") + e.what(), line_no);
        }
        if (!j.is_object()) throw ParseError("expected a JSON object", line_no);

        auto required = [&](const char* key) -> const nlohmann::json& {
            auto it = j.find(key);
            if (it == j.end()) throw MissingFieldError(key, line_no);
            if (!it->is_string())
                throw ParseError(std::string("field \"") + key + "\" must be a string", line_no);
            return *it;
        };

        DocumentRecord rec;
        rec.id = required("id").get<std::string>();
        rec.language = required("language").get<std::string>();
        rec.title = required("title").get<std::string>();
        rec.abstract_text = required("abstract").get<std::string>();
        if (rec.id.empty()) throw ParseError("empty id", line_no);
        if (rec.language != "de" && rec.language != "en")
            throw ParseError("language must be \"de\" or \"en\", got \"" + rec.language + "\"",
                             line_no);

        if (auto it = j.find("subjects"); it != j.end()) {
            if (!it->is_array()) throw ParseError("field \"subjects\" must be an array", line_no);
            for (const auto& s : *it) {
                if (!s.is_string())
                    throw ParseError("subjects must contain strings", line_no);
                rec.subjects.insert(s.get<std::string>());
            }
        }

        if (!seen.insert(rec.id).second) throw DuplicateIdError(rec.id, line_no);
        corpus.records.push_back(std::move(rec));
    }
    return corpus;
}

void save_corpus_jsonl(const Corpus& corpus, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    for (const DocumentRecord& rec : corpus.records) {
        nlohmann::ordered_json j{{"id", rec.id},
                                 {"language", rec.language},
                                 {"title", rec.title},
                                 {"abstract", rec.abstract_text},
                                 {"subjects", rec.subjects}};
        out << j.dump() << '\n';
    }
    if (!out) throw IoError("write failed: " + path);
}

std::string document_text(const DocumentRecord& rec) {
    if (rec.abstract_text.empty()) return rec.title;
    return rec.title + "\n" + rec.abstract_text;
}

Corpus mix_synthetic(const Corpus& original, const std::vector<Corpus>& synthetic_parts) {
    for (std::size_t p = 0; p < synthetic_parts.size(); ++p) {
        if (synthetic_parts[p].size() != original.size())
            throw ValidationError("synthetic part " + std::to_string(p + 1) + " has " +
                                  std::to_string(synthetic_parts[p].size()) + " records, expected " +
                                  std::to_string(original.size()));
    }

    Corpus mixed;
    mixed.origin = CorpusOrigin::mixed;
    mixed.records.reserve(original.size() * (1 + synthetic_parts.size()));
    std::set<std::string> seen;
    auto append = [&](const DocumentRecord& rec) {
        if (!seen.insert(rec.id).second)
            throw IdCollisionError("record id \"" + rec.id + "\" appears in more than one part");
        mixed.records.push_back(rec);
    };
    for (const DocumentRecord& rec : original.records) append(rec);
    for (const Corpus& part : synthetic_parts)
        for (const DocumentRecord& rec : part.records) append(rec);
    return mixed;
}

}  // namespace subjidx
