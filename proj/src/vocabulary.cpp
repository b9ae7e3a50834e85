#include "subjidx/vocabulary.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include "subjidx/errors.hpp"

namespace subjidx {

namespace {

constexpr const char* kPrefLabelUri = "http://www.w3.org/2004/02/skos/core#prefLabel";
constexpr const char* kAltLabelUri = "http://www.w3.org/2004/02/skos/core#altLabel";

std::string trim(std::string_view s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    for (;;) {
        std::size_t pos = s.find(sep, start);
        if (pos == std::string_view::npos) {
            parts.emplace_back(s.substr(start));
            return parts;
        }
        parts.emplace_back(s.substr(start, pos - start));
        start = pos + 1;
    }
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    return in;
}

void strip_bom(std::string& line) {
    if (line.size() >= 3 && line[0] == '\xEF' && line[1] == '\xBB' && line[2] == '\xBF')
        line.erase(0, 3);
}

// De-duplicates while preserving first-seen order.
std::vector<std::string> dedup(std::vector<std::string> labels) {
    std::vector<std::string> out;
    for (std::string& l : labels) {
        if (std::find(out.begin(), out.end(), l) == out.end()) out.push_back(std::move(l));
    }
    return out;
}

std::size_t token_count(std::string_view phrase) {
    if (phrase.empty()) return 0;
    return static_cast<std::size_t>(std::count(phrase.begin(), phrase.end(), ' ')) + 1;
}

}  // namespace

SubjectVocabulary::SubjectVocabulary(std::vector<Subject> subjects, std::string variant_name,
                                     AnalyzerConfig normalization)
    : variant_name_(std::move(variant_name)), normalization_(std::move(normalization)) {
    for (Subject& s : subjects) {
        if (s.id.empty()) throw ValidationError("subject with empty id");
        auto [it, inserted] = subjects_.emplace(s.id, std::move(s));
        if (!inserted) throw DuplicateIdError(it->first);
    }
    if (subjects_.empty()) throw ValidationError("vocabulary contains no subjects");
    rebuild_label_index();
}

const Subject* SubjectVocabulary::find(const std::string& id) const {
    auto it = subjects_.find(id);
    return it == subjects_.end() ? nullptr : &it->second;
}

std::vector<std::string> SubjectVocabulary::languages() const {
    std::vector<std::string> out;
    out.reserve(label_index_.size());
    for (const auto& [lang, index] : label_index_) out.push_back(lang);
    return out;
}

const SubjectVocabulary::LabelIndex& SubjectVocabulary::label_index(
    const std::string& language) const {
    static const LabelIndex kEmpty;
    auto it = label_index_.find(language);
    return it == label_index_.end() ? kEmpty : it->second;
}

const std::string* SubjectVocabulary::normalized_pref(const std::string& language,
                                                      const std::string& id) const {
    auto lang_it = pref_norm_.find(language);
    if (lang_it == pref_norm_.end()) return nullptr;
    auto it = lang_it->second.find(id);
    return it == lang_it->second.end() ? nullptr : &it->second;
}

std::size_t SubjectVocabulary::max_label_tokens(const std::string& language) const {
    auto it = max_label_tokens_.find(language);
    return it == max_label_tokens_.end() ? 0 : it->second;
}

void SubjectVocabulary::rebuild_label_index() {
    label_index_.clear();
    pref_norm_.clear();
    max_label_tokens_.clear();

    AnalyzerConfig cfg = normalization_;
    auto index_label = [&](const std::string& lang, const std::string& label,
                           const std::string& id) {
        cfg.language = lang;
        std::string phrase = normalize_label(label, cfg);
        if (phrase.empty()) return phrase;
        label_index_[lang][phrase].insert(id);
        std::size_t& max_tokens = max_label_tokens_[lang];
        max_tokens = std::max(max_tokens, token_count(phrase));
        return phrase;
    };

    for (const auto& [id, subject] : subjects_) {
        for (const auto& [lang, label] : subject.pref_label) {
            std::string phrase = index_label(lang, label, id);
            if (!phrase.empty()) pref_norm_[lang][id] = std::move(phrase);
        }
        for (const auto& [lang, labels] : subject.alt_labels) {
            for (const std::string& label : labels) index_label(lang, label, id);
        }
    }
}

SubjectVocabulary load_vocabulary_tsv(const std::string& path, const std::string& variant_name,
                                      const AnalyzerConfig& normalization) {
    std::ifstream in = open_input(path);
    std::vector<Subject> subjects;
    std::set<std::string> seen_ids;
    std::string line;
    std::size_t line_no = 0;

    while (std::getline(in, line)) {
        ++line_no;
        if (line_no == 1) strip_bom(line);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;

        std::vector<std::string> fields = split(line, '\t');
        if (fields.size() < 3 || fields.size() > 5)
            throw ParseError("expected 3 to 5 tab-separated fields, got " +
                                 std::to_string(fields.size()),
                             line_no);

        Subject s;
        s.id = trim(fields[0]);
        if (s.id.empty()) throw ParseError("empty subject id", line_no);
        if (!seen_ids.insert(s.id).second) throw DuplicateIdError(s.id, line_no);

        const std::string pref_de = trim(fields[1]);
        const std::string pref_en = trim(fields[2]);
        auto alts = [&](std::size_t i) {
            std::vector<std::string> out;
            if (fields.size() <= i) return out;
            for (const std::string& part : split(fields[i], ';')) {
                std::string label = trim(part);
                if (!label.empty()) out.push_back(std::move(label));
            }
            return dedup(std::move(out));
        };
        const std::vector<std::string> alt_de = alts(3);
        const std::vector<std::string> alt_en = alts(4);

        if (pref_de.empty() && !alt_de.empty())
            throw MissingFieldError("pref_de (alternate de labels need a preferred one)", line_no);
        if (pref_en.empty() && !alt_en.empty())
            throw MissingFieldError("pref_en (alternate en labels need a preferred one)", line_no);
        if (pref_de.empty() && pref_en.empty())
            throw MissingFieldError("preferred label", line_no);

        if (!pref_de.empty()) s.pref_label["de"] = pref_de;
        if (!pref_en.empty()) s.pref_label["en"] = pref_en;
        if (!alt_de.empty()) s.alt_labels["de"] = alt_de;
        if (!alt_en.empty()) s.alt_labels["en"] = alt_en;
        subjects.push_back(std::move(s));
    }

    if (subjects.empty()) throw ParseError(path + ": no subjects found");
    return SubjectVocabulary(std::move(subjects), variant_name, normalization);
}

namespace {

// --- line-oriented N-Triples subset ---

struct NtParser {
    std::string_view line;
    std::size_t pos = 0;
    std::size_t line_no;

    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, line_no); }

    void skip_ws() {
        while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
    }

    std::string parse_uri() {
        if (pos >= line.size() || line[pos] != '<') fail("expected '<'");
        std::size_t end = line.find('>', pos);
        if (end == std::string_view::npos) fail("unterminated URI");
        std::string uri(line.substr(pos + 1, end - pos - 1));
        pos = end + 1;
        return uri;
    }

    bool at_blank_node() const {
        return pos + 1 < line.size() && line[pos] == '_' && line[pos + 1] == ':';
    }

    void skip_blank_node() {
        pos += 2;
        while (pos < line.size() && line[pos] != ' ' && line[pos] != '\t') ++pos;
    }

    std::string parse_literal() {
        // Caller verified line[pos] == '"'.
        ++pos;
        std::string out;
        while (pos < line.size()) {
            char c = line[pos];
            if (c == '"') {
                ++pos;
                return out;
            }
            if (c == '\\') {
                ++pos;
                if (pos >= line.size()) fail("dangling escape");
                char e = line[pos++];
                switch (e) {
                    case 't': out.push_back('\t'); break;
                    case 'n': out.push_back('\n'); break;
                    case 'r': out.push_back('\r'); break;
                    case '"': out.push_back('"'); break;
                    case '\\': out.push_back('\\'); break;
                    case 'u': out += parse_unicode_escape(4); break;
                    case 'U': out += parse_unicode_escape(8); break;
                    default: fail(std::string("unsupported escape \\") + e);
                }
            } else {
                out.push_back(c);
                ++pos;
            }
        }
        fail("unterminated literal");
    }

    std::string parse_unicode_escape(int digits) {
        if (pos + static_cast<std::size_t>(digits) > line.size()) fail("truncated \\u escape");
        char32_t cp = 0;
        for (int i = 0; i < digits; ++i) {
            char c = line[pos++];
            cp <<= 4;
            if (c >= '0' && c <= '9') cp |= static_cast<char32_t>(c - '0');
            else if (c >= 'a' && c <= 'f') cp |= static_cast<char32_t>(c - 'a' + 10);
            else if (c >= 'A' && c <= 'F') cp |= static_cast<char32_t>(c - 'A' + 10);
            else fail("bad hex digit in unicode escape");
        }
        std::string utf8;
        if (cp < 0x80) {
            utf8.push_back(static_cast<char>(cp));
        } else if (cp < 0x800) {
            utf8.push_back(static_cast<char>(0xC0 | (cp >> 6)));
            utf8.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        } else if (cp < 0x10000) {
            utf8.push_back(static_cast<char>(0xE0 | (cp >> 12)));
            utf8.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
            utf8.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        } else {
            utf8.push_back(static_cast<char>(0xF0 | (cp >> 18)));
            utf8.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
            utf8.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
            utf8.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        }
        return utf8;
    }

    std::string parse_language_tag() {
        // Caller verified line[pos] == '@'.
        ++pos;
        std::size_t start = pos;
        while (pos < line.size() &&
               (std::isalnum(static_cast<unsigned char>(line[pos])) || line[pos] == '-'))
            ++pos;
        if (pos == start) fail("empty language tag");
        std::string tag(line.substr(start, pos - start));
        // Primary subtag only, lowercased: "en-US" -> "en".
        std::size_t dash = tag.find('-');
        if (dash != std::string::npos) tag.resize(dash);
        for (char& c : tag) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        return tag;
    }

    void expect_terminator() {
        skip_ws();
        if (pos >= line.size() || line[pos] != '.') fail("expected terminating \" .\"");
        ++pos;
        skip_ws();
        if (pos != line.size()) fail("trailing content after '.'");
    }
};

}  // namespace

SubjectVocabulary load_vocabulary_ntriples(const std::string& path,
                                           const std::string& variant_name,
                                           const AnalyzerConfig& normalization) {
    std::ifstream in = open_input(path);
    std::map<std::string, Subject> by_id;
    std::vector<std::string> order;  // first-seen subject order
    std::string raw;
    std::size_t line_no = 0;

    while (std::getline(in, raw)) {
        ++line_no;
        if (line_no == 1) strip_bom(raw);
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        std::string trimmed = trim(raw);
        if (trimmed.empty() || trimmed[0] == '#') continue;

        NtParser p{trimmed, 0, line_no};
        std::string subject_uri;
        bool blank_subject = p.at_blank_node();
        if (blank_subject) p.skip_blank_node();
        else subject_uri = p.parse_uri();
        p.skip_ws();
        std::string predicate_uri = p.parse_uri();
        p.skip_ws();

        // label triples are consumed; every other well-formed triple is skipped
        bool is_pref = !blank_subject && predicate_uri == kPrefLabelUri;
        bool is_alt = !blank_subject && predicate_uri == kAltLabelUri;

        if (p.pos < p.line.size() && p.line[p.pos] == '"') {
            std::string literal = p.parse_literal();
            std::string lang;
            if (p.pos < p.line.size() && p.line[p.pos] == '@') {
                lang = p.parse_language_tag();
            } else if (p.pos + 1 < p.line.size() && p.line[p.pos] == '^' &&
                       p.line[p.pos + 1] == '^') {
                p.pos += 2;
                p.parse_uri();  // typed literal: valid syntax, not consumed
            }
            p.expect_terminator();
            if (lang.empty() || (!is_pref && !is_alt)) continue;

            Subject& s = by_id[subject_uri];
            if (s.id.empty()) {
                s.id = subject_uri;
                order.push_back(subject_uri);
            }
            if (is_pref) {
                if (s.pref_label.count(lang))
                    throw ValidationError("line " + std::to_string(line_no) +
                                          ": second prefLabel for <" + subject_uri + "> @" + lang);
                s.pref_label[lang] = literal;
            } else {
                std::vector<std::string>& alts = s.alt_labels[lang];
                if (std::find(alts.begin(), alts.end(), literal) == alts.end())
                    alts.push_back(literal);
            }
        } else if (p.pos < p.line.size() && p.line[p.pos] == '<') {
            p.parse_uri();  // URI object: valid triple, ignored predicate
            p.expect_terminator();
        } else if (p.at_blank_node()) {
            p.skip_blank_node();
            p.expect_terminator();
        } else {
            p.fail("expected literal, URI, or blank node object");
        }
    }

    if (by_id.empty()) throw ParseError(path + ": no subjects found");
    std::vector<Subject> subjects;
    subjects.reserve(order.size());
    for (const std::string& id : order) subjects.push_back(std::move(by_id[id]));
    return SubjectVocabulary(std::move(subjects), variant_name, normalization);
}

void save_vocabulary_tsv(const SubjectVocabulary& vocab, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    auto join = [](const std::vector<std::string>& v) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i) s.push_back(';');
            s += v[i];
        }
        return s;
    };
    for (const auto& [id, s] : vocab.subjects()) {
        auto pref = [&](const char* lang) {
            auto it = s.pref_label.find(lang);
            return it == s.pref_label.end() ? std::string() : it->second;
        };
        auto alts = [&](const char* lang) {
            auto it = s.alt_labels.find(lang);
            return it == s.alt_labels.end() ? std::string() : join(it->second);
        };
        out << id << '\t' << pref("de") << '\t' << pref("en") << '\t' << alts("de") << '\t'
            << alts("en") << '\n';
    }
    if (!out) throw IoError("write failed: " + path);
}

SubsetResult subset(const SubjectVocabulary& vocab, const std::string& ids_path,
                    const std::string& variant_name) {
    std::ifstream in = open_input(ids_path);
    std::vector<std::string> ids;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line_no == 1) strip_bom(line);
        std::string id = trim(line);
        if (id.empty() || id[0] == '#') continue;
        ids.push_back(std::move(id));
    }

    SubsetResult result;
    std::vector<Subject> kept;
    std::set<std::string> taken;
    for (const std::string& id : ids) {
        if (taken.count(id)) continue;
        const Subject* s = vocab.find(id);
        if (s == nullptr) {
            result.warnings.push_back("id \"" + id + "\" not in vocabulary");
            continue;
        }
        kept.push_back(*s);
        taken.insert(id);
    }
    if (kept.empty())
        throw EmptySubsetError("no listed id is present in vocabulary \"" + vocab.variant_name() +
                               "\"");
    result.vocabulary =
        SubjectVocabulary(std::move(kept), variant_name, vocab.normalization());
    return result;
}

}  // namespace subjidx
