#include "subjidx/analyzer.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <nlohmann/json.hpp>

#include "subjidx/errors.hpp"

namespace subjidx {

namespace {

// --- minimal UTF-8 handling, sufficient for de/en bibliographic text ---

struct Codepoint {
    char32_t value;
    int bytes;
};

Codepoint decode_utf8(std::string_view s, std::size_t pos) {
    unsigned char c0 = static_cast<unsigned char>(s[pos]);
    if (c0 < 0x80) return {c0, 1};
    auto cont = [&](std::size_t i) -> int {
        if (pos + i >= s.size()) return -1;
        unsigned char c = static_cast<unsigned char>(s[pos + i]);
        return (c & 0xC0) == 0x80 ? (c & 0x3F) : -1;
    };
    if ((c0 & 0xE0) == 0xC0) {
        int c1 = cont(1);
        if (c1 >= 0) return {static_cast<char32_t>(((c0 & 0x1F) << 6) | c1), 2};
    } else if ((c0 & 0xF0) == 0xE0) {
        int c1 = cont(1), c2 = cont(2);
        if (c1 >= 0 && c2 >= 0)
            return {static_cast<char32_t>(((c0 & 0x0F) << 12) | (c1 << 6) | c2), 3};
    } else if ((c0 & 0xF8) == 0xF0) {
        int c1 = cont(1), c2 = cont(2), c3 = cont(3);
        if (c1 >= 0 && c2 >= 0 && c3 >= 0)
            return {static_cast<char32_t>(((c0 & 0x07) << 18) | (c1 << 12) | (c2 << 6) | c3), 4};
    }
    // Invalid byte: treat as a one-byte non-word character.
    return {0xFFFD, 1};
}

void append_utf8(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

bool is_letter(char32_t cp) {
    if ((cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z')) return true;
    if (cp >= 0xC0 && cp <= 0xFF) return cp != 0xD7 && cp != 0xF7;  // Latin-1 letters
    if (cp >= 0x100 && cp <= 0x24F) return true;                   // Latin Extended A/B
    if (cp >= 0x370 && cp <= 0x3FF) return true;                   // Greek
    if (cp >= 0x400 && cp <= 0x4FF) return true;                   // Cyrillic
    return false;
}

bool is_digit(char32_t cp) { return cp >= '0' && cp <= '9'; }

bool is_word_char(char32_t cp) { return is_letter(cp) || is_digit(cp) || cp == '_'; }

// Case folding for ASCII and Latin-1; other letters pass through.
char32_t fold(char32_t cp) {
    if (cp >= 'A' && cp <= 'Z') return cp + 0x20;
    if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 0x20;
    return cp;
}

std::size_t codepoint_len(std::string_view token) {
    std::size_t n = 0;
    for (std::size_t i = 0; i < token.size();) {
        i += static_cast<std::size_t>(decode_utf8(token, i).bytes);
        ++n;
    }
    return n;
}

bool ends_with(std::string_view s, std::string_view suffix) {
    return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

// Fixed-rule suffix stripper. Applied to a fixed point so that re-tokenizing
// stemmer output reproduces it; a stem is never cut below
// max(3, min_token_len) codepoints.
std::string stem(std::string token, const std::string& language, int min_token_len) {
    static const std::vector<std::string> kEnglish = {"ing", "ed", "es", "s"};
    static const std::vector<std::string> kGerman = {"en", "er", "e", "n", "s"};
    const std::vector<std::string>& rules = (language == "de") ? kGerman : kEnglish;
    const std::size_t floor_len = static_cast<std::size_t>(std::max(3, min_token_len));

    for (;;) {
        bool stripped = false;
        for (const std::string& suffix : rules) {
            if (!ends_with(token, suffix)) continue;
            if (suffix == "s" && language != "de" && ends_with(token, "ss")) continue;
            std::string stemmed = token.substr(0, token.size() - suffix.size());
            if (codepoint_len(stemmed) < floor_len) continue;
            token = std::move(stemmed);
            stripped = true;
            break;
        }
        if (!stripped) return token;
    }
}

}  // namespace

std::string to_string(Normalizer n) {
    return n == Normalizer::suffix_stemmer ? "suffix_stemmer" : "lowercase_only";
}

Normalizer normalizer_from_string(std::string_view s) {
    if (s == "lowercase_only") return Normalizer::lowercase_only;
    if (s == "suffix_stemmer") return Normalizer::suffix_stemmer;
    throw ConfigError("unknown normalizer \"" + std::string(s) + "\"");
}

void AnalyzerConfig::validate() const {
    if (ngram != 1 && ngram != 2) throw ConfigError("ngram must be 1 or 2");
    if (min_token_len < 1) throw ConfigError("min_token_len must be >= 1");
    if (min_df < 1) throw ConfigError("min_df must be >= 1");
    if (language != "de" && language != "en")
        throw ConfigError("language must be \"de\" or \"en\"");
}

bool same_normalization(const AnalyzerConfig& a, const AnalyzerConfig& b) {
    return a.language == b.language && a.normalizer == b.normalizer &&
           a.min_token_len == b.min_token_len;
}

std::vector<std::string> tokenize(std::string_view text, const AnalyzerConfig& config) {
    std::vector<std::string> tokens;
    std::string current;
    std::size_t current_cp = 0;
    bool has_letter = false;

    auto flush = [&]() {
        if (!current.empty() && has_letter &&
            current_cp >= static_cast<std::size_t>(config.min_token_len)) {
            if (config.normalizer == Normalizer::suffix_stemmer) {
                tokens.push_back(stem(std::move(current), config.language, config.min_token_len));
            } else {
                tokens.push_back(std::move(current));
            }
        }
        current.clear();
        current_cp = 0;
        has_letter = false;
    };

    for (std::size_t i = 0; i < text.size();) {
        Codepoint cp = decode_utf8(text, i);
        i += static_cast<std::size_t>(cp.bytes);
        if (is_word_char(cp.value)) {
            has_letter = has_letter || is_letter(cp.value);
            append_utf8(current, fold(cp.value));
            ++current_cp;
        } else {
            flush();
        }
    }
    flush();
    return tokens;
}

std::string normalize_label(std::string_view label, const AnalyzerConfig& config) {
    std::vector<std::string> tokens = tokenize(label, config);
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i) out.push_back(' ');
        out += tokens[i];
    }
    return out;
}

std::vector<std::string> extract_features(std::string_view text, const AnalyzerConfig& config) {
    std::vector<std::string> features;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        std::string_view line =
            text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
        std::vector<std::string> tokens = tokenize(line, config);
        for (std::size_t i = 0; i < tokens.size(); ++i) {
            if (config.ngram == 2 && i + 1 < tokens.size())
                features.push_back(tokens[i] + " " + tokens[i + 1]);
            features.push_back(std::move(tokens[i]));
        }
        if (end == std::string_view::npos) break;
        start = end + 1;
    }
    return features;
}

Vectorizer Vectorizer::fit(const std::vector<std::string>& corpus_texts,
                           const AnalyzerConfig& config) {
    config.validate();
    if (corpus_texts.empty()) throw EmptyFeatureSpaceError("cannot fit vectorizer on an empty corpus");

    // Document frequencies. std::map keeps feature order deterministic.
    std::map<std::string, std::size_t> df;
    for (const std::string& text : corpus_texts) {
        std::vector<std::string> features = extract_features(text, config);
        std::sort(features.begin(), features.end());
        features.erase(std::unique(features.begin(), features.end()), features.end());
        for (std::string& f : features) ++df[std::move(f)];
    }

    Vectorizer v;
    v.config_ = config;
    const double n_docs = static_cast<double>(corpus_texts.size());
    for (auto& [feature, count] : df) {
        if (count < static_cast<std::size_t>(config.min_df)) continue;
        std::uint32_t index = static_cast<std::uint32_t>(v.idf_.size());
        v.vocabulary_map_.emplace(feature, index);
        v.idf_.push_back(std::log((1.0 + n_docs) / (1.0 + static_cast<double>(count))) + 1.0);
    }
    if (v.idf_.empty())
        throw EmptyFeatureSpaceError("min_df=" + std::to_string(config.min_df) +
                                     " filtered out every feature");
    return v;
}

SparseVec Vectorizer::transform(std::string_view text) const {
    std::map<std::uint32_t, double> counts;
    for (const std::string& f : extract_features(text, config_)) {
        auto it = vocabulary_map_.find(f);
        if (it != vocabulary_map_.end()) counts[it->second] += 1.0;
    }
    SparseVec out;
    out.entries.reserve(counts.size());
    for (const auto& [index, count] : counts) out.entries.emplace_back(index, count * idf_[index]);
    l2_normalize(out);
    return out;
}

nlohmann::json Vectorizer::to_json() const {
    std::vector<std::string> features(idf_.size());
    for (const auto& [f, i] : vocabulary_map_) features[i] = f;
    return nlohmann::json{{"config",
                           {{"language", config_.language},
                            {"normalizer", to_string(config_.normalizer)},
                            {"min_token_len", config_.min_token_len},
                            {"ngram", config_.ngram},
                            {"min_df", config_.min_df}}},
                          {"features", features},
                          {"idf", idf_}};
}

Vectorizer Vectorizer::from_json(const nlohmann::json& j) {
    Vectorizer v;
    const auto& c = j.at("config");
    v.config_.language = c.at("language").get<std::string>();
    v.config_.normalizer = normalizer_from_string(c.at("normalizer").get<std::string>());
    v.config_.min_token_len = c.at("min_token_len").get<int>();
    v.config_.ngram = c.at("ngram").get<int>();
    v.config_.min_df = c.at("min_df").get<int>();
    v.idf_ = j.at("idf").get<std::vector<double>>();
    const auto& features = j.at("features");
    if (features.size() != v.idf_.size())
        throw ParseError("vectorizer: features and idf arrays differ in length");
    for (std::uint32_t i = 0; i < features.size(); ++i)
        v.vocabulary_map_.emplace(features[i].get<std::string>(), i);
    return v;
}

}  // namespace subjidx
