#include "subjidx/llm.hpp"

#include <atomic>
#include <cctype>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "subjidx/errors.hpp"
#include "subjidx/rng.hpp"

namespace subjidx {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string strip_cr(std::string s) {
    s.erase(std::remove(s.begin(), s.end(), '\r'), s.end());
    return s;
}

// Runs fn(0..n-1) over up to max_in_flight threads. The first failure (by
// index) wins and is rethrown after the pool drains; remaining work is
// abandoned so a batch never completes with silent gaps.
template <typename Fn>
void run_indexed(std::size_t n, int max_in_flight, Fn&& fn) {
    if (n == 0) return;
    const std::size_t workers =
        std::max<std::size_t>(1, std::min<std::size_t>(static_cast<std::size_t>(max_in_flight), n));

    std::atomic<std::size_t> next{0};
    std::atomic<bool> stop{false};
    std::mutex err_mutex;
    std::exception_ptr first_error;
    std::size_t first_error_index = SIZE_MAX;

    auto worker = [&]() {
        for (;;) {
            if (stop.load(std::memory_order_relaxed)) return;
            std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (i < first_error_index) {
                    first_error_index = i;
                    first_error = std::current_exception();
                }
                stop.store(true, std::memory_order_relaxed);
                return;
            }
        }
    };

    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }
    if (first_error) std::rethrow_exception(first_error);
}

constexpr const char* kTranslateSystem =
    "You are a professional translator specialized in translating bibliographic metadata.";

constexpr const char* kTranslateUser =
    "Your task is to ensure that the given document title and description are in <LANGUAGE> "
    "language, translating the text if necessary. If the text is already in <LANGUAGE>, do not "
    "change or summarize it, keep it all as it is.\n"
    "\n"
    "Respond with only the text, nothing else.\n"
    "\n"
    "Give this title and description in <LANGUAGE>:\n"
    "\n"
    "<TITLE>\n"
    "\n"
    "<DESCRIPTION>";

constexpr const char* kSynthesizeSystem = "You are a professional metadata manager.";

constexpr const char* kSynthesizeUser =
    "Your task is to create new bibliographic metadata: document titles and descriptions.\n"
    "\n"
    "Here is an example document title and description in <LANGUAGE> with the following subject "
    "keywords: <OLD_KEYWORDS>\n"
    "\n"
    "<TITLE_DESC>\n"
    "\n"
    "Generate a new document title and description in <LANGUAGE>. Respond with only the title "
    "and description, nothing else. Create a new title and description that match the following "
    "subject keywords: <NEW_KEYWORDS>";

constexpr const char* kTermsSystem =
    "You are a professional translator specialized in translating controlled vocabularies such "
    "as information retrieval thesauri and classifications.";

constexpr const char* kTermsUser =
    "Your task is to translate terms from the The Gemeinsame Normdatei (GND, Integrated "
    "Authority File), a carefully curated thesaurus known for its precise and respectful "
    "terminology. These terms are used for academic and informational purposes and are presented "
    "in German. Please maintain the list structure and translate each term into English. Only "
    "return the list of translated terms, no explanations are needed.\n"
    "\n"
    "This translation work is part of an educational and informational project aimed at "
    "enhancing accessibility and understanding of diverse concepts across languages. It is "
    "important to handle all terms, especially those pertaining to sensitive subjects such as "
    "health conditions, with accuracy and respect as intended by the thesaurus editors.\n"
    "\n"
    "Example input:\n"
    "\n"
    "1. Individualisierte Person\n"
    "2. Familie\n"
    "3. Schlagwort\n"
    "4. Sicherung\n"
    "\n"
    "Translated output for the above examples:\n"
    "\n"
    "1. Differentiated person\n"
    "2. Family\n"
    "3. Subject heading\n"
    "4. Safeguarding\n"
    "\n"
    "Now translate the following thesaurus terms to English:\n"
    "\n"
    "<LIST_OF_TERMS>";

}  // namespace

void LlmEndpointConfig::validate() const {
    if (base_url.empty()) throw ConfigError("endpoint base_url is empty");
    if (max_in_flight < 1) throw ConfigError("max_in_flight must be >= 1");
    if (retries < 0) throw ConfigError("retries must be >= 0");
    if (timeout_seconds < 1) throw ConfigError("timeout_seconds must be >= 1");
}

std::string api_key_from_env() {
    if (const char* key = std::getenv("SUBJIDX_API_KEY")) return key;
    if (const char* key = std::getenv("OPENAI_API_KEY")) return key;
    return {};
}

const std::vector<std::string>& known_placeholders() {
    static const std::vector<std::string> kNames = {
        "LANGUAGE", "TITLE", "DESCRIPTION", "OLD_KEYWORDS",
        "NEW_KEYWORDS", "TITLE_DESC", "LIST_OF_TERMS"};
    return kNames;
}

PromptTemplate PromptTemplate::parse(const std::string& file_text) {
    const std::string text = strip_cr(file_text);
    std::size_t pos = text.find("\n---\n");
    if (pos == std::string::npos)
        throw ParseError("prompt template needs a \"---\" separator line");
    PromptTemplate t;
    t.system_prompt = trim(text.substr(0, pos));
    t.user_template = trim(text.substr(pos + 5));
    if (t.system_prompt.empty()) throw ParseError("prompt template has an empty system prompt");
    if (t.user_template.empty()) throw ParseError("prompt template has an empty user template");
    return t;
}

PromptTemplate PromptTemplate::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse(text);
}

std::string PromptTemplate::render(const std::map<std::string, std::string>& values) const {
    std::string out = user_template;
    for (const auto& [name, value] : values) {
        const auto& known = known_placeholders();
        if (std::find(known.begin(), known.end(), name) == known.end())
            throw ValidationError("unknown placeholder \"" + name + "\"");
        const std::string tag = "<" + name + ">";
        for (std::size_t pos = out.find(tag); pos != std::string::npos;
             pos = out.find(tag, pos + value.size()))
            out.replace(pos, tag.size(), value);
    }
    for (const std::string& name : known_placeholders()) {
        if (out.find("<" + name + ">") != std::string::npos)
            throw ValidationError("placeholder <" + name + "> left unfilled");
    }
    return out;
}

const PromptTemplate& record_translation_template() {
    static const PromptTemplate t{kTranslateSystem, kTranslateUser};
    return t;
}

const PromptTemplate& record_synthesis_template() {
    static const PromptTemplate t{kSynthesizeSystem, kSynthesizeUser};
    return t;
}

const PromptTemplate& term_translation_template() {
    static const PromptTemplate t{kTermsSystem, kTermsUser};
    return t;
}

HttpChatEndpoint::HttpChatEndpoint(LlmEndpointConfig config) : config_(std::move(config)) {
    config_.validate();
    std::size_t scheme = config_.base_url.find("://");
    if (scheme == std::string::npos)
        throw ConfigError("base_url must start with http:// or https://");
    std::size_t path = config_.base_url.find('/', scheme + 3);
    if (path == std::string::npos) {
        origin_ = config_.base_url;
        path_prefix_.clear();
    } else {
        origin_ = config_.base_url.substr(0, path);
        path_prefix_ = config_.base_url.substr(path);
        while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
    }
}

std::string HttpChatEndpoint::complete(const std::string& system_prompt,
                                       const std::string& user_prompt) {
    const nlohmann::json body{
        {"model", config_.model},
        {"messages",
         {{{"role", "system"}, {"content", system_prompt}},
          {{"role", "user"}, {"content", user_prompt}}}},
        {"temperature", config_.temperature}};
    const std::string payload = body.dump();

    std::string last_error;
    for (int attempt = 0; attempt <= config_.retries; ++attempt) {
        if (attempt > 0)
            std::this_thread::sleep_for(std::chrono::milliseconds(250ll << (attempt - 1)));

        httplib::Client client(origin_);
        client.set_connection_timeout(config_.timeout_seconds, 0);
        client.set_read_timeout(config_.timeout_seconds, 0);
        client.set_write_timeout(config_.timeout_seconds, 0);
        httplib::Headers headers;
        if (!config_.api_key.empty())
            headers.emplace("Authorization", "Bearer " + config_.api_key);

        httplib::Result res =
            client.Post(path_prefix_ + "/chat/completions", headers, payload, "application/json");
        if (!res) {
            last_error = "transport failure: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status != 200) {
            last_error = "HTTP " + std::to_string(res->status) + ": " + res->body;
            continue;
        }
        try {
            nlohmann::json reply = nlohmann::json::parse(res->body);
            return reply.at("choices").at(0).at("message").at("content").get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            last_error = std::string("malformed completion payload: ") + e.what();
        }
    }
    throw TransportError("chat completion failed after " + std::to_string(config_.retries + 1) +
                         " attempts: " + last_error);
}

std::string MockChatEndpoint::complete(const std::string& /*system_prompt*/,
                                       const std::string& user_prompt) {
    static const std::string kTranslateMarker = "Give this title and description in ";
    static const std::string kTermsMarker =
        "Now translate the following thesaurus terms to English:\n\n";
    static const std::string kSynthesizeMarker =
        "Create a new title and description that match the following subject keywords: ";

    std::size_t pos = user_prompt.find(kTranslateMarker);
    if (pos != std::string::npos) {
        std::size_t body = user_prompt.find(":\n\n", pos);
        if (body != std::string::npos) return trim(user_prompt.substr(body + 3));
    }

    pos = user_prompt.find(kTermsMarker);
    if (pos != std::string::npos) return trim(user_prompt.substr(pos + kTermsMarker.size()));

    pos = user_prompt.find(kSynthesizeMarker);
    if (pos != std::string::npos) {
        const std::string keywords = trim(user_prompt.substr(pos + kSynthesizeMarker.size()));
        std::string title = keywords;
        std::string description;
        std::size_t start = 0;
        for (;;) {
            std::size_t comma = keywords.find(", ", start);
            std::string keyword =
                keywords.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
            if (!keyword.empty()) {
                if (!description.empty()) description.push_back(' ');
                description += "Overview of " + keyword + ".";
            }
            if (comma == std::string::npos) break;
            start = comma + 2;
        }
        return title + "\n\n" + description;
    }

    return user_prompt;
}

std::pair<std::string, std::string> split_title_description(const std::string& response) {
    const std::string text = trim(strip_cr(response));
    std::size_t blank = text.find("\n\n");
    if (blank == std::string::npos) return {text, std::string()};
    return {trim(text.substr(0, blank)), trim(text.substr(blank + 2))};
}

std::string language_name(const std::string& code) {
    if (code == "de") return "German";
    if (code == "en") return "English";
    throw ConfigError("unsupported language code \"" + code + "\"");
}

DocumentRecord translate_record(const DocumentRecord& rec, const std::string& target_language,
                                ChatEndpoint& endpoint, const PromptTemplate& tmpl) {
    const std::string prompt = tmpl.render({{"LANGUAGE", language_name(target_language)},
                                            {"TITLE", rec.title},
                                            {"DESCRIPTION", rec.abstract_text}});
    std::string response;
    try {
        response = endpoint.complete(tmpl.system_prompt, prompt);
    } catch (const TransportError& e) {
        throw TransportError(std::string(e.what()) + " (record " + rec.id + ")");
    }
    if (trim(response).empty()) throw EmptyResponseError("record " + rec.id);

    auto [title, description] = split_title_description(response);
    DocumentRecord out = rec;
    out.id = rec.id + "-" + target_language;
    out.language = target_language;
    out.title = title;
    out.abstract_text = description;
    return out;
}

namespace {

std::vector<std::string> parse_numbered_list(const std::string& response, std::size_t expected,
                                             std::size_t batch_no) {
    std::vector<std::string> items;
    const std::string text = strip_cr(response);
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        std::string line = text.substr(
            start, end == std::string::npos ? std::string::npos : end - start);
        start = end == std::string::npos ? text.size() + 1 : end + 1;

        line = trim(line);
        if (line.empty()) continue;

        std::size_t digits = 0;
        while (digits < line.size() && std::isdigit(static_cast<unsigned char>(line[digits])))
            ++digits;
        if (digits == 0 || digits >= line.size() || line[digits] != '.')
            throw NumberingMismatchError("batch " + std::to_string(batch_no) +
                                         ": expected a numbered item, got \"" + line + "\"");
        const std::size_t number = std::stoul(line.substr(0, digits));
        if (number != items.size() + 1)
            throw NumberingMismatchError("batch " + std::to_string(batch_no) + ": item " +
                                         std::to_string(number) + " out of order, expected " +
                                         std::to_string(items.size() + 1));
        std::string term = trim(line.substr(digits + 1));
        if (term.empty())
            throw EmptyResponseError("batch " + std::to_string(batch_no) + " item " +
                                     std::to_string(number));
        items.push_back(std::move(term));
    }
    if (items.size() != expected)
        throw NumberingMismatchError("batch " + std::to_string(batch_no) + ": expected " +
                                     std::to_string(expected) + " items, got " +
                                     std::to_string(items.size()));
    return items;
}

}  // namespace

std::vector<std::string> translate_terms(const std::vector<std::string>& terms,
                                         ChatEndpoint& endpoint, std::size_t batch_size,
                                         int max_in_flight, const PromptTemplate& tmpl) {
    if (terms.empty()) throw ValidationError("translate_terms: no terms");
    if (batch_size < 1) throw ConfigError("batch_size must be >= 1");

    const std::size_t n_batches = (terms.size() + batch_size - 1) / batch_size;
    std::vector<std::vector<std::string>> batches(n_batches);
    run_indexed(n_batches, max_in_flight, [&](std::size_t b) {
        const std::size_t offset = b * batch_size;
        const std::size_t n = std::min(batch_size, terms.size() - offset);
        std::string list;
        for (std::size_t i = 0; i < n; ++i) {
            list += std::to_string(i + 1) + ". " + terms[offset + i];
            if (i + 1 < n) list.push_back('\n');
        }
        const std::string prompt = tmpl.render({{"LIST_OF_TERMS", list}});
        const std::string response = endpoint.complete(tmpl.system_prompt, prompt);
        batches[b] = parse_numbered_list(response, n, b + 1);
    });

    std::vector<std::string> out;
    out.reserve(terms.size());
    for (std::vector<std::string>& batch : batches)
        for (std::string& t : batch) out.push_back(std::move(t));
    return out;
}

DocumentRecord synthesize_record(const DocumentRecord& example, const SubjectVocabulary& vocab,
                                 ChatEndpoint& endpoint, std::uint64_t seed, int part,
                                 const PromptTemplate& tmpl) {
    if (example.subjects.empty())
        throw ValidationError("synthesize_record: example " + example.id + " has no subjects");
    const std::string& lang = example.language;

    auto pref_label = [&](const std::string& id) -> const std::string* {
        const Subject* s = vocab.find(id);
        if (s == nullptr) return nullptr;
        auto it = s->pref_label.find(lang);
        return it == s->pref_label.end() ? nullptr : &it->second;
    };

    std::string old_keywords;
    for (const std::string& id : example.subjects) {
        const std::string* label = pref_label(id);
        if (label == nullptr) continue;
        if (!old_keywords.empty()) old_keywords += ", ";
        old_keywords += *label;
    }
    if (old_keywords.empty())
        throw ValidationError("synthesize_record: no subject of " + example.id +
                              " has a preferred label in \"" + lang + "\"");

    std::vector<std::pair<std::string, const std::string*>> eligible;
    for (const auto& [id, subject] : vocab.subjects()) {
        if (example.subjects.count(id)) continue;
        const std::string* label = pref_label(id);
        if (label != nullptr) eligible.emplace_back(id, label);
    }
    if (eligible.empty())
        throw ValidationError("synthesize_record: no extra subject with a \"" + lang +
                              "\" preferred label is available");

    Rng rng(mix_seed(seed, fnv1a(example.id) ^ (static_cast<std::uint64_t>(part) << 32)));
    const auto& [extra_id, extra_label] = eligible[rng.next_index(eligible.size())];

    const std::string title_desc = example.abstract_text.empty()
                                       ? example.title
                                       : example.title + "\n\n" + example.abstract_text;
    const std::string prompt = tmpl.render({{"LANGUAGE", language_name(lang)},
                                            {"OLD_KEYWORDS", old_keywords},
                                            {"TITLE_DESC", title_desc},
                                            {"NEW_KEYWORDS", old_keywords + ", " + *extra_label}});

    std::string response;
    try {
        response = endpoint.complete(tmpl.system_prompt, prompt);
    } catch (const TransportError& e) {
        throw TransportError(std::string(e.what()) + " (record " + example.id + ")");
    }
    if (trim(response).empty()) throw EmptyResponseError("record " + example.id);

    auto [title, description] = split_title_description(response);
    DocumentRecord out;
    out.id = example.id + "-syn" + std::to_string(part);
    out.language = lang;
    out.title = title;
    out.abstract_text = description;
    out.subjects = example.subjects;
    out.subjects.insert(extra_id);
    return out;
}

Corpus translate_corpus(const Corpus& corpus, const std::string& target_language,
                        ChatEndpoint& endpoint, int max_in_flight, const PromptTemplate& tmpl) {
    Corpus out;
    out.origin = corpus.origin;
    out.records.resize(corpus.size());
    run_indexed(corpus.size(), max_in_flight, [&](std::size_t i) {
        out.records[i] = translate_record(corpus.records[i], target_language, endpoint, tmpl);
    });
    return out;
}

Corpus synthesize_corpus(const Corpus& corpus, const SubjectVocabulary& vocab,
                         ChatEndpoint& endpoint, std::uint64_t seed, int part, int max_in_flight,
                         const PromptTemplate& tmpl) {
    Corpus out;
    out.origin = CorpusOrigin::synthetic;
    out.records.resize(corpus.size());
    run_indexed(corpus.size(), max_in_flight, [&](std::size_t i) {
        out.records[i] = synthesize_record(corpus.records[i], vocab, endpoint, seed, part, tmpl);
    });
    return out;
}

SubjectVocabulary translate_vocabulary_terms(const SubjectVocabulary& vocab,
                                             ChatEndpoint& endpoint, std::size_t batch_size,
                                             int max_in_flight, const PromptTemplate& tmpl) {
    std::vector<std::string> ids;
    std::vector<std::string> labels;
    for (const auto& [id, subject] : vocab.subjects()) {
        if (subject.pref_label.count("en")) continue;
        auto de = subject.pref_label.find("de");
        if (de == subject.pref_label.end()) continue;
        ids.push_back(id);
        labels.push_back(de->second);
    }

    std::vector<Subject> subjects;
    subjects.reserve(vocab.size());
    for (const auto& [id, subject] : vocab.subjects()) subjects.push_back(subject);

    if (!labels.empty()) {
        std::vector<std::string> translated =
            translate_terms(labels, endpoint, batch_size, max_in_flight, tmpl);
        std::map<std::string, std::string> en_pref;
        for (std::size_t i = 0; i < ids.size(); ++i) en_pref[ids[i]] = translated[i];
        for (Subject& s : subjects) {
            auto it = en_pref.find(s.id);
            if (it != en_pref.end()) s.pref_label["en"] = it->second;
        }
    }
    return SubjectVocabulary(std::move(subjects), vocab.variant_name(), vocab.normalization());
}

}  // namespace subjidx
