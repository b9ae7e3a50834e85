#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "subjidx/corpus.hpp"
#include "subjidx/vocabulary.hpp"

namespace subjidx {

/// OpenAI-compatible chat-completions endpoint settings. The API key comes
/// from the environment (SUBJIDX_API_KEY, falling back to OPENAI_API_KEY).
struct LlmEndpointConfig {
    std::string base_url = "http://localhost:8000/v1";
    std::string model = "default";
    std::string api_key;
    double temperature = 0.0;
    int max_in_flight = 4;
    int timeout_seconds = 60;
    int retries = 2;

    void validate() const;  // throws ConfigError
};

/// Reads the API key from the environment; empty when unset.
std::string api_key_from_env();

/// Chat template with a system prompt and a user template containing
/// <PLACEHOLDER> tags. Stored on disk as the system prompt, a line holding
/// exactly "---", then the user template.
struct PromptTemplate {
    std::string system_prompt;
    std::string user_template;

    static PromptTemplate parse(const std::string& file_text);
    static PromptTemplate load(const std::string& path);

    /// Substitutes placeholders by bare name ("TITLE" fills every <TITLE>).
    /// Throws when a known placeholder is left unfilled or a given name is
    /// not a known placeholder.
    std::string render(const std::map<std::string, std::string>& values) const;
};

/// The placeholders render() recognizes.
const std::vector<std::string>& known_placeholders();

/// Built-in templates; the copies under prompts/ hold the same text.
const PromptTemplate& record_translation_template();
const PromptTemplate& record_synthesis_template();
const PromptTemplate& term_translation_template();

/// A single chat turn. Implementations must be safe to call from several
/// threads at once.
class ChatEndpoint {
public:
    virtual ~ChatEndpoint() = default;
    /// Returns the assistant message content; throws LlmError on failure.
    virtual std::string complete(const std::string& system_prompt,
                                 const std::string& user_prompt) = 0;
};

/// Talks to an OpenAI-compatible /chat/completions endpoint with per-request
/// retry and exponential backoff.
class HttpChatEndpoint : public ChatEndpoint {
public:
    explicit HttpChatEndpoint(LlmEndpointConfig config);
    std::string complete(const std::string& system_prompt,
                         const std::string& user_prompt) override;

    const LlmEndpointConfig& config() const { return config_; }

private:
    LlmEndpointConfig config_;
    std::string origin_;       // scheme://host[:port]
    std::string path_prefix_;  // e.g. /v1
};

/// Deterministic offline endpoint: translation prompts echo their text
/// unchanged, synthesis prompts stitch the requested keywords into a title
/// and description, term lists come back verbatim.
class MockChatEndpoint : public ChatEndpoint {
public:
    std::string complete(const std::string& system_prompt,
                         const std::string& user_prompt) override;
};

/// Splits a completion at the first blank line: first block is the title,
/// the remainder the description.
std::pair<std::string, std::string> split_title_description(const std::string& response);

/// "de" -> "German", "en" -> "English" (prompt-facing names).
std::string language_name(const std::string& code);

/// Translates one record into the target language. The copy keeps the
/// subjects, takes language=target, and gets "-de"/"-en" appended to its id.
DocumentRecord translate_record(const DocumentRecord& rec, const std::string& target_language,
                                ChatEndpoint& endpoint,
                                const PromptTemplate& tmpl = record_translation_template());

/// Translates terms in numbered batches of batch_size, preserving order and
/// length. Replies must come back as a matching numbered list. Batches run
/// over up to max_in_flight threads and reassemble in input order.
std::vector<std::string> translate_terms(const std::vector<std::string>& terms,
                                         ChatEndpoint& endpoint, std::size_t batch_size = 100,
                                         int max_in_flight = 1,
                                         const PromptTemplate& tmpl = term_translation_template());

/// Generates one synthetic record modeled on the example: same subjects plus
/// one seeded-random extra vocabulary subject, id = example id + "-syn<part>".
DocumentRecord synthesize_record(const DocumentRecord& example, const SubjectVocabulary& vocab,
                                 ChatEndpoint& endpoint, std::uint64_t seed, int part = 1,
                                 const PromptTemplate& tmpl = record_synthesis_template());

/// Whole-corpus helpers. Work is spread over up to max_in_flight threads;
/// results keep input order; the first failure aborts the batch.
Corpus translate_corpus(const Corpus& corpus, const std::string& target_language,
                        ChatEndpoint& endpoint, int max_in_flight = 4,
                        const PromptTemplate& tmpl = record_translation_template());
Corpus synthesize_corpus(const Corpus& corpus, const SubjectVocabulary& vocab,
                         ChatEndpoint& endpoint, std::uint64_t seed, int part = 1,
                         int max_in_flight = 4,
                         const PromptTemplate& tmpl = record_synthesis_template());

/// Fills missing English preferred labels by translating the German ones in
/// batches; other labels are untouched.
SubjectVocabulary translate_vocabulary_terms(const SubjectVocabulary& vocab,
                                             ChatEndpoint& endpoint, std::size_t batch_size = 100,
                                             int max_in_flight = 1,
                                             const PromptTemplate& tmpl = term_translation_template());

}  // namespace subjidx
