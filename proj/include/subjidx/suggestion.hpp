#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

namespace subjidx {

struct Suggestion {
    std::string subject_id;
    double score = 0.0;

    bool operator==(const Suggestion&) const = default;
};

/// Ranking order shared everywhere: score descending, subject id ascending on ties.
inline bool suggestion_before(const Suggestion& a, const Suggestion& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.subject_id < b.subject_id;
}

/// Ranked (subject id, score) pairs from a backend or an ensemble. Items are
/// sorted by score descending with id tiebreak and contain no duplicate ids.
/// Base-backend scores lie in [0,1]; merged multilingual scores may exceed 1.
struct SuggestionList {
    static constexpr std::size_t kNoLimit = std::numeric_limits<std::size_t>::max();

    std::vector<Suggestion> items;
    std::string provenance;

    /// Sorts, verifies id uniqueness, and truncates. The one sanctioned way to
    /// build a list from unordered scores.
    static SuggestionList ranked(std::vector<Suggestion> items, std::string provenance,
                                 std::size_t limit = kNoLimit);

    void truncate(std::size_t limit) {
        if (items.size() > limit) items.resize(limit);
    }

    bool empty() const { return items.empty(); }
    std::size_t size() const { return items.size(); }
};

}  // namespace subjidx
