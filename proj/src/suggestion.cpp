#include "subjidx/suggestion.hpp"

#include <algorithm>
#include <string_view>
#include <unordered_set>

#include "subjidx/errors.hpp"

namespace subjidx {

SuggestionList SuggestionList::ranked(std::vector<Suggestion> items, std::string provenance,
                                      std::size_t limit) {
    std::unordered_set<std::string_view> seen;
    seen.reserve(items.size());
    for (const Suggestion& s : items) {
        if (!seen.insert(s.subject_id).second)
            throw ValidationError("duplicate subject id in suggestion list: " + s.subject_id);
    }
    std::sort(items.begin(), items.end(), suggestion_before);
    SuggestionList out;
    out.items = std::move(items);
    out.provenance = std::move(provenance);
    out.truncate(limit);
    return out;
}

}  // namespace subjidx
