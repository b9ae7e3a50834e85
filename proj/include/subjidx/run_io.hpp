#pragma once

#include <map>
#include <string>

#include "subjidx/suggestion.hpp"

namespace subjidx {

/// One submission run: ranked suggestions per document id.
using Run = std::map<std::string, SuggestionList>;

/// Run file format: TSV lines `doc_id<TAB>rank<TAB>subject_id<TAB>score`,
/// rank starting at 1 per document. Scores are written with shortest
/// round-trip precision, so write-then-read is exact.
void write_run_file(const Run& run, const std::string& path);

/// Strict reader: ranks must be contiguous from 1 per document, scores
/// non-increasing in rank order, subject ids unique per document.
Run read_run_file(const std::string& path);

}  // namespace subjidx
