#include "subjidx/run_io.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <vector>

#include "subjidx/errors.hpp"

namespace subjidx {

namespace {

std::string format_score(double score) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), score);
    return std::string(buf, ptr);
}

}  // namespace

void write_run_file(const Run& run, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    for (const auto& [doc_id, list] : run) {
        std::size_t rank = 1;
        for (const Suggestion& s : list.items)
            out << doc_id << '\t' << rank++ << '\t' << s.subject_id << '\t' << format_score(s.score)
                << '\n';
    }
    if (!out) throw IoError("write failed: " + path);
}

Run read_run_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);

    std::map<std::string, std::vector<Suggestion>> items;
    std::map<std::string, std::size_t> next_rank;
    std::map<std::string, std::set<std::string>> seen_subjects;

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;

        std::vector<std::string> fields;
        std::size_t start = 0;
        for (;;) {
            std::size_t pos = line.find('\t', start);
            if (pos == std::string::npos) {
                fields.push_back(line.substr(start));
                break;
            }
            fields.push_back(line.substr(start, pos - start));
            start = pos + 1;
        }
        if (fields.size() != 4)
            throw ParseError("expected 4 tab-separated fields, got " + std::to_string(fields.size()),
                             line_no);

        const std::string& doc_id = fields[0];
        if (doc_id.empty()) throw ParseError("empty doc id", line_no);

        std::size_t rank = 0;
        {
            auto [ptr, ec] = std::from_chars(fields[1].data(), fields[1].data() + fields[1].size(), rank);
            if (ec != std::errc() || ptr != fields[1].data() + fields[1].size() || rank == 0)
                throw ParseError("invalid rank \"" + fields[1] + "\"", line_no);
        }
        double score = 0.0;
        {
            auto [ptr, ec] =
                std::from_chars(fields[3].data(), fields[3].data() + fields[3].size(), score);
            if (ec != std::errc() || ptr != fields[3].data() + fields[3].size())
                throw ParseError("invalid score \"" + fields[3] + "\"", line_no);
        }

        std::size_t expected = next_rank[doc_id] + 1;
        if (rank != expected)
            throw ParseError("rank " + std::to_string(rank) + " for doc \"" + doc_id +
                                 "\", expected " + std::to_string(expected),
                             line_no);
        next_rank[doc_id] = rank;

        if (!seen_subjects[doc_id].insert(fields[2]).second)
            throw ParseError("duplicate subject \"" + fields[2] + "\" for doc \"" + doc_id + "\"",
                             line_no);
        std::vector<Suggestion>& docs = items[doc_id];
        if (!docs.empty() && docs.back().score < score)
            throw ParseError("scores must be non-increasing within a document", line_no);
        docs.push_back({fields[2], score});
    }

    Run run;
    for (auto& [doc_id, list] : items) {
        SuggestionList sl;
        sl.items = std::move(list);
        sl.provenance = "run";
        run.emplace(doc_id, std::move(sl));
    }
    return run;
}

}  // namespace subjidx
