#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "subjidx/errors.hpp"
#include "subjidx/vocabulary.hpp"

using namespace subjidx;
using testutil::TempDir;
using testutil::write_file;

TEST_CASE("TSV loader: field mapping") {
    TempDir dir;
    write_file(dir.file("v.tsv"),
               "gnd:1\tKlimawandel\tClimate change\t\tglobal warming\n");
    SubjectVocabulary v = load_vocabulary_tsv(dir.file("v.tsv"), "all");
    REQUIRE(v.size() == 1);
    const Subject* s = v.find("gnd:1");
    REQUIRE(s != nullptr);
    CHECK(s->pref_label.at("de") == "Klimawandel");
    CHECK(s->pref_label.at("en") == "Climate change");
    CHECK(s->alt_labels.count("de") == 0);
    CHECK(s->alt_labels.at("en") == std::vector<std::string>{"global warming"});
}

TEST_CASE("TSV loader: duplicate id") {
    TempDir dir;
    write_file(dir.file("v.tsv"), "gnd:1\tA\tA\ngnd:1\tB\tB\n");
    CHECK_THROWS_AS(load_vocabulary_tsv(dir.file("v.tsv"), "all"), DuplicateIdError);
}

TEST_CASE("TSV loader: four bilingual subjects queryable by both languages") {
    TempDir dir;
    write_file(dir.file("v.tsv"),
               "gnd:1\tIndividualisierte Person\tDifferentiated person\n"
               "gnd:2\tFamilie\tFamily\n"
               "gnd:3\tSchlagwort\tSubject heading\n"
               "gnd:4\tSicherung\tSafeguarding\n");
    SubjectVocabulary v = load_vocabulary_tsv(dir.file("v.tsv"), "all");
    CHECK(v.size() == 4);
    CHECK(v.label_index("de").count("familie") == 1);
    CHECK(v.label_index("en").count("family") == 1);
    CHECK(v.label_index("de").at("familie").count("gnd:2") == 1);
    CHECK(v.label_index("en").at("subject heading").count("gnd:3") == 1);
}

TEST_CASE("TSV loader: error cases") {
    TempDir dir;
    SUBCASE("alternate labels without a preferred label") {
        write_file(dir.file("v.tsv"), "gnd:1\t\tClimate change\tKlima\t\n");
        CHECK_THROWS_AS(load_vocabulary_tsv(dir.file("v.tsv"), "all"), MissingFieldError);
    }
    SUBCASE("no preferred label at all") {
        write_file(dir.file("v.tsv"), "gnd:1\t\t\t\t\n");
        CHECK_THROWS_AS(load_vocabulary_tsv(dir.file("v.tsv"), "all"), MissingFieldError);
    }
    SUBCASE("empty file") {
        write_file(dir.file("v.tsv"), "");
        CHECK_THROWS_AS(load_vocabulary_tsv(dir.file("v.tsv"), "all"), ParseError);
    }
    SUBCASE("too few fields") {
        write_file(dir.file("v.tsv"), "gnd:1\tonly-de\n");
        CHECK_THROWS_AS(load_vocabulary_tsv(dir.file("v.tsv"), "all"), ParseError);
    }
    SUBCASE("missing file") {
        CHECK_THROWS_AS(load_vocabulary_tsv(dir.file("absent.tsv"), "all"), IoError);
    }
}

TEST_CASE("N-Triples loader: label triples consumed, others ignored") {
    TempDir dir;
    write_file(dir.file("v.nt"),
               "<gnd:1> <http://www.w3.org/2004/02/skos/core#prefLabel> \"Familie\"@de .\n"
               "<gnd:1> <http://www.w3.org/2004/02/skos/core#prefLabel> \"Family\"@en .\n"
               "<gnd:1> <http://www.w3.org/2004/02/skos/core#altLabel> \"Haushalt\"@de .\n"
               "<gnd:1> <http://www.w3.org/2004/02/skos/core#broader> <gnd:0> .\n"
               "# a comment line\n"
               "<gnd:1> <http://example.org/note> \"untagged literal\" .\n");
    SubjectVocabulary v = load_vocabulary_ntriples(dir.file("v.nt"), "all");
    REQUIRE(v.size() == 1);
    const Subject* s = v.find("gnd:1");
    CHECK(s->pref_label.at("de") == "Familie");
    CHECK(s->pref_label.at("en") == "Family");
    CHECK(s->alt_labels.at("de") == std::vector<std::string>{"Haushalt"});
}

TEST_CASE("N-Triples loader: blank-node triples are skipped, not errors") {
    TempDir dir;
    write_file(dir.file("v.nt"),
               "_:b0 <http://www.w3.org/2004/02/skos/core#prefLabel> \"unreachable\"@de .\n"
               "<gnd:1> <http://example.org/related> _:b0 .\n"
               "<gnd:1> <http://www.w3.org/2004/02/skos/core#prefLabel> \"Familie\"@de .\n");
    SubjectVocabulary v = load_vocabulary_ntriples(dir.file("v.nt"), "all");
    REQUIRE(v.size() == 1);
    CHECK(v.find("gnd:1")->pref_label.at("de") == "Familie");
}

TEST_CASE("N-Triples loader: syntax and semantic errors") {
    TempDir dir;
    SUBCASE("missing terminal dot") {
        write_file(dir.file("v.nt"),
                   "<gnd:1> <http://www.w3.org/2004/02/skos/core#prefLabel> \"Familie\"@de\n");
        try {
            load_vocabulary_ntriples(dir.file("v.nt"), "all");
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.line() == 1);
        }
    }
    SUBCASE("second prefLabel for the same subject and language") {
        write_file(dir.file("v.nt"),
                   "<gnd:1> <http://www.w3.org/2004/02/skos/core#prefLabel> \"A\"@de .\n"
                   "<gnd:1> <http://www.w3.org/2004/02/skos/core#prefLabel> \"B\"@de .\n");
        CHECK_THROWS_AS(load_vocabulary_ntriples(dir.file("v.nt"), "all"), ValidationError);
    }
    SUBCASE("escape sequences decode") {
        write_file(dir.file("v.nt"),
                   "<gnd:1> <http://www.w3.org/2004/02/skos/core#prefLabel> "
                   "\"a \\\"b\\\" \\u00E4\"@de .\n");
        SubjectVocabulary v = load_vocabulary_ntriples(dir.file("v.nt"), "all");
        CHECK(v.find("gnd:1")->pref_label.at("de") == "a \"b\" \u00e4");
    }
}

TEST_CASE("TSV and N-Triples loaders agree on the same logical content") {
    std::mt19937 gen(3);
    std::vector<std::string> words = {"Wasser", "Energie", "Klima", "Stadt", "Musik",
                                      "water",  "energy",  "climate", "city", "music"};
    for (int trial = 0; trial < 20; ++trial) {
        std::string tsv, nt;
        int n = 2 + int(gen() % 6);
        for (int i = 0; i < n; ++i) {
            std::string id = "gnd:" + std::to_string(i);
            std::string de = words[gen() % 5] + " " + std::to_string(i);
            std::string en = words[5 + gen() % 5] + " " + std::to_string(i);
            std::string alt_de = (gen() % 2) ? words[gen() % 5] + "alt" + std::to_string(i) : "";
            tsv += id + "\t" + de + "\t" + en + "\t" + alt_de + "\t\n";
            nt += "<" + id + "> <http://www.w3.org/2004/02/skos/core#prefLabel> \"" + de +
                  "\"@de .\n";
            nt += "<" + id + "> <http://www.w3.org/2004/02/skos/core#prefLabel> \"" + en +
                  "\"@en .\n";
            if (!alt_de.empty())
                nt += "<" + id + "> <http://www.w3.org/2004/02/skos/core#altLabel> \"" + alt_de +
                      "\"@de .\n";
        }
        TempDir dir;
        write_file(dir.file("v.tsv"), tsv);
        write_file(dir.file("v.nt"), nt);
        SubjectVocabulary a = load_vocabulary_tsv(dir.file("v.tsv"), "all");
        SubjectVocabulary b = load_vocabulary_ntriples(dir.file("v.nt"), "all");
        CHECK(a.subjects() == b.subjects());
        CHECK(a.label_index("de") == b.label_index("de"));
        CHECK(a.label_index("en") == b.label_index("en"));
    }
}

TEST_CASE("subset: intersection, warnings, emptiness") {
    TempDir dir;
    std::string tsv;
    for (int i = 0; i < 10; ++i)
        tsv += "gnd:" + std::to_string(i) + "\tWort" + std::to_string(i) + "\tword" +
               std::to_string(i) + "\n";
    write_file(dir.file("v.tsv"), tsv);
    SubjectVocabulary v = load_vocabulary_tsv(dir.file("v.tsv"), "all");

    SUBCASE("three present ids") {
        write_file(dir.file("ids.txt"), "# core ids\ngnd:1\ngnd:3\ngnd:5\n");
        SubsetResult r = subset(v, dir.file("ids.txt"), "core");
        CHECK(r.vocabulary.size() == 3);
        CHECK(r.vocabulary.variant_name() == "core");
        CHECK(r.warnings.empty());
    }
    SUBCASE("no present ids") {
        write_file(dir.file("ids.txt"), "gnd:90\ngnd:91\ngnd:92\n");
        CHECK_THROWS_AS(subset(v, dir.file("ids.txt"), "core"), EmptySubsetError);
    }
    SUBCASE("two present, one absent") {
        write_file(dir.file("ids.txt"), "gnd:1\ngnd:2\ngnd:99\n");
        SubsetResult r = subset(v, dir.file("ids.txt"), "core");
        CHECK(r.vocabulary.size() == 2);
        REQUIRE(r.warnings.size() == 1);
        CHECK(r.warnings[0].find("gnd:99") != std::string::npos);
    }
    SUBCASE("subset with every id equals the original") {
        std::string all_ids;
        for (const auto& [id, s] : v.subjects()) all_ids += id + "\n";
        write_file(dir.file("ids.txt"), all_ids);
        SubsetResult r = subset(v, dir.file("ids.txt"), "all");
        CHECK(r.vocabulary.subjects() == v.subjects());
        CHECK(r.vocabulary.label_index("de") == v.label_index("de"));
    }
}

TEST_CASE("label index: rebuild is a fixed point and labels map back to sources") {
    TempDir dir;
    write_file(dir.file("v.tsv"),
               "gnd:1\tKlimawandel\tClimate change\tErderwärmung\tglobal warming\n"
               "gnd:2\tKlima\tClimate\t\t\n");
    SubjectVocabulary v = load_vocabulary_tsv(dir.file("v.tsv"), "all");
    auto de_before = v.label_index("de");
    auto en_before = v.label_index("en");
    v.rebuild_label_index();
    CHECK(v.label_index("de") == de_before);
    CHECK(v.label_index("en") == en_before);

    AnalyzerConfig norm = v.normalization();
    for (const auto& [id, s] : v.subjects()) {
        for (const auto& [lang, label] : s.pref_label) {
            norm.language = lang;
            std::string phrase = normalize_label(label, norm);
            REQUIRE(!phrase.empty());
            CHECK(v.label_index(lang).at(phrase).count(id) == 1);
        }
        for (const auto& [lang, labels] : s.alt_labels) {
            norm.language = lang;
            for (const std::string& label : labels) {
                std::string phrase = normalize_label(label, norm);
                if (!phrase.empty()) CHECK(v.label_index(lang).at(phrase).count(id) == 1);
            }
        }
    }
}

TEST_CASE("save_vocabulary_tsv round-trips") {
    TempDir dir;
    write_file(dir.file("v.tsv"),
               "gnd:1\tKlimawandel\tClimate change\tErderwärmung;Treibhauseffekt\tglobal warming\n"
               "gnd:2\tKlima\t\t\t\n");
    SubjectVocabulary v = load_vocabulary_tsv(dir.file("v.tsv"), "all");
    save_vocabulary_tsv(v, dir.file("w.tsv"));
    SubjectVocabulary w = load_vocabulary_tsv(dir.file("w.tsv"), "all");
    CHECK(v.subjects() == w.subjects());
}
