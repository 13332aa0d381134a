#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "testutil.hpp"
#include "tfit/errors.hpp"
#include "tfit/ingest.hpp"
#include "tfit/util.hpp"

using namespace tfit;

namespace {

struct Collected {
    std::vector<DepEdge> edges;
    EdgeSink sink() {
        return [this](const DepEdge& e) { edges.push_back(e); };
    }
    bool has(const std::string& head, const std::string& rel, const std::string& dep) const {
        return std::any_of(edges.begin(), edges.end(), [&](const DepEdge& e) {
            return e.head == head && e.relation == rel && e.dep == dep;
        });
    }
};

}  // namespace

TEST_CASE("split_tabs keeps empty fields") {
    auto f = split_tabs("a\t\tb\t");
    REQUIRE(f.size() == 4);
    CHECK(f[0] == "a");
    CHECK(f[1] == "");
    CHECK(f[2] == "b");
    CHECK(f[3] == "");
    CHECK(split_tabs("").size() == 1);
    CHECK(split_tabs("plain").size() == 1);
}

TEST_CASE("valid_utf8 accepts real text and rejects junk") {
    CHECK(valid_utf8("ascii"));
    CHECK(valid_utf8("caf\xc3\xa9"));
    CHECK(valid_utf8("\xe6\x97\xa5\xe6\x9c\xac"));
    CHECK(valid_utf8("\xf0\x9f\x99\x82"));
    CHECK_FALSE(valid_utf8("\xff"));
    CHECK_FALSE(valid_utf8("\xc3"));                  // truncated sequence
    CHECK_FALSE(valid_utf8("\xc0\xaf"));              // overlong
    CHECK_FALSE(valid_utf8("\xed\xa0\x80"));          // surrogate
    CHECK_FALSE(valid_utf8("\xf4\x90\x80\x80"));      // above U+10FFFF
}

TEST_CASE("relation inventory lists direct and inverse labels") {
    auto inv = RelationInventory::defaults();
    CHECK(inv.has_direct("sbj"));
    CHECK(inv.has_inverse("sbj"));
    CHECK(inv.has_direct("obj"));
    CHECK(inv.has_inverse("obj"));
    for (const char* prep : {"at", "in", "on", "with"}) {
        CHECK_FALSE(inv.has_direct(prep));
        CHECK(inv.has_inverse(prep));
    }
    CHECK_FALSE(inv.knows("amod"));
    CHECK(inv.labels().size() == 8);

    auto both = RelationInventory::defaults_with_direct_preps();
    for (const char* prep : {"at", "in", "on", "with"}) {
        CHECK(both.has_direct(prep));
        CHECK(both.has_inverse(prep));
    }
    CHECK(both.labels().size() == 12);
}

TEST_CASE("edges_to_dsm_pairs expands direct and inverse contexts") {
    auto inv = RelationInventory::defaults();
    DepEdge sbj{"eat-v", "dog-n", "sbj", 3, ""};
    auto pairs = edges_to_dsm_pairs(sbj, inv);
    REQUIRE(pairs.size() == 2);
    CHECK(pairs[0].target == "eat-v");
    CHECK(pairs[0].context == "sbj:dog-n");
    CHECK(pairs[0].count == 3);
    CHECK(pairs[1].target == "dog-n");
    CHECK(pairs[1].context == "sbj-1:eat-v");
    CHECK(pairs[1].count == 3);

    DepEdge prep{"cut-v", "knife-n", "with", 1, ""};
    pairs = edges_to_dsm_pairs(prep, inv);
    REQUIRE(pairs.size() == 1);  // inverse only under the default inventory
    CHECK(pairs[0].target == "knife-n");
    CHECK(pairs[0].context == "with-1:cut-v");

    DepEdge unknown{"eat-v", "red-j", "amod", 1, ""};
    CHECK(edges_to_dsm_pairs(unknown, inv).empty());

    DepEdge zero{"eat-v", "dog-n", "sbj", 0, ""};
    CHECK(edges_to_dsm_pairs(zero, inv).empty());

    auto both = RelationInventory::defaults_with_direct_preps();
    pairs = edges_to_dsm_pairs(prep, both);
    REQUIRE(pairs.size() == 2);
    CHECK(pairs[0].context == "with:knife-n");
    CHECK(pairs[1].context == "with-1:cut-v");
}

TEST_CASE("label mapping from_tsv and subtype fallback") {
    std::istringstream in(
        "# comment\n"
        "\n"
        "nsubj\tsbj\n"
        "obl\t@prep\n"
        "case\t@case\n");
    auto m = LabelMapping::from_tsv(in);
    REQUIRE(m.lookup("nsubj") != nullptr);
    CHECK(*m.lookup("nsubj") == "sbj");
    CHECK(*m.lookup("nsubj:pass") == "sbj");  // subtype falls back to base
    CHECK(*m.lookup("obl") == "@prep");
    CHECK(m.lookup("amod") == nullptr);
    CHECK(m.lookup("nsubjx") == nullptr);

    std::istringstream bad("nsubj\n");
    CHECK_THROWS_AS(LabelMapping::from_tsv(bad), config_error);
}

TEST_CASE("ud_default covers the standard labels") {
    auto m = LabelMapping::ud_default();
    CHECK(*m.lookup("nsubj") == "sbj");
    CHECK(*m.lookup("csubj") == "sbj");
    CHECK(*m.lookup("obj") == "obj");
    CHECK(*m.lookup("dobj") == "obj");
    CHECK(*m.lookup("obl") == "@prep");
    CHECK(*m.lookup("nmod") == "@prep");
    CHECK(*m.lookup("case") == "@case");
}

TEST_CASE("read_conllu on the bundled sample") {
    std::ifstream in(testutil::fixture("tiny.conllu"));
    REQUIRE(in.good());
    Collected got;
    auto stats = read_conllu(in, LabelMapping::ud_default(), got.sink());

    CHECK(stats.sentences == 3);
    CHECK(stats.edges == 5);
    CHECK(stats.edge_multiplicity == 5);
    CHECK(stats.malformed_lines == 0);
    CHECK(stats.dropped_arcs == 9);

    REQUIRE(got.edges.size() == 5);
    CHECK(got.has("arrest-v", "sbj", "cop-n"));
    CHECK(got.has("arrest-v", "obj", "thief-n"));
    CHECK(got.has("cut-v", "obj", "bread-n"));
    CHECK(got.has("cut-v", "with", "knife-n"));   // obl + case collapsed to the preposition
    CHECK(got.has("walk-v", "in", "direction-n"));

    for (const auto& e : got.edges) CHECK(e.count == 1);
    CHECK(got.edges[0].sentence_id == "s1");
    CHECK(got.edges.back().sentence_id == "s3");
}

TEST_CASE("read_conllu skips malformed lines without aborting") {
    std::istringstream in(
        "1\tDogs\tdog\tNOUN\t_\t_\t2\tnsubj\t_\t_\n"
        "not ten columns\n"
        "2\tbark\tbark\tVERB\t_\t_\t0\troot\t_\t_\n"
        "x\tbad\tid\tNOUN\t_\t_\t2\tobj\t_\t_\n"
        "3\tbones\tbone\tNOUN\t_\t_\t2\tobj\t_\t_\n"
        "\n");
    Collected got;
    auto stats = read_conllu(in, LabelMapping::ud_default(), got.sink());
    CHECK(stats.sentences == 1);
    CHECK(stats.malformed_lines == 2);
    CHECK(stats.edges == 2);
    CHECK(got.has("bark-v", "sbj", "dog-n"));
    CHECK(got.has("bark-v", "obj", "bone-n"));
    REQUIRE(stats.errors.size() == 2);
    CHECK(stats.errors[0].first == 2);
    CHECK(stats.errors[1].first == 4);
}

TEST_CASE("read_conllu rejects invalid UTF-8 lines") {
    std::string line = "1\tcaf\xff\tcafe\tNOUN\t_\t_\t2\tnsubj\t_\t_\n";
    std::istringstream in(line +
                          "2\topens\topen\tVERB\t_\t_\t0\troot\t_\t_\n\n");
    Collected got;
    auto stats = read_conllu(in, LabelMapping::ud_default(), got.sink());
    CHECK(stats.malformed_lines == 1);
    CHECK(got.edges.empty());
}

TEST_CASE("read_conllu skips multiword and empty-node ids") {
    std::istringstream in(
        "1-2\tdon't\t_\t_\t_\t_\t_\t_\t_\t_\n"
        "1\tdo\tdo\tAUX\t_\t_\t3\taux\t_\t_\n"
        "2\tnot\tnot\tPART\t_\t_\t3\tadvmod\t_\t_\n"
        "3\teat\teat\tVERB\t_\t_\t0\troot\t_\t_\n"
        "3.1\telided\telide\tVERB\t_\t_\t_\t_\t_\t_\n"
        "4\tmeat\tmeat\tNOUN\t_\t_\t3\tobj\t_\t_\n"
        "\n");
    Collected got;
    auto stats = read_conllu(in, LabelMapping::ud_default(), got.sink());
    CHECK(stats.malformed_lines == 0);
    CHECK(stats.edges == 1);
    CHECK(got.has("eat-v", "obj", "meat-n"));
}

TEST_CASE("read_conllu falls back to the form when the lemma is underscore") {
    std::istringstream in(
        "1\tDogs\t_\tNOUN\t_\t_\t2\tnsubj\t_\t_\n"
        "2\tbark\tbark\tVERB\t_\t_\t0\troot\t_\t_\n"
        "\n");
    Collected got;
    read_conllu(in, LabelMapping::ud_default(), got.sink());
    REQUIRE(got.edges.size() == 1);
    CHECK(got.edges[0].dep == "dogs-n");
}

TEST_CASE("prepositional arcs without a case child are dropped") {
    std::istringstream in(
        "1\twalked\twalk\tVERB\t_\t_\t0\troot\t_\t_\n"
        "2\tpark\tpark\tNOUN\t_\t_\t1\tobl\t_\t_\n"
        "\n");
    Collected got;
    auto stats = read_conllu(in, LabelMapping::ud_default(), got.sink());
    CHECK(got.edges.empty());
    CHECK(stats.dropped_arcs == 1);
}

TEST_CASE("read_triples parses counts and flags bad lines") {
    std::istringstream in(
        "# header comment\n"
        "eat-v\tobj\tpizza-n\t4\n"
        "eat-v\tsbj\tman-n\n"
        "bad line without tabs\n"
        "eat-v\tobj\tcake-n\t0\n"
        "eat-v\tobj\tcake-n\t2x\n"
        "eat-v\tobj\tcake-n\t-1\n"
        "\n"
        "cut-v\twith\tknife-n\t2\n");
    Collected got;
    auto stats = read_triples(in, got.sink());
    CHECK(stats.edges == 3);
    CHECK(stats.edge_multiplicity == 7);
    CHECK(stats.malformed_lines == 4);
    REQUIRE(got.edges.size() == 3);
    CHECK(got.edges[0].count == 4);
    CHECK(got.edges[1].count == 1);  // omitted count defaults to 1
    CHECK(got.edges[2].count == 2);
    CHECK(got.edges[2].head == "cut-v");
    CHECK(got.edges[2].relation == "with");
    CHECK(got.edges[2].dep == "knife-n");
}

TEST_CASE("read_triples accumulates the same totals under permutation") {
    std::vector<std::string> lines = {
        "eat-v\tobj\tpizza-n\t4",  "eat-v\tobj\tcake-n\t2", "cut-v\twith\tknife-n\t7",
        "arrest-v\tsbj\tcop-n\t1", "eat-v\tsbj\tman-n\t3",
    };
    auto run = [&](const std::vector<std::string>& order) {
        std::string joined;
        for (const auto& l : order) joined += l + "\n";
        std::istringstream in(joined);
        std::map<std::string, std::uint64_t> sums;
        auto stats = read_triples(in, [&](const DepEdge& e) {
            sums[e.head + "|" + e.relation + "|" + e.dep] += e.count;
        });
        return std::pair(stats.edge_multiplicity, sums);
    };
    auto base = run(lines);
    std::vector<std::string> shuffled = {lines[3], lines[0], lines[4], lines[2], lines[1]};
    auto other = run(shuffled);
    CHECK(base.first == 17);
    CHECK(base == other);
}

TEST_CASE("stats absorb sums counters and caps recorded errors") {
    IngestStats a, b;
    a.record(1, "x");
    a.malformed_lines = 1;
    a.edges = 2;
    b.edges = 3;
    b.malformed_lines = 100;
    for (std::uint64_t i = 0; i < 100; ++i) b.record(i + 10, "y");
    CHECK(b.errors.size() == IngestStats::max_recorded_errors);
    a.absorb(b);
    CHECK(a.edges == 5);
    CHECK(a.malformed_lines == 101);
    CHECK(a.errors.size() == IngestStats::max_recorded_errors);
}
