#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "oracles.hpp"
#include "testutil.hpp"
#include "tfit/cooc.hpp"
#include "tfit/errors.hpp"
#include "tfit/weighting.hpp"

using namespace tfit;

namespace {

using RawPairs = std::vector<std::tuple<std::string, std::string, std::uint64_t>>;

CoocMatrix build(const RawPairs& pairs) {
    MatrixBuilder b;
    for (const auto& [t, c, n] : pairs) b.add(t, c, n);
    return b.finish();
}

RawPairs random_pairs(testutil::Rng& rng) {
    RawPairs out;
    int nt = rng.uniform(1, 7), nc = rng.uniform(1, 7);
    int n = rng.uniform(1, nt * nc);
    for (int i = 0; i < n; ++i)
        out.emplace_back("t" + std::to_string(rng.uniform(0, nt - 1)),
                         "c" + std::to_string(rng.uniform(0, nc - 1)),
                         static_cast<std::uint64_t>(rng.uniform(1, 40)));
    return out;
}

oracle::Pairs to_oracle(const RawPairs& pairs) {
    oracle::Pairs out;
    for (const auto& [t, c, n] : pairs) out[{t, c}] += static_cast<double>(n);
    return out;
}

}  // namespace

TEST_CASE("ppmi on a hand-derived fixture") {
    auto m = ppmi(build({{"w", "c", 4}, {"w2", "c2", 12}}));
    // |w,c|=4, |w|=4, |c|=4, D=16: log2(4*16/16) = 2
    CHECK(m.value("w", "c") == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(m.value("w2", "c2") == doctest::Approx(std::log2(4.0 / 3.0)).epsilon(1e-12));
    CHECK(m.weighted() == Weighting::ppmi);
    // marginals and the grand total still describe the raw counts
    CHECK(m.total() == 16.0);
    CHECK(m.target_marginal(*m.target_id("w")) == 4.0);
    CHECK(m.context_marginal(*m.context_id("c2")) == 12.0);
}

TEST_CASE("independent cells score zero and leave the support") {
    WeightStats stats;
    auto m = ppmi(build({{"w", "c", 2}, {"w", "c2", 2}, {"w2", "c", 2}, {"w2", "c2", 2}}), &stats);
    CHECK(m.n_cells() == 0);
    CHECK(stats.cells_before == 4);
    CHECK(stats.cells_after == 0);
    CHECK(stats.dropped_nonpositive == 4);
    CHECK(stats.dropped_zero_expected == 0);
    CHECK(m.n_targets() == 2);  // vocabulary survives even when its cells do not
    CHECK(m.total() == 8.0);
}

TEST_CASE("negative associations are clamped out, positive ones kept") {
    WeightStats stats;
    auto m = ppmi(build({{"w", "c", 1}, {"w", "c2", 7}, {"w2", "c", 7}, {"w2", "c2", 1}}), &stats);
    // |w,c|=1, |w|=8, |c|=8, D=16: log2(16/64) = -2, dropped
    CHECK(m.value("w", "c") == 0.0);
    CHECK(m.value("w2", "c2") == 0.0);
    CHECK(m.value("w", "c2") == doctest::Approx(std::log2(7.0 * 16.0 / 64.0)).epsilon(1e-12));
    CHECK(stats.dropped_nonpositive == 2);
    CHECK(stats.cells_after == 2);
}

TEST_CASE("plmi is ppmi times the raw count") {
    auto m = plmi_matrix(build({{"w", "c", 4}, {"w2", "c2", 12}}));
    CHECK(m.value("w", "c") == doctest::Approx(8.0).epsilon(1e-12));  // 2 * 4
    CHECK(m.weighted() == Weighting::plmi);
}

TEST_CASE("plmi tensor under three-way independence expectation") {
    TensorBuilder b;
    b.add("v", "r", "f", 10);
    b.add("v2", "r", "f2", 10);
    b.add("v3", "r2", "f", 10);
    b.add("v4", "r3", "f3", 10);
    auto t = plmi_tensor(b.finish());
    // O=10, T=40, m(v)=10, m(r)=20, m(f)=20, E=10*20*20/1600=2.5: log2(4)*10 = 20
    CHECK(t.value("v", "r", "f") == doctest::Approx(20.0).epsilon(1e-12));
    CHECK(t.weighted() == Weighting::plmi);
    CHECK(t.total() == 40.0);
    CHECK(t.verb_marginal(*t.verb_id("v")) == 10.0);
}

TEST_CASE("weighting twice is refused") {
    auto raw = build({{"w", "c", 4}, {"w2", "c2", 12}});
    auto weighted = ppmi(raw);
    CHECK_THROWS_AS(ppmi(weighted), data_error);
    CHECK_THROWS_AS(plmi_matrix(weighted), data_error);

    TensorBuilder b;
    b.add("v", "r", "f", 2);
    b.add("v2", "r2", "f2", 3);
    auto t = plmi_tensor(b.finish());
    CHECK_THROWS_AS(plmi_tensor(std::move(t)), data_error);
}

TEST_CASE("weighting an empty store is refused") {
    CHECK_THROWS_AS(ppmi(MatrixBuilder().finish()), data_error);
    CHECK_THROWS_AS(plmi_matrix(MatrixBuilder().finish()), data_error);
    CHECK_THROWS_AS(plmi_tensor(TensorBuilder().finish()), data_error);
}

TEST_CASE("ppmi and plmi match the brute-force oracle") {
    testutil::Rng rng(201);
    for (int round = 0; round < 200; ++round) {
        auto pairs = random_pairs(rng);
        auto expect_ppmi = oracle::ppmi(to_oracle(pairs));
        auto expect_plmi = oracle::plmi(to_oracle(pairs));

        auto mp = ppmi(build(pairs));
        auto ml = plmi_matrix(build(pairs));
        std::size_t seen_p = 0, seen_l = 0;
        for (std::uint32_t t = 0; t < mp.n_targets(); ++t) {
            for (const auto& cell : mp.row_cells(t)) {
                auto it = expect_ppmi.find({mp.target_name(t), mp.context_name(cell.col)});
                REQUIRE(it != expect_ppmi.end());
                CHECK(cell.value == doctest::Approx(it->second).epsilon(1e-12));
                ++seen_p;
            }
        }
        for (std::uint32_t t = 0; t < ml.n_targets(); ++t) {
            for (const auto& cell : ml.row_cells(t)) {
                auto it = expect_plmi.find({ml.target_name(t), ml.context_name(cell.col)});
                REQUIRE(it != expect_plmi.end());
                CHECK(cell.value == doctest::Approx(it->second).epsilon(1e-12));
                ++seen_l;
            }
        }
        CHECK(seen_p == expect_ppmi.size());
        CHECK(seen_l == expect_plmi.size());
    }
}

TEST_CASE("plmi tensor matches the brute-force oracle") {
    testutil::Rng rng(202);
    for (int round = 0; round < 200; ++round) {
        TensorBuilder b;
        oracle::Triples counts;
        int n = rng.uniform(1, 25);
        for (int i = 0; i < n; ++i) {
            std::string v = "v" + std::to_string(rng.uniform(0, 4));
            std::string r = "r" + std::to_string(rng.uniform(0, 2));
            std::string f = "f" + std::to_string(rng.uniform(0, 5));
            auto c = static_cast<std::uint64_t>(rng.uniform(1, 30));
            b.add(v, r, f, c);
            counts[{v, r, f}] += static_cast<double>(c);
        }
        auto expect = oracle::plmi_tensor(counts);
        auto t = plmi_tensor(b.finish());
        std::size_t seen = 0;
        for (std::uint32_t v = 0; v < t.n_verbs(); ++v) {
            for (const auto& e : t.verb_entries(v)) {
                auto it = expect.find(
                    {t.verb_name(v), t.relation_name(e.relation), t.filler_name(e.filler)});
                REQUIRE(it != expect.end());
                CHECK(e.value == doctest::Approx(it->second).epsilon(1e-12));
                ++seen;
            }
        }
        CHECK(seen == expect.size());
    }
}

TEST_CASE("ppmi is invariant under uniform count scaling") {
    testutil::Rng rng(203);
    for (int round = 0; round < 50; ++round) {
        auto pairs = random_pairs(rng);
        auto scaled = pairs;
        for (auto& [t, c, n] : scaled) n *= 2;
        auto a = ppmi(build(pairs));
        auto b = ppmi(build(scaled));
        REQUIRE(a.n_targets() == b.n_targets());
        for (std::uint32_t t = 0; t < a.n_targets(); ++t) {
            const auto& ra = a.row_cells(t);
            const auto& rb = b.row_cells(t);
            REQUIRE(ra.size() == rb.size());
            for (std::size_t i = 0; i < ra.size(); ++i) {
                CHECK(ra[i].col == rb[i].col);
                CHECK(ra[i].value == doctest::Approx(rb[i].value).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("weighted supports are positive subsets of the raw support") {
    testutil::Rng rng(204);
    for (int round = 0; round < 50; ++round) {
        auto pairs = random_pairs(rng);
        auto raw = build(pairs);
        WeightStats stats;
        auto w = ppmi(build(pairs), &stats);
        CHECK(stats.cells_before == raw.n_cells());
        CHECK(stats.cells_after == w.n_cells());
        CHECK(stats.cells_before == stats.cells_after + stats.dropped_nonpositive +
                                        stats.dropped_zero_expected);
        for (std::uint32_t t = 0; t < w.n_targets(); ++t) {
            for (const auto& cell : w.row_cells(t)) {
                CHECK(cell.value > 0.0);
                CHECK(raw.value(w.target_name(t), w.context_name(cell.col)) > 0.0);
            }
        }
    }
}
