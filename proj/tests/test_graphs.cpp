#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"
#include "sandlab/graphs.hpp"

using namespace sandlab;

TEST_CASE("directed regular sampler invariants") {
    // n=1: single vertex with a loop of multiplicity d
    auto g1 = sample_directed_regular(1, 3, Seed{1});
    CHECK(g1.mult(0, 0) == 3);

    for (std::uint64_t s = 0; s < 20; ++s) {
        auto g = sample_directed_regular(9, 4, Seed{s});
        for (std::size_t i = 0; i < g.n; ++i) {
            CHECK(g.out_degree(i) == 4);
            CHECK(g.in_degree(i) == 4);
        }
    }
}

TEST_CASE("n=2 d=1 loop-graph frequency is about 1/2") {
    int loops = 0;
    const int trials = 10000;
    for (int s = 0; s < trials; ++s) {
        auto g = sample_directed_regular(2, 1, Seed{static_cast<std::uint64_t>(s), 17});
        if (g.mult(0, 0) == 1) ++loops;
    }
    double freq = static_cast<double>(loops) / trials;
    CHECK(freq > 0.48);
    CHECK(freq < 0.52);
}

TEST_CASE("matching sampler invariants") {
    auto g2 = sample_undirected_matching(2, 3, Seed{1});
    CHECK(g2.mult(0, 1) == 3);
    CHECK_THROWS_AS(sample_undirected_matching(5, 3, Seed{1}), std::invalid_argument);

    for (std::uint64_t s = 0; s < 20; ++s) {
        auto g = sample_undirected_matching(10, 3, Seed{s});
        for (std::size_t i = 0; i < g.n; ++i) {
            CHECK(g.degree(i) == 3);
            CHECK(g.mult(i, i) == 0);
            for (std::size_t j = 0; j < g.n; ++j) CHECK(g.mult(i, j) == g.mult(j, i));
        }
    }
}

TEST_CASE("n=4 d=1: the three perfect matchings are uniform") {
    std::map<std::vector<std::uint32_t>, int> counts;
    const int trials = 10000;
    for (int s = 0; s < trials; ++s) {
        auto g = sample_undirected_matching(4, 1, Seed{static_cast<std::uint64_t>(s), 5});
        counts[g.multiplicity] += 1;
    }
    REQUIRE(counts.size() == 3);
    for (const auto& [key, c] : counts) {
        double freq = static_cast<double>(c) / trials;
        CHECK(freq > 1.0 / 3 - 0.02);
        CHECK(freq < 1.0 / 3 + 0.02);
    }
}

TEST_CASE("directed ER sampler") {
    CHECK(component_count(sample_directed_er(4, 0.0, Seed{3})) == 4);
    auto full = sample_directed_er(4, 1.0, Seed{3});
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) CHECK(full.mult(i, j) == (i == j ? 0u : 1u));

    // n=3, rho=1/2: mean edge count 3 over Binomial(6, 1/2)
    long total = 0;
    const int trials = 10000;
    for (int s = 0; s < trials; ++s) {
        auto g = sample_directed_er(3, 0.5, Seed{static_cast<std::uint64_t>(s), 11});
        for (auto m : g.multiplicity) total += m;
    }
    double mean = static_cast<double>(total) / trials;
    CHECK(mean > 2.95);
    CHECK(mean < 3.05);
}

TEST_CASE("determinism: identical seeds give identical graphs") {
    auto a = sample_directed_regular(20, 3, Seed{42, 7});
    auto b = sample_directed_regular(20, 3, Seed{42, 7});
    CHECK(a.multiplicity == b.multiplicity);
    auto c = sample_undirected_matching(20, 4, Seed{42, 7});
    auto d = sample_undirected_matching(20, 4, Seed{42, 7});
    CHECK(c.multiplicity == d.multiplicity);
    auto e = sample_directed_regular(20, 3, Seed{42, 8});
    CHECK(a.multiplicity != e.multiplicity);
}

TEST_CASE("laplacian rows sum to zero; regular samples satisfy Delta = A - dI") {
    auto g = sample_directed_regular(8, 3, Seed{5});
    auto lap = laplacian(g);
    for (std::size_t i = 0; i < 8; ++i) {
        mpz_class row = 0;
        for (std::size_t j = 0; j < 8; ++j) row += lap(i, j);
        CHECK(row == 0);
    }
    auto adj = adjacency(g);
    for (std::size_t i = 0; i < 8; ++i)
        for (std::size_t j = 0; j < 8; ++j)
            CHECK(lap(i, j) == adj(i, j) - (i == j ? 3 : 0));
}

TEST_CASE("K4 reduced laplacian in the stored sign convention") {
    UndirectedMultigraph k4(4);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = i + 1; j < 4; ++j) k4.add_edge(i, j);
    auto red = reduced_laplacian(k4);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) CHECK(red(i, j) == (i == j ? -3 : 1));
}

TEST_CASE("connectivity predicates") {
    UndirectedMultigraph edge(2);
    edge.add_edge(0, 1);
    CHECK(is_connected(edge));

    UndirectedMultigraph two_triangles(6);
    for (auto [a, b] : std::vector<std::pair<int, int>>{{0, 1}, {1, 2}, {2, 0}, {3, 4}, {4, 5}, {5, 3}})
        two_triangles.add_edge(static_cast<std::size_t>(a), static_cast<std::size_t>(b));
    CHECK_FALSE(is_connected(two_triangles));
    CHECK(component_count(two_triangles) == 2);

    DirectedMultigraph cycle(3);
    cycle.mult(0, 1) = 1;
    cycle.mult(1, 2) = 1;
    cycle.mult(2, 0) = 1;
    CHECK(is_strongly_connected(cycle));
    cycle.mult(2, 0) = 0;
    CHECK_FALSE(is_strongly_connected(cycle));
    CHECK(is_connected(cycle));
}

TEST_CASE("matching model d=3 n=100 is connected in > 95% of samples") {
    int connected = 0;
    const int trials = 1000;
    for (int s = 0; s < trials; ++s)
        if (is_connected(sample_undirected_matching(100, 3, Seed{static_cast<std::uint64_t>(s), 23})))
            ++connected;
    CHECK(connected > 950);
}

TEST_CASE("matrix-tree consistency on every small sample") {
    // directed: |det(reduced laplacian)| = #arborescences toward vertex n-1
    for (std::uint64_t s = 0; s < 15; ++s) {
        auto g = sample_directed_regular(5, 2, Seed{s, 31});
        mpz_class det = abs(determinant(reduced_laplacian(g)));
        CHECK(det == oracles::count_arborescences(g, g.n - 1));
    }
    // undirected: spanning trees
    for (std::uint64_t s = 0; s < 10; ++s) {
        auto g = sample_undirected_matching(6, 3, Seed{s, 37});
        mpz_class det = abs(determinant(reduced_laplacian(g)));
        CHECK(det == oracles::count_spanning_trees(g));
    }
}
