#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"
#include "sandlab/abelian.hpp"

using namespace sandlab;

namespace {

AbelianGroupType p_group(std::uint64_t p, std::vector<int> lambda) {
    return AbelianGroupType::from_sylow(PGroupType(p, Partition(std::move(lambda))));
}

/// Every abelian group of order <= bound, as (p-group per prime) tuples.
std::vector<AbelianGroupType> groups_up_to(long bound) {
    std::vector<AbelianGroupType> out;
    std::function<void(long, long, std::vector<PGroupType>)> rec =
        [&](long order, std::uint64_t min_p, std::vector<PGroupType> parts) {
            out.push_back(AbelianGroupType::from_sylow_list(parts));
            for (std::uint64_t p = min_p; static_cast<long>(p) <= bound / order; ++p) {
                bool prime = p >= 2;
                for (std::uint64_t q = 2; q * q <= p && prime; ++q)
                    if (p % q == 0) prime = false;
                if (!prime) continue;
                long pe = static_cast<long>(p);
                for (int e = 1; pe <= bound / order; ++e, pe *= static_cast<long>(p)) {
                    for (const auto& lambda : partitions_up_to(e, e)) {
                        if (lambda.sum() != e) continue;
                        auto bigger = parts;
                        bigger.emplace_back(p, lambda);
                        rec(order * pe, p + 1, bigger);
                    }
                }
            }
        };
    rec(1, 2, {});
    return out;
}

}  // namespace

TEST_CASE("invariant factor chain round trips through sylow decomposition") {
    AbelianGroupType g = AbelianGroupType::from_cyclic_orders({mpz_class(4), mpz_class(6)});
    CHECK(g.to_string() == "Z/2 + Z/12");
    std::vector<PGroupType> sylows;
    for (auto p : g.primes()) sylows.push_back(g.sylow(p));
    CHECK(AbelianGroupType::from_sylow_list(sylows) == g);

    AbelianGroupType h = AbelianGroupType::parse("Z/2 + Z/4 + Z^2");
    CHECK(h.free_rank() == 2);
    CHECK(h.invariant_factors().size() == 2);
    CHECK(AbelianGroupType::parse("Z4+Z2") == AbelianGroupType::parse("Z/2 + Z/4"));
    CHECK(AbelianGroupType::parse("0") == AbelianGroupType::trivial());
}

TEST_CASE("hom_count_p spec examples") {
    CHECK(hom_count_p(Partition({1}), Partition({1}), 3) == 3);
    CHECK(hom_count_p(Partition({}), Partition({5}), 2) == 1);
    CHECK(hom_count_p(Partition({2, 1}), Partition({1, 1}), 2) == 16);
}

TEST_CASE("hom_count_p equals brute-force enumeration for p in {2,3}, |G| <= 64") {
    for (std::uint64_t p : {2ULL, 3ULL}) {
        int max_e = p == 2 ? 6 : 3;
        for (const auto& mu : partitions_up_to(max_e, max_e)) {
            for (const auto& lambda : partitions_up_to(max_e, max_e)) {
                AbelianGroupType g = p_group(p, mu.parts());
                AbelianGroupType v = p_group(p, lambda.parts());
                long expected;
                try {
                    expected = oracles::count_homs(g, v);
                } catch (const budget_error&) {
                    continue;
                }
                CAPTURE(p, mu.to_string(), lambda.to_string());
                CHECK(hom_count_p(mu, lambda, p) == expected);
            }
        }
    }
}

TEST_CASE("aut_order spec examples") {
    CHECK(aut_order(PGroupType(2, Partition({1}))) == 1);
    CHECK(aut_order(PGroupType(2, Partition({1, 1}))) == 6);
    CHECK(aut_order(PGroupType(2, Partition({2}))) == 2);
}

TEST_CASE("aut_order matches brute force and the lattice route for |G| <= 64") {
    for (const auto& g : groups_up_to(64)) {
        if (g.is_trivial()) {
            CHECK(aut_order(g) == 1);
            continue;
        }
        CAPTURE(g.to_string());
        // direct enumeration wherever it is affordable
        try {
            long expected = oracles::count_automorphisms(g, 1000000);
            CHECK(aut_order(g) == expected);
        } catch (const budget_error&) {
            // covered below by the independent lattice route
        }
        // |Aut(G)| = |Sur(G, G)| via subgroup-lattice Moebius inversion,
        // a path disjoint from the closed formula
        CHECK(aut_order(g) == sur_count(g, g));
    }
    // elementary abelian sanity at the enumeration-infeasible top:
    // |GL_6(F_2)| = prod (2^6 - 2^i)
    mpz_class gl6(1);
    for (int i = 0; i < 6; ++i) gl6 *= (64 - (1 << i));
    CHECK(aut_order(PGroupType(2, Partition({1, 1, 1, 1, 1, 1}))) == gl6);
}

TEST_CASE("sur_count spec examples") {
    CHECK(sur_count(AbelianGroupType::parse("Z/4+Z/2"), AbelianGroupType::parse("Z/2+Z/2")) == 6);
    CHECK(sur_count(AbelianGroupType::trivial(), AbelianGroupType::trivial()) == 1);
    CHECK(sur_count(AbelianGroupType::parse("Z/2"), AbelianGroupType::parse("Z/2+Z/2")) == 0);
}

TEST_CASE("sur_count equals brute force and is dominated by hom_count") {
    auto groups = groups_up_to(36);
    for (const auto& g : groups) {
        for (const auto& v : groups) {
            CAPTURE(g.to_string(), v.to_string());
            mpz_class sur = sur_count(g, v);
            CHECK(sur >= 0);
            CHECK(sur <= hom_count(g, v));
            try {
                long expected = oracles::count_surjections(g, v, 30000);
                CHECK(sur == expected);
            } catch (const budget_error&) {
            }
        }
    }
}

TEST_CASE("hom equals the subgroup sum of sur (order <= 64 closure)") {
    // |Hom(G, V)| = sum over subgroups W <= V of |Sur(G, W)|; ties the
    // Moebius path to the closed formula on the full order-64 range.
    for (const auto& v : {AbelianGroupType::parse("Z/8+Z/8"),
                          AbelianGroupType::parse("Z/2+Z/2+Z/4+Z/4"),
                          AbelianGroupType::parse("Z/64"),
                          AbelianGroupType::parse("Z/2+Z/2+Z/2+Z/2+Z/2+Z/2"),
                          AbelianGroupType::parse("Z/3+Z/9"),
                          AbelianGroupType::parse("Z/36")}) {
        SubgroupLattice lattice(v);
        for (const auto& g : {AbelianGroupType::parse("Z/4+Z/2"),
                              AbelianGroupType::parse("Z/8"),
                              AbelianGroupType::parse("Z/2+Z/2+Z/2"),
                              AbelianGroupType::parse("Z/12+Z/12")}) {
            mpz_class total = 0;
            for (const auto& w : lattice.subgroups) total += sur_count(g, w.type);
            CAPTURE(g.to_string(), v.to_string());
            CHECK(total == hom_count(g, v));
        }
    }
}

TEST_CASE("enumerate_subgroups spec examples") {
    CHECK(enumerate_subgroups(AbelianGroupType::parse("Z/2+Z/2")).size() == 5);
    CHECK(enumerate_subgroups(AbelianGroupType::parse("Z/5")).size() == 2);
    CHECK(enumerate_subgroups(AbelianGroupType::parse("Z/4")).size() == 3);
}

TEST_CASE("subgroup enumeration is complete and duplicate free") {
    // closure count check: sum over subgroups of 1 equals known counts
    // (Z/p^2)^2 has p^2+3p+4 + ... ; spot known values instead:
    CHECK(enumerate_subgroups(AbelianGroupType::parse("Z/4+Z/2")).size() == 8);
    CHECK(enumerate_subgroups(AbelianGroupType::parse("Z/2+Z/2+Z/2")).size() == 16);
    CHECK(enumerate_subgroups(AbelianGroupType::parse("Z/6")).size() == 4);
    // order of every subgroup divides the group order; element sets nest Lagrange-style
    auto subs = enumerate_subgroups(AbelianGroupType::parse("Z/12"));
    CHECK(subs.size() == 6);
    for (const auto& w : subs) CHECK(12 % w.elements.size() == 0);
}

TEST_CASE("group element arithmetic basics") {
    // invariant-factor chain ordering: moduli are (2, 4)
    GroupSpace space(AbelianGroupType::parse("Z/4+Z/2"));
    REQUIRE(space.moduli() == std::vector<std::int64_t>{2, 4});
    auto a = space.reduce({1, 3});
    auto b = space.reduce({1, 2});
    CHECK(space.add(a, b) == space.reduce({0, 1}));
    CHECK(space.sub(space.zero(), a) == space.reduce({1, 1}));
    CHECK(space.order_of(a) == 4);
    CHECK(space.index_of(space.element_at(5)) == 5);
    CHECK(space.all_elements().size() == 8);
}

TEST_CASE("serialization format") {
    CHECK(AbelianGroupType::trivial().to_string() == "0");
    CHECK(AbelianGroupType(std::vector<mpz_class>{2, 6}, 1).to_string() == "Z/2 + Z/6 + Z");
    CHECK(AbelianGroupType({}, 2).to_string() == "Z^2");
}
