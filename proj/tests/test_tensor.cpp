#include <catch2/catch_amalgamated.hpp>

#include "sandlab/tensor.hpp"

using namespace sandlab;

TEST_CASE("tensor square orders") {
    TensorSquare t2(AbelianGroupType::parse("Z/2"));
    CHECK(t2.order() == 2);
    TensorSquare t22(AbelianGroupType::parse("Z/2+Z/2"));
    CHECK(t22.order() == 16);
    TensorSquare t42(AbelianGroupType::parse("Z/4+Z/2"));
    CHECK(t42.order() == 4 * 2 * 2 * 2);
}

TEST_CASE("exterior square orders (spec examples + enumeration oracle)") {
    CHECK(exterior_square_order(AbelianGroupType::parse("Z/2")) == 1);
    CHECK(exterior_square_order(AbelianGroupType::parse("Z/2+Z/2")) == 2);
    CHECK(exterior_square_order(AbelianGroupType::parse("Z/4+Z/2")) == 2);

    // |wedge^2 V| = |V(x)V| / |I| with I enumerated from its generators
    for (const char* name : {"Z/2", "Z/4", "Z/2+Z/2", "Z/4+Z/2", "Z/2+Z/2+Z/2", "Z/4+Z/4", "Z/3+Z/3",
                             "Z/8+Z/2", "Z/6+Z/6"}) {
        AbelianGroupType v = AbelianGroupType::parse(name);
        TensorSquare ts(v);
        mpz_class i_order = tensor_span_order(ts, ts.i_generators());
        CAPTURE(name);
        CHECK(exterior_square_order(v) == ts.order() / i_order);
    }
}

TEST_CASE("I2 has index 2^rank2 in I (enumeration, |V| <= 64)") {
    for (const char* name : {"Z/2", "Z/3", "Z/4", "Z/2+Z/2", "Z/4+Z/2", "Z/2+Z/2+Z/2", "Z/4+Z/4",
                             "Z/9", "Z/3+Z/3", "Z/6", "Z/6+Z/6", "Z/8+Z/8", "Z/5+Z/5"}) {
        AbelianGroupType v = AbelianGroupType::parse(name);
        TensorSquare ts(v);
        mpz_class i_order = tensor_span_order(ts, ts.i_generators());
        mpz_class i2_order = tensor_span_order(ts, ts.i2_generators());
        CAPTURE(name);
        CHECK(i_order == i2_order * mpz_pow_u64(2, static_cast<unsigned long>(rank2(v))));
    }
}

TEST_CASE("tensor_pair_sum spec examples") {
    AbelianGroupType z2 = AbelianGroupType::parse("Z/2");
    TensorSquare ts(z2);
    GroupSpace space(z2);
    CHECK(tensor_pair_sum(ts, {}, {}).is_zero());

    std::vector<GroupElement> q{space.reduce({1}), space.reduce({1})};
    std::vector<GroupElement> r{space.reduce({1}), space.reduce({0})};
    auto x = tensor_pair_sum(ts, q, r);
    CHECK(x.coords == std::vector<std::int64_t>{1});

    CHECK_THROWS_AS(tensor_pair_sum(ts, q, {space.reduce({1})}), std::invalid_argument);
}

TEST_CASE("tensor_pair_sum equals elementwise elementary-tensor sum") {
    AbelianGroupType v = AbelianGroupType::parse("Z/4+Z/2");
    TensorSquare ts(v);
    GroupSpace space(v);
    // deterministic pseudo-random vectors of length 5
    std::vector<GroupElement> q, r;
    for (int n = 0; n < 5; ++n) {
        q.push_back(space.element_at((n * 5 + 3) % space.order()));
        r.push_back(space.element_at((n * 3 + 1) % space.order()));
    }
    TensorElement acc = ts.zero();
    for (std::size_t n = 0; n < q.size(); ++n) acc = ts.add(acc, ts.pure_tensor(q[n], r[n]));
    CHECK(tensor_pair_sum(ts, q, r) == acc);
}

TEST_CASE("in_i2 spec examples") {
    AbelianGroupType z2 = AbelianGroupType::parse("Z/2");
    TensorSquare ts(z2);
    GroupSpace space(z2);
    GroupElement e = space.reduce({1});

    CHECK(in_i2(ts, ts.zero()));
    CHECK_FALSE(in_i2(ts, ts.pure_tensor(e, e)));

    // a(x)b + b(x)a is a generator, for every a, b in a few groups
    for (const char* name : {"Z/2", "Z/4", "Z/2+Z/2", "Z/4+Z/2", "Z/6"}) {
        AbelianGroupType v = AbelianGroupType::parse(name);
        TensorSquare tsv(v);
        GroupSpace sp(v);
        for (const auto& a : sp.all_elements())
            for (const auto& b : sp.all_elements()) {
                auto x = tsv.add(tsv.pure_tensor(a, b), tsv.pure_tensor(b, a));
                CAPTURE(name);
                CHECK(in_i2(tsv, x));
            }
    }
}

TEST_CASE("in_i2 agrees with closure enumeration on small groups") {
    for (const char* name : {"Z/2", "Z/4", "Z/2+Z/2", "Z/4+Z/2", "Z/3+Z/3"}) {
        AbelianGroupType v = AbelianGroupType::parse(name);
        TensorSquare ts(v);
        // enumerate I2 by closure
        std::set<TensorElement> members;
        {
            std::vector<TensorElement> frontier{ts.zero()};
            members.insert(ts.zero());
            while (!frontier.empty()) {
                std::vector<TensorElement> next;
                for (const auto& x : frontier)
                    for (const auto& g : ts.i2_generators()) {
                        auto y = ts.add(x, g);
                        if (members.insert(y).second) next.push_back(y);
                    }
                frontier = std::move(next);
            }
        }
        // walk the whole tensor space
        std::vector<std::int64_t> coords(ts.side() * ts.side(), 0);
        for (;;) {
            TensorElement x{coords};
            CAPTURE(name);
            CHECK(in_i2(ts, x) == (members.count(x) > 0));
            std::size_t pos = 0;
            while (pos < coords.size() && ++coords[pos] == ts.component_moduli()[pos]) coords[pos++] = 0;
            if (pos == coords.size()) break;
        }
    }
}
