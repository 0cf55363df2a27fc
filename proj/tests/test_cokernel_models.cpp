#include <catch2/catch_amalgamated.hpp>

#include "sandlab/cokernel_models.hpp"
#include "sandlab/experiments.hpp"

using namespace sandlab;

TEST_CASE("sample_matrix shapes and constraints") {
    // SymmetricEvenDiag with k=1: even residues mod 2 are {0}, so n=1 gives the zero matrix
    auto model1 = MatrixModel::symmetric_even_diag(1, 1);
    for (std::uint64_t s = 0; s < 20; ++s) {
        auto m = sample_matrix(model1, Seed{s});
        CHECK(m.at(0, 0) == 0);
    }
    // symmetric model: equal to its transpose on every draw
    auto sym = MatrixModel::symmetric(3, 5, 7);
    for (std::uint64_t s = 0; s < 10; ++s) {
        auto m = sample_matrix(sym, Seed{s});
        for (std::size_t i = 0; i < 7; ++i)
            for (std::size_t j = 0; j < 7; ++j) CHECK(m.at(i, j) == m.at(j, i));
    }
    // even diagonal at larger k
    auto sed = MatrixModel::symmetric_even_diag(8, 6);
    for (std::uint64_t s = 0; s < 10; ++s) {
        auto m = sample_matrix(sed, Seed{s});
        for (std::size_t i = 0; i < 6; ++i) CHECK(m.at(i, i) % 2 == 0);
    }
}

TEST_CASE("P(invertible mod 3) for 2x2 uniform matrices is |GL_2(F_3)|/81") {
    auto model = MatrixModel::uniform_square(3, 1, 2);
    int invertible = 0;
    const int trials = 10000;
    for (int s = 0; s < trials; ++s) {
        auto m = sample_matrix(model, Seed{static_cast<std::uint64_t>(s), 3});
        BigIntMatrix b(2, 2);
        for (std::size_t i = 0; i < 2; ++i)
            for (std::size_t j = 0; j < 2; ++j) b(i, j) = static_cast<unsigned long>(m.at(i, j));
        if (rank_mod_p(b, 3) == 2) ++invertible;
    }
    double freq = static_cast<double>(invertible) / trials;
    CHECK(freq > 48.0 / 81 - 0.02);
    CHECK(freq < 48.0 / 81 + 0.02);
}

TEST_CASE("cokernel_sylow spec examples") {
    auto model = MatrixModel::uniform_square(2, 6, 3);
    // zero matrix: all exponents capped
    ModMatrix zero(u64_pow(2, 6), 3, 3);
    bool truncated = false;
    auto t = cokernel_sylow(model, zero, 4, &truncated);
    CHECK(t.lambda == Partition({4, 4, 4}));
    CHECK(truncated);
    // identity: trivial cokernel
    ModMatrix id(u64_pow(2, 6), 3, 3);
    for (std::size_t i = 0; i < 3; ++i) id.at(i, i) = 1;
    truncated = false;
    CHECK(cokernel_sylow(model, id, 4, &truncated).trivial());
    CHECK_FALSE(truncated);
}

TEST_CASE("symmetric-even-diag samples with odd n have odd corank mod 2") {
    auto model = MatrixModel::symmetric_even_diag(6, 9);
    for (std::uint64_t s = 0; s < 100; ++s) {
        auto m = sample_matrix(model, Seed{s, 7});
        BigIntMatrix b(9, 9);
        for (std::size_t i = 0; i < 9; ++i)
            for (std::size_t j = 0; j < 9; ++j) b(i, j) = static_cast<unsigned long>(m.at(i, j));
        std::size_t corank = 9 - rank_mod_p(b, 2);
        CHECK(corank % 2 == 1);
    }
}

TEST_CASE("symmetric cokernel type is invariant under simultaneous row/col permutation") {
    auto model = MatrixModel::symmetric(2, 8, 6);
    Xoshiro256 rng(Seed{31337});
    for (std::uint64_t s = 0; s < 20; ++s) {
        auto m = sample_matrix(model, Seed{s, 11});
        auto perm = random_permutation(6, rng);
        ModMatrix permuted(m.modulus, 6, 6);
        for (std::size_t i = 0; i < 6; ++i)
            for (std::size_t j = 0; j < 6; ++j) permuted.at(i, j) = m.at(perm[i], perm[j]);
        CHECK(cokernel_sylow(model, m, 4) == cokernel_sylow(model, permuted, 4));
    }
}

TEST_CASE("model_reference_law mapping") {
    CHECK(model_reference_law(MatrixModel::uniform_square(2, 10, 4)) == LawKind::DirectedRegular);
    CHECK(model_reference_law(MatrixModel::symmetric(2, 10, 4)) == LawKind::UndirectedOddD);
    CHECK(model_reference_law(MatrixModel::symmetric_even_diag(10, 4)) == LawKind::UndirectedEvenD);
}

TEST_CASE("empirical cokernel distributions drift toward the reference law") {
    // d_inf over a top table shrinks as n grows through 20, 40; quick version
    // of the convergence check (the acceptance suite pins the large-n values)
    auto model20 = MatrixModel::uniform_square(2, 12, 20);
    auto model40 = MatrixModel::uniform_square(2, 12, 40);
    auto r20 = cokernel_experiment(model20, 800, 555);
    auto r40 = cokernel_experiment(model40, 800, 555);
    auto c20 = compare_types_to_law(r20.types, 2, LawKind::DirectedRegular, 6, 4, 8);
    auto c40 = compare_types_to_law(r40.types, 2, LawKind::DirectedRegular, 6, 4, 8);
    CHECK(c40.d_inf < c20.d_inf + 0.05);  // allow MC noise; the trend check is loose
    CHECK(c40.d_inf < 0.08);
}
