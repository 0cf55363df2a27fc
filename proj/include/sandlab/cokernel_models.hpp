#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "sandlab/bigmat.hpp"
#include "sandlab/laws.hpp"
#include "sandlab/rng.hpp"
#include "sandlab/snf.hpp"

namespace sandlab {

/// Random matrix models over Z/p^k mirroring Haar measure on p-adic
/// matrices: plain square, symmetric, and symmetric with even diagonal
/// (the p = 2 model behind the even-d law).  k is the sampling modulus
/// exponent; experiments pick k = cap + 4 so divisors below the reporting
/// cap are faithful to the p-adic sample.
struct MatrixModel {
    enum class Kind { UniformSquare, Symmetric, SymmetricEvenDiag };

    Kind kind = Kind::UniformSquare;
    std::uint64_t p = 2;
    unsigned k = 14;
    std::size_t n = 0;

    static MatrixModel uniform_square(std::uint64_t p, unsigned k, std::size_t n) {
        return MatrixModel{Kind::UniformSquare, p, k, n};
    }
    static MatrixModel symmetric(std::uint64_t p, unsigned k, std::size_t n) {
        return MatrixModel{Kind::Symmetric, p, k, n};
    }
    static MatrixModel symmetric_even_diag(unsigned k, std::size_t n) {
        return MatrixModel{Kind::SymmetricEvenDiag, 2, k, n};
    }
};

inline MatrixModel::Kind matrix_model_kind_from_name(const std::string& s) {
    if (s == "square") return MatrixModel::Kind::UniformSquare;
    if (s == "symmetric") return MatrixModel::Kind::Symmetric;
    if (s == "symmetric-even") return MatrixModel::Kind::SymmetricEvenDiag;
    throw std::invalid_argument("unknown matrix model: " + s);
}

/// Entrywise-uniform sample mod p^k subject to the model's symmetry and
/// diagonal-parity constraints.
inline ModMatrix sample_matrix(const MatrixModel& model, Seed seed) {
    if (model.k < 1) throw std::invalid_argument("sample_matrix: k >= 1");
    long double bits = model.k * std::log2(static_cast<long double>(model.p));
    if (bits > 62) throw std::invalid_argument("sample_matrix: p^k exceeds 62 bits");
    const std::uint64_t pk = u64_pow(model.p, model.k);
    ModMatrix m(pk, model.n, model.n);
    Xoshiro256 rng(Seed(seed.value, mix_seed(seed.stream + 1, 0x6d61747269ULL)));
    switch (model.kind) {
        case MatrixModel::Kind::UniformSquare:
            for (auto& e : m.entries) e = rng.below(pk);
            break;
        case MatrixModel::Kind::Symmetric:
            for (std::size_t i = 0; i < model.n; ++i)
                for (std::size_t j = i; j < model.n; ++j) {
                    std::uint64_t v = rng.below(pk);
                    m.at(i, j) = v;
                    m.at(j, i) = v;
                }
            break;
        case MatrixModel::Kind::SymmetricEvenDiag:
            for (std::size_t i = 0; i < model.n; ++i)
                for (std::size_t j = i; j < model.n; ++j) {
                    std::uint64_t v = i == j ? (pk == 2 ? 0 : 2 * rng.below(pk / 2)) : rng.below(pk);
                    m.at(i, j) = v;
                    m.at(j, i) = v;
                }
            break;
    }
    return m;
}

/// p-Sylow type of the cokernel, truncated at exponent p^cap (cap <= k).
inline PGroupType cokernel_sylow(const MatrixModel& model, const ModMatrix& sample, unsigned cap,
                                 bool* truncated = nullptr) {
    if (cap > model.k) throw std::invalid_argument("cokernel_sylow: cap exceeds the sampling modulus");
    BigIntMatrix m(sample.rows, sample.cols);
    for (std::size_t i = 0; i < sample.rows; ++i)
        for (std::size_t j = 0; j < sample.cols; ++j)
            m(i, j) = static_cast<unsigned long>(sample.at(i, j));
    auto exps = snf_mod_pk(m, model.p, cap);
    return pgroup_from_exponents(model.p, exps, cap, truncated);
}

/// The limiting law the model's cokernels converge to.  The even-diagonal
/// model matches its law along odd n.
inline LawKind model_reference_law(const MatrixModel& model) {
    switch (model.kind) {
        case MatrixModel::Kind::UniformSquare: return LawKind::DirectedRegular;
        case MatrixModel::Kind::Symmetric: return LawKind::UndirectedOddD;
        case MatrixModel::Kind::SymmetricEvenDiag: return LawKind::UndirectedEvenD;
    }
    throw std::logic_error("unreachable");
}

}  // namespace sandlab
