#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include <gmpxx.h>

#include "sandlab/abelian.hpp"
#include "sandlab/bigmat.hpp"

namespace sandlab {

/// Elementary divisors of an integer matrix.  invariant_factors holds the
/// positive diagonal d_1 | d_2 | ... | d_r including any leading 1s;
/// free_corank = cols - rank is the free rank of the cokernel.
struct SNFResult {
    std::vector<mpz_class> invariant_factors;
    std::size_t rank = 0;
    std::size_t free_corank = 0;
};

/// Full Smith decomposition D = A * M * B when transforms are requested.
struct SNFDecomposition {
    SNFResult result;
    BigIntMatrix diagonal;
    std::optional<BigIntMatrix> row_transform;  // A, unimodular
    std::optional<BigIntMatrix> col_transform;  // B, unimodular
};

namespace detail {

inline bool snf_is_isolated(const BigIntMatrix& m, std::size_t s) {
    for (std::size_t i = s + 1; i < m.rows(); ++i)
        if (m(i, s) != 0) return false;
    for (std::size_t j = s + 1; j < m.cols(); ++j)
        if (m(s, j) != 0) return false;
    return true;
}

inline bool snf_find_min_pivot(const BigIntMatrix& m, std::size_t s,
                               std::size_t& pi, std::size_t& pj) {
    bool found = false;
    mpz_class best;
    for (std::size_t i = s; i < m.rows(); ++i)
        for (std::size_t j = s; j < m.cols(); ++j) {
            if (m(i, j) == 0) continue;
            mpz_class v = abs(m(i, j));
            if (!found || v < best) {
                found = true;
                best = v;
                pi = i;
                pj = j;
            }
        }
    return found;
}

}  // namespace detail

/// Smith normal form over Z by fraction-free elimination: the pivot is the
/// minimal-absolute-value entry of the working submatrix, rows/columns are
/// reduced by quotients, and divisibility of the trailing block is restored
/// by folding an offending row back in.
inline SNFDecomposition smith_normal_form_full(const BigIntMatrix& input, bool want_transforms) {
    BigIntMatrix m = input;
    const std::size_t nmin = std::min(m.rows(), m.cols());
    std::optional<BigIntMatrix> a, b;
    if (want_transforms) {
        a = BigIntMatrix::identity(m.rows());
        b = BigIntMatrix::identity(m.cols());
    }

    for (std::size_t s = 0; s < nmin; ++s) {
        for (;;) {
            std::size_t pi = s, pj = s;
            if (!detail::snf_find_min_pivot(m, s, pi, pj)) break;
            m.swap_rows(s, pi);
            if (a) a->swap_rows(s, pi);
            m.swap_cols(s, pj);
            if (b) b->swap_cols(s, pj);

            bool reduced = true;
            for (std::size_t i = s + 1; i < m.rows(); ++i) {
                if (m(i, s) == 0) continue;
                mpz_class q;
                mpz_tdiv_q(q.get_mpz_t(), m(i, s).get_mpz_t(), m(s, s).get_mpz_t());
                if (q != 0) {
                    m.add_row(i, s, -q);
                    if (a) a->add_row(i, s, -q);
                }
                if (m(i, s) != 0) reduced = false;
            }
            for (std::size_t j = s + 1; j < m.cols(); ++j) {
                if (m(s, j) == 0) continue;
                mpz_class q;
                mpz_tdiv_q(q.get_mpz_t(), m(s, j).get_mpz_t(), m(s, s).get_mpz_t());
                if (q != 0) {
                    m.add_col(j, s, -q);
                    if (b) b->add_col(j, s, -q);
                }
                if (m(s, j) != 0) reduced = false;
            }
            if (!reduced) continue;
            if (!detail::snf_is_isolated(m, s)) continue;

            // divisibility of the trailing block by the pivot
            bool divides_all = true;
            for (std::size_t i = s + 1; i < m.rows() && divides_all; ++i)
                for (std::size_t j = s + 1; j < m.cols(); ++j)
                    if (!mpz_divisible_p(m(i, j).get_mpz_t(), m(s, s).get_mpz_t())) {
                        m.add_row(s, i, 1);
                        if (a) a->add_row(s, i, 1);
                        divides_all = false;
                        break;
                    }
            if (divides_all) break;
        }
        if (m(s, s) < 0) {
            m.negate_row(s);
            if (a) a->negate_row(s);
        }
    }

    SNFDecomposition out;
    for (std::size_t s = 0; s < nmin && m(s, s) != 0; ++s) out.result.invariant_factors.push_back(m(s, s));
    out.result.rank = out.result.invariant_factors.size();
    out.result.free_corank = m.cols() - out.result.rank;
    out.diagonal = std::move(m);
    out.row_transform = std::move(a);
    out.col_transform = std::move(b);
    return out;
}

inline SNFResult smith_normal_form(const BigIntMatrix& m) {
    return smith_normal_form_full(m, false).result;
}

/// Cokernel Z^cols / RowSpace(M) in invariant-factor form.
inline AbelianGroupType cokernel_type(const BigIntMatrix& m) {
    SNFResult snf = smith_normal_form(m);
    std::vector<mpz_class> factors;
    for (const auto& d : snf.invariant_factors)
        if (d > 1) factors.push_back(d);
    return AbelianGroupType(std::move(factors), static_cast<int>(snf.free_corank));
}

/// Truncated elementary-divisor exponents over Z/p^k: the multiset
/// {min(v_p(d_i), k)}, one entry per diagonal position, sorted increasing.
/// Elimination runs directly mod p^k with minimal-valuation pivoting; the
/// inverse of the pivot's unit part clears its row and column exactly.
inline std::vector<unsigned> snf_mod_pk(const BigIntMatrix& input, std::uint64_t p, unsigned k) {
    if (k == 0) throw std::invalid_argument("snf_mod_pk: k must be >= 1");
    long double bits = k * std::log2(static_cast<long double>(p));
    if (bits > 62) throw std::invalid_argument("snf_mod_pk: p^k exceeds 62 bits");
    const std::uint64_t pk = u64_pow(p, k);
    ModMatrix m = ModMatrix::reduce(input, pk);
    const std::size_t nmin = std::min(m.rows, m.cols);
    std::vector<unsigned> exps;
    exps.reserve(nmin);

    auto valuation = [&](std::uint64_t e) {
        if (e == 0) return k;
        unsigned v = 0;
        while (e % p == 0) {
            e /= p;
            ++v;
        }
        return v;
    };

    for (std::size_t s = 0; s < nmin; ++s) {
        std::size_t pi = s, pj = s;
        unsigned best = k;
        for (std::size_t i = s; i < m.rows && best > 0; ++i)
            for (std::size_t j = s; j < m.cols; ++j) {
                unsigned v = valuation(m.at(i, j));
                if (v < best) {
                    best = v;
                    pi = i;
                    pj = j;
                    if (v == 0) break;
                }
            }
        if (best == k) {
            // remaining block vanishes mod p^k; every further divisor caps at k
            for (std::size_t t = s; t < nmin; ++t) exps.push_back(k);
            break;
        }
        if (pi != s)
            for (std::size_t j = s; j < m.cols; ++j) std::swap(m.at(pi, j), m.at(s, j));
        if (pj != s)
            for (std::size_t i = s; i < m.rows; ++i) std::swap(m.at(i, pj), m.at(i, s));

        const unsigned v = best;
        const std::uint64_t shifted_mod = u64_pow(p, k - v);
        const std::uint64_t unit = (m.at(s, s) / u64_pow(p, v)) % shifted_mod;
        const std::uint64_t unit_inv = detail::invmod(unit, shifted_mod);
        for (std::size_t i = s + 1; i < m.rows; ++i) {
            if (m.at(i, s) == 0) continue;
            std::uint64_t f = detail::mulmod((m.at(i, s) / u64_pow(p, v)) % shifted_mod, unit_inv, shifted_mod);
            if (f == 0) continue;
            for (std::size_t j = s; j < m.cols; ++j) {
                std::uint64_t sub = detail::mulmod(f, m.at(s, j), pk);
                m.at(i, j) = (m.at(i, j) + pk - sub) % pk;
            }
        }
        for (std::size_t j = s + 1; j < m.cols; ++j) {
            if (m.at(s, j) == 0) continue;
            std::uint64_t f = detail::mulmod((m.at(s, j) / u64_pow(p, v)) % shifted_mod, unit_inv, shifted_mod);
            if (f == 0) continue;
            for (std::size_t i = s; i < m.rows; ++i) {
                std::uint64_t sub = detail::mulmod(f, m.at(i, s), pk);
                m.at(i, j) = (m.at(i, j) + pk - sub) % pk;
            }
        }
        exps.push_back(v);
    }
    std::sort(exps.begin(), exps.end());
    return exps;
}

/// p-group type read off from capped exponents; capped entries count as p^k
/// and are flagged by the caller via `hit_cap`.
inline PGroupType pgroup_from_exponents(std::uint64_t p, const std::vector<unsigned>& exps,
                                        unsigned k, bool* hit_cap = nullptr) {
    std::vector<int> parts;
    bool capped = false;
    for (unsigned e : exps) {
        if (e == 0) continue;
        if (e >= k) capped = true;
        parts.push_back(static_cast<int>(e));
    }
    if (hit_cap) *hit_cap = capped;
    return PGroupType(p, Partition::from_unsorted(std::move(parts)));
}

/// Integer solution y of y * S = t, if one exists.
/// Via D = A S B: y S = t  <=>  (y A^{-1}) D = t B, so w_j = (tB)_j / d_j
/// must be exact on the rank block and (tB)_j = 0 beyond it; then y = w A.
inline std::optional<std::vector<mpz_class>> solve_row_combination(const BigIntMatrix& s,
                                                                   const std::vector<mpz_class>& t) {
    if (t.size() != s.cols()) throw std::invalid_argument("solve_row_combination: size mismatch");
    SNFDecomposition dec = smith_normal_form_full(s, true);
    const BigIntMatrix& b = *dec.col_transform;
    std::vector<mpz_class> tb(s.cols(), 0);
    for (std::size_t j = 0; j < s.cols(); ++j)
        for (std::size_t i = 0; i < s.cols(); ++i) tb[j] += t[i] * b(i, j);
    std::vector<mpz_class> w(s.rows(), 0);
    for (std::size_t j = 0; j < s.cols(); ++j) {
        if (j < dec.result.rank) {
            const mpz_class& d = dec.result.invariant_factors[j];
            if (!mpz_divisible_p(tb[j].get_mpz_t(), d.get_mpz_t())) return std::nullopt;
            if (j < s.rows()) w[j] = tb[j] / d;
        } else if (tb[j] != 0) {
            return std::nullopt;
        }
    }
    const BigIntMatrix& a = *dec.row_transform;
    std::vector<mpz_class> y(s.rows(), 0);
    for (std::size_t j = 0; j < s.rows(); ++j)
        for (std::size_t i = 0; i < s.rows(); ++i) y[j] += w[i] * a(i, j);
    return y;
}

/// Does an integer combination of the given generator rows hit `target`
/// modulo per-coordinate moduli?  Adds one m_j * e_j row per coordinate and
/// solves the lattice membership exactly.  On success returns only the
/// generator coefficients.
inline std::optional<std::vector<mpz_class>> solve_mixed_congruences(
    const std::vector<std::vector<mpz_class>>& generators,
    const std::vector<mpz_class>& target,
    const std::vector<mpz_class>& moduli) {
    const std::size_t c = moduli.size();
    if (target.size() != c) throw std::invalid_argument("solve_mixed_congruences: size mismatch");
    BigIntMatrix s(generators.size() + c, c);
    for (std::size_t i = 0; i < generators.size(); ++i) {
        if (generators[i].size() != c) throw std::invalid_argument("generator arity mismatch");
        for (std::size_t j = 0; j < c; ++j) s(i, j) = generators[i][j];
    }
    for (std::size_t j = 0; j < c; ++j) s(generators.size() + j, j) = moduli[j];
    auto y = solve_row_combination(s, target);
    if (!y) return std::nullopt;
    return std::vector<mpz_class>(y->begin(), y->begin() + static_cast<long>(generators.size()));
}

}  // namespace sandlab
