#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include <gmpxx.h>

#include "sandlab/abelian.hpp"
#include "sandlab/bigmat.hpp"
#include "sandlab/snf.hpp"
#include "sandlab/tensor.hpp"

namespace sandlab {

enum class LiftObstruction { None, NotGenerating, TooSmall, NotInI2 };

inline const char* lift_obstruction_name(LiftObstruction o) {
    switch (o) {
        case LiftObstruction::None: return "none";
        case LiftObstruction::NotGenerating: return "q does not generate V";
        case LiftObstruction::TooSmall: return "n < 2|V|";
        case LiftObstruction::NotInI2: return "<q(x)r> not in I2";
    }
    return "?";
}

struct LiftResult {
    std::optional<BigIntMatrix> matrix;
    LiftObstruction obstruction = LiftObstruction::None;

    bool ok() const { return matrix.has_value(); }
};

namespace lift_detail {

/// Core construction: assumes q[i] = v_i (the i-th standard generator) for
/// i < l and <q (x) r> in I_2.  Builds the symmetric integer matrix
///   a[i][j] = r_i(j) + r_j(i) - sum_k q_k(max) r_k(min)   (i, j < l)
///   a[i][j] = r_i(j)                                       (i >= l > j)
///   a[i][j] = 0                                            (i, j >= l)
/// and clears odd diagonal entries with +o_i on the odd-order generators.
inline BigIntMatrix build_on_basis(const GroupSpace& space, const std::vector<GroupElement>& q,
                                   const std::vector<GroupElement>& r) {
    const std::size_t n = q.size();
    const std::size_t l = space.arity();
    const auto& moduli = space.moduli();
    BigIntMatrix a(n, n);

    auto coord = [&](const std::vector<GroupElement>& vec, std::size_t k, std::size_t i) {
        return vec[k].coords[i];  // canonical representative in [0, o_i)
    };

    for (std::size_t i = l; i < n; ++i)
        for (std::size_t j = 0; j < l; ++j) {
            a(i, j) = coord(r, i, j);
            a(j, i) = coord(r, i, j);
        }
    for (std::size_t i = 0; i < l; ++i)
        for (std::size_t j = i; j < l; ++j) {
            mpz_class cross = 0;
            for (std::size_t k = 0; k < n; ++k)
                cross += mpz_class(coord(q, k, j)) * coord(r, k, i);
            mpz_class value = mpz_class(coord(r, i, j)) + coord(r, j, i) - cross;
            a(i, j) = value;
            a(j, i) = value;
        }
    for (std::size_t i = 0; i < l; ++i) {
        if (mpz_odd_p(a(i, i).get_mpz_t())) {
            if (moduli[i] % 2 == 0)
                throw std::logic_error("even-order diagonal came out odd; I2 precondition violated");
            a(i, i) += moduli[i];  // o_i q_i = 0, so Aq is unchanged
        }
    }
    return a;
}

inline std::vector<GroupElement> apply_matrix(const GroupSpace& space, const BigIntMatrix& m,
                                              const std::vector<GroupElement>& v) {
    std::vector<GroupElement> out(m.rows(), space.zero());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        GroupElement acc = space.zero();
        for (std::size_t j = 0; j < m.cols(); ++j) {
            if (m(i, j) == 0) continue;
            mpz_class c = m(i, j);
            // reduce the integer coefficient modulo the exponent before scaling
            mpz_class e = space.type().exponent();
            mpz_class cm = c % e;
            acc = space.add(acc, space.scale(cm.get_si(), v[j]));
        }
        out[i] = acc;
    }
    return out;
}

}  // namespace lift_detail

/// Symmetric even-diagonal lift: a symmetric integer matrix A with Aq = r
/// and even diagonal, which exists exactly when <q (x) r> lies in I_2
/// (given that q generates V and n >= 2|V|).  Construction: permute a
/// generating set into the tail, change basis with a unit upper-triangular B
/// so the head becomes the standard generators, build the explicit matrix
/// there, and pull back through B^T A B and the permutation.  The result is
/// verified by multiplication before it is returned.
inline LiftResult symmetric_even_diag_lift(const AbelianGroupType& v,
                                           const std::vector<GroupElement>& q,
                                           const std::vector<GroupElement>& r) {
    if (q.size() != r.size()) throw std::invalid_argument("lift: length mismatch");
    GroupSpace space(v);
    const std::size_t n = q.size();
    const std::size_t l = space.arity();

    if (n < 2 * static_cast<std::size_t>(space.order())) return {std::nullopt, LiftObstruction::TooSmall};
    if (space.span_size(q) != space.order()) return {std::nullopt, LiftObstruction::NotGenerating};
    TensorSquare ts(v);
    if (!in_i2(ts, tensor_pair_sum(ts, q, r))) return {std::nullopt, LiftObstruction::NotInI2};

    // minimal generating subset of positions; everything else may move to the head
    std::vector<char> needed(n, 0);
    {
        std::vector<GroupElement> gens;
        for (std::size_t i = 0; i < n; ++i) {
            if (space.span_size(gens) == space.order()) break;
            auto trial = gens;
            trial.push_back(q[i]);
            if (space.span_size(trial) > space.span_size(gens)) {
                gens = std::move(trial);
                needed[i] = 1;
            }
        }
    }
    std::vector<std::size_t> order;  // permuted position -> original index
    for (std::size_t i = 0; i < n && order.size() < l; ++i)
        if (!needed[i]) order.push_back(i);
    for (std::size_t i = 0; i < n; ++i)
        if (std::find(order.begin(), order.end(), i) == order.end()) order.push_back(i);

    std::vector<GroupElement> qp(n), rp(n);
    for (std::size_t i = 0; i < n; ++i) {
        qp[i] = q[order[i]];
        rp[i] = r[order[i]];
    }

    // unit upper-triangular B with (B qp)_i = v_i for i < l
    BigIntMatrix b = BigIntMatrix::identity(n);
    {
        std::vector<std::vector<mpz_class>> tail_rows;
        for (std::size_t j = l; j < n; ++j)
            tail_rows.emplace_back(qp[j].coords.begin(), qp[j].coords.end());
        std::vector<mpz_class> moduli;
        for (auto m : space.moduli()) moduli.emplace_back(static_cast<long>(m));
        for (std::size_t i = 0; i < l; ++i) {
            GroupElement target = space.sub(space.generator(i), qp[i]);
            std::vector<mpz_class> t(target.coords.begin(), target.coords.end());
            auto x = solve_mixed_congruences(tail_rows, t, moduli);
            if (!x) throw std::logic_error("lift: tail fails to generate after selection");
            for (std::size_t j = l; j < n; ++j) b(i, j) = (*x)[j - l];
        }
    }
    std::vector<GroupElement> q2 = lift_detail::apply_matrix(space, b, qp);
    for (std::size_t i = 0; i < l; ++i)
        if (!(q2[i] == space.generator(i))) throw std::logic_error("lift: basis change failed");

    // B^{ -1} for a unit upper-triangular matrix, by back substitution
    BigIntMatrix binv = BigIntMatrix::identity(n);
    for (std::size_t i = n; i-- > 0;)
        for (std::size_t j = i + 1; j < n; ++j) {
            // binv(i, j) = -(sum over k in (i, j] of b(i,k) binv(k,j))
            mpz_class acc = 0;
            for (std::size_t k = i + 1; k <= j; ++k) acc += b(i, k) * binv(k, j);
            binv(i, j) = -acc;
        }
    std::vector<GroupElement> r2 = lift_detail::apply_matrix(space, binv.transposed(), rp);

    BigIntMatrix core = lift_detail::build_on_basis(space, q2, r2);
    auto check_core = lift_detail::apply_matrix(space, core, q2);
    for (std::size_t i = 0; i < n; ++i)
        if (!(check_core[i] == r2[i])) throw std::logic_error("lift: core identity failed");

    BigIntMatrix conjugated = b.transposed() * core * b;
    // undo the permutation: position of original index i is pos[i]
    std::vector<std::size_t> pos(n);
    for (std::size_t i = 0; i < n; ++i) pos[order[i]] = i;
    BigIntMatrix a(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a(i, j) = conjugated(pos[i], pos[j]);

    auto check = lift_detail::apply_matrix(space, a, q);
    for (std::size_t i = 0; i < n; ++i)
        if (!(check[i] == r[i])) throw std::logic_error("lift: final verification failed");
    for (std::size_t i = 0; i < n; ++i) {
        if (mpz_odd_p(a(i, i).get_mpz_t())) throw std::logic_error("lift: odd diagonal survived");
        for (std::size_t j = 0; j < n; ++j)
            if (a(i, j) != a(j, i)) throw std::logic_error("lift: asymmetry");
    }
    return {std::move(a), LiftObstruction::None};
}

}  // namespace sandlab
