#pragma once

#include <cstdint>
#include <numeric>
#include <set>
#include <stdexcept>
#include <vector>

#include <gmpxx.h>

#include "sandlab/abelian.hpp"
#include "sandlab/snf.hpp"

namespace sandlab {

/// Element of V (x) V in the coordinate grid: component (i,j) lives in
/// Z/gcd(a_i, a_j).  Stored row-major as a flat vector.
struct TensorElement {
    std::vector<std::int64_t> coords;

    bool is_zero() const {
        return std::all_of(coords.begin(), coords.end(), [](std::int64_t c) { return c == 0; });
    }
    bool operator==(const TensorElement& o) const { return coords == o.coords; }
    bool operator<(const TensorElement& o) const { return coords < o.coords; }
};

/// V (x) V for a finite V = Z/a_1 + ... + Z/a_k, with the subgroups
///   I   = <a (x) a>            (= all symmetric coordinate grids) and
///   I_2 = <a (x) b + b (x) a>  (= symmetric grids with even diagonal),
/// each presented by generators on the standard basis.
class TensorSquare {
public:
    explicit TensorSquare(const AbelianGroupType& base) : base_(base) {
        if (!base.is_finite()) throw std::domain_error("TensorSquare needs a finite group");
        const auto& a = base.invariant_factors();
        k_ = a.size();
        moduli_.resize(k_ * k_);
        for (std::size_t i = 0; i < k_; ++i)
            for (std::size_t j = 0; j < k_; ++j) {
                mpz_class g;
                mpz_gcd(g.get_mpz_t(), a[i].get_mpz_t(), a[j].get_mpz_t());
                if (!g.fits_slong_p()) throw budget_error("tensor square: modulus too large");
                moduli_[i * k_ + j] = g.get_si();
            }
        build_generators();
    }

    const AbelianGroupType& base() const { return base_; }
    std::size_t side() const { return k_; }
    const std::vector<std::int64_t>& component_moduli() const { return moduli_; }
    const std::vector<TensorElement>& i2_generators() const { return i2_generators_; }
    const std::vector<TensorElement>& i_generators() const { return i_generators_; }

    mpz_class order() const {
        mpz_class n = 1;
        for (auto m : moduli_) n *= static_cast<long>(m);
        return n;
    }

    TensorElement zero() const { return TensorElement{std::vector<std::int64_t>(k_ * k_, 0)}; }

    TensorElement reduce(std::vector<std::int64_t> coords) const {
        if (coords.size() != k_ * k_) throw std::invalid_argument("tensor coordinate arity mismatch");
        for (std::size_t c = 0; c < coords.size(); ++c) {
            coords[c] %= moduli_[c];
            if (coords[c] < 0) coords[c] += moduli_[c];
        }
        return TensorElement{std::move(coords)};
    }

    TensorElement add(const TensorElement& x, const TensorElement& y) const {
        TensorElement r = x;
        for (std::size_t c = 0; c < r.coords.size(); ++c) r.coords[c] = (r.coords[c] + y.coords[c]) % moduli_[c];
        return r;
    }

    /// a (x) b for a, b in V.
    TensorElement pure_tensor(const GroupElement& a, const GroupElement& b) const {
        std::vector<std::int64_t> coords(k_ * k_, 0);
        for (std::size_t i = 0; i < k_; ++i)
            for (std::size_t j = 0; j < k_; ++j)
                coords[i * k_ + j] = a.coords[i] % moduli_[i * k_ + j] * (b.coords[j] % moduli_[i * k_ + j]);
        return reduce(std::move(coords));
    }

private:
    void build_generators() {
        auto basis = [&](std::size_t i) {
            std::vector<std::int64_t> coords(k_, 0);
            if (i < k_) coords[i] = 1;
            return GroupElement{coords};
        };
        for (std::size_t i = 0; i < k_; ++i)
            for (std::size_t j = i; j < k_; ++j) {
                TensorElement g = add(pure_tensor(basis(i), basis(j)), pure_tensor(basis(j), basis(i)));
                i2_generators_.push_back(std::move(g));
            }
        for (std::size_t i = 0; i < k_; ++i) i_generators_.push_back(pure_tensor(basis(i), basis(i)));
        for (std::size_t i = 0; i < k_; ++i)
            for (std::size_t j = i + 1; j < k_; ++j) {
                GroupElement s{std::vector<std::int64_t>(k_, 0)};
                s.coords[i] = 1;
                s.coords[j] = 1;
                i_generators_.push_back(pure_tensor(s, s));
            }
    }

    AbelianGroupType base_;
    std::size_t k_ = 0;
    std::vector<std::int64_t> moduli_;
    std::vector<TensorElement> i2_generators_;
    std::vector<TensorElement> i_generators_;
};

/// <q (x) r> = sum_n q_n (x) r_n, computed coordinatewise:
/// component (i,j) is sum_n q_n[i] r_n[j] mod gcd(a_i, a_j).
inline TensorElement tensor_pair_sum(const TensorSquare& ts,
                                     const std::vector<GroupElement>& q,
                                     const std::vector<GroupElement>& r) {
    if (q.size() != r.size()) throw std::invalid_argument("tensor_pair_sum: length mismatch");
    const std::size_t k = ts.side();
    std::vector<std::int64_t> coords(k * k, 0);
    for (std::size_t c = 0; c < k * k; ++c) {
        const std::size_t i = c / k, j = c % k;
        const std::int64_t m = ts.component_moduli()[c];
        std::int64_t acc = 0;
        for (std::size_t n = 0; n < q.size(); ++n)
            acc = (acc + q[n].coords[i] % m * (r[n].coords[j] % m)) % m;
        coords[c] = acc;
    }
    return ts.reduce(std::move(coords));
}

/// Membership of x in I_2, decided by solving the linear congruence system
/// over the generator rows with per-component moduli.
inline bool in_i2(const TensorSquare& ts, const TensorElement& x) {
    if (ts.side() == 0) return true;
    std::vector<std::vector<mpz_class>> gens;
    for (const auto& g : ts.i2_generators())
        gens.emplace_back(g.coords.begin(), g.coords.end());
    std::vector<mpz_class> target(x.coords.begin(), x.coords.end());
    std::vector<mpz_class> moduli;
    for (auto m : ts.component_moduli()) moduli.emplace_back(static_cast<long>(m));
    return solve_mixed_congruences(gens, target, moduli).has_value();
}

/// |wedge^2 V| = prod_{i<j} gcd(a_i, a_j); the diagonal moduli are exactly
/// what dies when V(x)V is cut by I.
inline mpz_class exterior_square_order(const AbelianGroupType& v) {
    if (!v.is_finite()) throw std::domain_error("exterior square of an infinite group");
    const auto& a = v.invariant_factors();
    mpz_class result = 1;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = i + 1; j < a.size(); ++j) {
            mpz_class g;
            mpz_gcd(g.get_mpz_t(), a[i].get_mpz_t(), a[j].get_mpz_t());
            result *= g;
        }
    return result;
}

/// Size of the span of `gens` inside the tensor square, by closure.
/// Enumeration-scale only; used by tests and the small structural checks.
inline mpz_class tensor_span_order(const TensorSquare& ts, const std::vector<TensorElement>& gens) {
    std::set<TensorElement> seen{ts.zero()};
    std::vector<TensorElement> frontier{ts.zero()};
    while (!frontier.empty()) {
        std::vector<TensorElement> next;
        for (const auto& x : frontier)
            for (const auto& g : gens) {
                TensorElement y = ts.add(x, g);
                if (seen.insert(y).second) {
                    next.push_back(y);
                    if (seen.size() > (1u << 22)) throw budget_error("tensor span too large");
                }
            }
        frontier = std::move(next);
    }
    return mpz_class(static_cast<long>(seen.size()));
}

}  // namespace sandlab
