#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "sandlab/abelian.hpp"
#include "sandlab/tensor.hpp"

namespace sandlab {

/// Which limiting distribution applies.
enum class LawKind { DirectedRegular, UndirectedOddD, UndirectedEvenD, DirectedER };

inline const char* law_name(LawKind k) {
    switch (k) {
        case LawKind::DirectedRegular: return "directed-regular";
        case LawKind::UndirectedOddD: return "undirected-odd";
        case LawKind::UndirectedEvenD: return "undirected-even";
        case LawKind::DirectedER: return "directed-er";
    }
    return "?";
}

inline LawKind law_from_name(const std::string& s) {
    if (s == "directed-regular" || s == "directed") return LawKind::DirectedRegular;
    if (s == "undirected-odd") return LawKind::UndirectedOddD;
    if (s == "undirected-even") return LawKind::UndirectedEvenD;
    if (s == "directed-er" || s == "er") return LawKind::DirectedER;
    throw std::invalid_argument("unknown law kind: " + s);
}

/// A law evaluation: probability, the number of product terms taken, and a
/// bound on the truncation error of the infinite product.
struct LawValue {
    long double probability = 0.0L;
    int truncation_terms = 0;
    long double error_bound = 0.0L;
};

/// long double with the full 64-bit mantissa (plain mpz_get_d would stop at 53).
inline long double mpz_to_ld(const mpz_class& x) {
    const int sign = mpz_sgn(x.get_mpz_t());
    if (sign == 0) return 0.0L;
    mpz_class a = abs(x);
    const std::size_t bits = mpz_sizeinbase(a.get_mpz_t(), 2);
    if (bits <= 63) return static_cast<long double>(sign) * static_cast<long double>(a.get_ui());
    mpz_class top = a >> static_cast<unsigned long>(bits - 63);
    long double v = std::ldexp(static_cast<long double>(top.get_ui()), static_cast<int>(bits - 63));
    return sign * v;
}

inline long double mpq_to_ld(const mpq_class& x) {
    return mpz_to_ld(x.get_num()) / mpz_to_ld(x.get_den());
}

namespace detail {

/// prod over the given exponent sequence of (1 - p^{-e}), truncated when the
/// next factor differs from 1 by < 1e-15; the error bound is the geometric
/// tail of the dropped exponents.
template <typename NextExponent>
LawValue euler_like_product(std::uint64_t p, NextExponent next) {
    LawValue out;
    out.probability = 1.0L;
    long double term;
    int e = next(-1);
    int count = 0;
    for (;;) {
        term = std::pow(static_cast<long double>(p), static_cast<long double>(-e));
        if (term < 1e-15L) break;
        out.probability *= (1.0L - term);
        ++count;
        e = next(e);
    }
    // sum_{dropped} p^{-e} over the arithmetic tail
    int step = next(e) - e;
    long double tail = term / (1.0L - std::pow(static_cast<long double>(p), static_cast<long double>(-step)));
    out.truncation_terms = count;
    out.error_bound = tail;
    return out;
}

inline LawValue product_all_j(std::uint64_t p) {  // prod_{j>=1} (1 - p^-j)
    return euler_like_product(p, [](int e) { return e < 0 ? 1 : e + 1; });
}
inline LawValue product_odd_j(std::uint64_t p) {  // prod_{j>=0} (1 - p^-(2j+1))
    return euler_like_product(p, [](int e) { return e < 0 ? 1 : e + 2; });
}
inline LawValue product_from_two(std::uint64_t p) {  // prod_{j>=2} (1 - p^-j)
    return euler_like_product(p, [](int e) { return e < 0 ? 2 : e + 1; });
}

}  // namespace detail

/// |{phi : G x G -> C* symmetric bilinear perfect}| / (|G| |Aut(G)|),
/// evaluated exactly: with mu the transpose of lambda,
///   p^{-sum_i mu_i(mu_i+1)/2} * prod_{i=1}^{lambda_1}
///       prod_{j=1}^{floor((mu_i - mu_{i+1})/2)} (1 - p^{-2j})^{-1}.
inline mpq_class pairing_ratio(const PGroupType& g) {
    Partition mu = g.lambda.transpose();
    unsigned long exp = 0;
    for (int m : mu.parts())
        exp += static_cast<unsigned long>(m) * static_cast<unsigned long>(m + 1) / 2;
    mpq_class ratio(1, 1);
    ratio /= mpz_pow_u64(g.p, exp);
    for (std::size_t i = 0; i < mu.length(); ++i) {
        int drop = mu.parts()[i] - (i + 1 < mu.length() ? mu.parts()[i + 1] : 0);
        for (int j = 1; j <= drop / 2; ++j) {
            mpz_class p2j = mpz_pow_u64(g.p, 2 * static_cast<unsigned long>(j));
            ratio *= mpq_class(p2j, p2j - 1);
        }
    }
    ratio.canonicalize();
    return ratio;
}

/// Brute-force count of symmetric bilinear perfect pairings G x G -> C*.
/// Values live in the exp(G)-th roots of unity, i.e. Z/exp(G); a pairing is
/// its Gram matrix on the standard generators.
inline mpz_class count_sbp_pairings(const PGroupType& g, long budget = 5000000) {
    if (g.trivial()) return 1;
    GroupSpace space(AbelianGroupType::from_sylow(g));
    const auto& moduli = space.moduli();
    const std::size_t k = moduli.size();
    const std::int64_t exponent = moduli.back();

    // slot (i, j), i <= j: values are multiples of exponent / gcd(o_i, o_j)
    struct Slot {
        std::size_t i, j;
        std::int64_t step, count;
    };
    std::vector<Slot> slots;
    long total = 1;
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i; j < k; ++j) {
            std::int64_t count = std::gcd(moduli[i], moduli[j]);
            slots.push_back(Slot{i, j, exponent / count, count});
            total *= count;
            if (total > budget) throw budget_error("pairing enumeration budget");
        }

    auto elements = space.all_elements();
    std::vector<std::int64_t> gram(k * k, 0);
    std::vector<std::size_t> idx(slots.size(), 0);
    mpz_class count = 0;
    for (;;) {
        for (std::size_t s = 0; s < slots.size(); ++s) {
            std::int64_t v = static_cast<std::int64_t>(idx[s]) * slots[s].step % exponent;
            gram[slots[s].i * k + slots[s].j] = v;
            gram[slots[s].j * k + slots[s].i] = v;
        }
        bool perfect = true;
        for (const auto& x : elements) {
            if (x.is_zero()) continue;
            bool in_radical = true;
            for (std::size_t j = 0; j < k && in_radical; ++j) {
                std::int64_t acc = 0;
                for (std::size_t i = 0; i < k; ++i)
                    acc = (acc + x.coords[i] % exponent * gram[i * k + j]) % exponent;
                if (acc != 0) in_radical = false;
            }
            if (in_radical) {
                perfect = false;
                break;
            }
        }
        if (perfect) ++count;
        std::size_t pos = 0;
        while (pos < idx.size() && ++idx[pos] == static_cast<std::size_t>(slots[pos].count)) idx[pos++] = 0;
        if (pos == idx.size()) break;
    }
    return count;
}

/// Cohen-Lenstra law for the directed regular model:
/// P(p-Sylow = G) = |Aut(G)|^{-1} prod_{j>=1} (1 - p^{-j}).
inline LawValue cl_directed_prob(const PGroupType& g) {
    LawValue v = detail::product_all_j(g.p);
    v.probability /= mpz_to_ld(aut_order(g));
    v.error_bound /= mpz_to_ld(aut_order(g));
    return v;
}

/// Undirected odd-d law:
/// pairing_ratio(G) * prod_{j>=0} (1 - p^{-2j-1}).
inline LawValue undirected_odd_prob(const PGroupType& g) {
    LawValue v = detail::product_odd_j(g.p);
    long double ratio = mpq_to_ld(pairing_ratio(g));
    v.probability *= ratio;
    v.error_bound *= ratio;
    return v;
}

/// Undirected even-d law at p = 2: 2^{rank(G)} times the odd-d value on
/// odd-rank groups, zero on even-rank groups.
inline LawValue undirected_even_prob(const PGroupType& g) {
    if (g.p != 2) throw std::invalid_argument("undirected_even_prob applies to 2-groups");
    if (g.rank() % 2 == 0) {
        LawValue v = detail::product_odd_j(2);
        v.probability = 0.0L;
        v.error_bound = 0.0L;
        return v;
    }
    LawValue v = undirected_odd_prob(g);
    long double scale = std::pow(2.0L, static_cast<long double>(g.rank()));
    v.probability *= scale;
    v.error_bound *= scale;
    return v;
}

/// Directed Erdos-Renyi (total sandpile) law:
/// prod_{j>=2} (1 - p^{-j}) / (|G| |Aut(G)|).
inline LawValue directed_er_prob(const PGroupType& g) {
    LawValue v = detail::product_from_two(g.p);
    long double denom = mpz_to_ld(g.order()) * mpz_to_ld(aut_order(g));
    v.probability /= denom;
    v.error_bound /= denom;
    return v;
}

inline LawValue law_value(LawKind kind, const PGroupType& g) {
    switch (kind) {
        case LawKind::DirectedRegular: return cl_directed_prob(g);
        case LawKind::UndirectedOddD: return undirected_odd_prob(g);
        case LawKind::UndirectedEvenD:
            return g.p == 2 ? undirected_even_prob(g) : undirected_odd_prob(g);
        case LawKind::DirectedER: return directed_er_prob(g);
    }
    throw std::logic_error("unreachable");
}

/// Joint probability across distinct primes: the laws are independent in the
/// limit, so the value is the product of the per-prime laws.  Under the
/// even-d law the 2-Sylow component uses the even formula and odd primes the
/// odd one.
inline LawValue joint_prob(const std::vector<PGroupType>& parts, LawKind kind) {
    std::set<std::uint64_t> seen;
    LawValue out;
    out.probability = 1.0L;
    out.error_bound = 0.0L;
    for (const auto& g : parts) {
        if (!seen.insert(g.p).second) throw std::invalid_argument("joint_prob: duplicate prime");
        LawValue v = law_value(kind, g);
        out.error_bound = out.error_bound * v.probability + v.error_bound * out.probability +
                          out.error_bound * v.error_bound;
        out.probability *= v.probability;
        out.truncation_terms += v.truncation_terms;
    }
    return out;
}

/// Limiting surjective moment E|Sur(Gamma, V)| for the graph laws.
inline mpz_class moment_prediction(const AbelianGroupType& v, LawKind kind) {
    if (!v.is_finite()) throw std::domain_error("moment_prediction needs finite V");
    switch (kind) {
        case LawKind::DirectedRegular: return 1;
        case LawKind::UndirectedOddD: return exterior_square_order(v);
        case LawKind::UndirectedEvenD:
            return mpz_pow_u64(2, static_cast<unsigned long>(rank2(v))) * exterior_square_order(v);
        case LawKind::DirectedER:
            throw std::domain_error("no surjective-moment statement for the ER law");
    }
    throw std::logic_error("unreachable");
}

struct NormalizationReport {
    double mass = 0.0;
    double deficit = 0.0;
    int groups = 0;
};

/// Sum of the law over all p-groups with |lambda| <= sum_cap and
/// rank <= rank_cap; a diagnostic that the law is a probability measure.
inline NormalizationReport normalization_report(LawKind kind, std::uint64_t p, int sum_cap, int rank_cap) {
    NormalizationReport r;
    long double mass = 0.0L;
    for (const auto& lambda : partitions_up_to(sum_cap, rank_cap)) {
        mass += law_value(kind, PGroupType(p, lambda)).probability;
        ++r.groups;
    }
    r.mass = static_cast<double>(mass);
    r.deficit = static_cast<double>(1.0L - mass);
    return r;
}

/// Groups sorted by law mass, for `law table` and outcome binning.
inline std::vector<std::pair<PGroupType, LawValue>> law_table(LawKind kind, std::uint64_t p,
                                                              int sum_cap, int rank_cap) {
    std::vector<std::pair<PGroupType, LawValue>> rows;
    for (const auto& lambda : partitions_up_to(sum_cap, rank_cap))
        rows.emplace_back(PGroupType(p, lambda), law_value(kind, PGroupType(p, lambda)));
    std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
        return a.second.probability > b.second.probability;
    });
    return rows;
}

/// log((d-1)^{d-1} / [d(d-2)]^{d/2-1}), the almost-sure limit of
/// log|tors(Gamma_n)| / n for the matching model.
inline double mckay_lyons_constant(unsigned d) {
    if (d < 3) throw std::invalid_argument("mckay_lyons_constant needs d >= 3");
    double dd = static_cast<double>(d);
    return (dd - 1.0) * std::log(dd - 1.0) - (dd / 2.0 - 1.0) * std::log(dd * (dd - 2.0));
}

}  // namespace sandlab
