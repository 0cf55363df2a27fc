#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "sandlab/numtheory.hpp"
#include "sandlab/partition.hpp"

namespace sandlab {

struct budget_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Isomorphism class of a finite abelian p-group: a prime and the partition
/// of exponents, so lambda = (2,1) at p = 2 is Z/4 + Z/2.  The empty
/// partition is the trivial group.
struct PGroupType {
    std::uint64_t p = 2;
    Partition lambda;

    PGroupType() = default;
    PGroupType(std::uint64_t prime, Partition type) : p(prime), lambda(std::move(type)) {}

    bool trivial() const { return lambda.empty(); }
    int rank() const { return static_cast<int>(lambda.length()); }
    mpz_class order() const { return mpz_pow_u64(p, static_cast<unsigned long>(lambda.sum())); }

    bool operator==(const PGroupType& o) const { return p == o.p && lambda == o.lambda; }
    bool operator<(const PGroupType& o) const {
        return p != o.p ? p < o.p : lambda < o.lambda;
    }

    std::string to_string() const {
        if (trivial()) return "0";
        std::string s;
        for (std::size_t i = 0; i < lambda.length(); ++i) {
            if (i) s += " + ";
            s += "Z/" + mpz_pow_u64(p, static_cast<unsigned long>(lambda.parts()[i])).get_str();
        }
        return s;
    }
};

/// Finitely generated abelian group in invariant-factor form:
/// Z/a_1 + ... + Z/a_k + Z^f with a_1 | a_2 | ... | a_k, every a_i >= 2.
class AbelianGroupType {
public:
    AbelianGroupType() = default;

    explicit AbelianGroupType(std::vector<mpz_class> invariant_factors, int free_rank = 0)
        : factors_(std::move(invariant_factors)), free_rank_(free_rank) {
        if (free_rank_ < 0) throw std::invalid_argument("negative free rank");
        for (std::size_t i = 0; i < factors_.size(); ++i) {
            if (factors_[i] < 2) throw std::invalid_argument("invariant factor < 2");
            if (i + 1 < factors_.size() && !mpz_divisible_p(factors_[i + 1].get_mpz_t(), factors_[i].get_mpz_t()))
                throw std::invalid_argument("invariant factors must form a divisibility chain");
        }
    }

    static AbelianGroupType trivial() { return AbelianGroupType(); }

    static AbelianGroupType cyclic(const mpz_class& n) {
        if (n == 1) return trivial();
        return AbelianGroupType({n});
    }

    /// Assemble the invariant-factor chain from arbitrary cyclic orders,
    /// e.g. {4, 6} -> Z/2 + Z/12.
    static AbelianGroupType from_cyclic_orders(std::vector<mpz_class> orders, int free_rank = 0) {
        std::map<mpz_class, std::vector<unsigned>> by_prime;
        for (const auto& n : orders) {
            if (n < 1) throw std::invalid_argument("cyclic order < 1");
            for (const auto& [p, e] : factorize(n)) by_prime[p].push_back(e);
        }
        std::size_t chain_len = 0;
        for (auto& [p, exps] : by_prime) {
            std::sort(exps.begin(), exps.end(), std::greater<unsigned>());
            chain_len = std::max(chain_len, exps.size());
        }
        // a_k collects the largest exponent of every prime, a_{k-1} the next, ...
        std::vector<mpz_class> chain(chain_len, 1);
        for (const auto& [p, exps] : by_prime)
            for (std::size_t i = 0; i < exps.size(); ++i)
                chain[chain_len - 1 - i] *= mpz_pow(p, exps[i]);
        std::vector<mpz_class> nontrivial;
        for (auto& a : chain)
            if (a > 1) nontrivial.push_back(a);
        return AbelianGroupType(std::move(nontrivial), free_rank);
    }

    static AbelianGroupType from_sylow(const PGroupType& g) {
        std::vector<mpz_class> orders;
        for (int part : g.lambda.parts()) orders.push_back(mpz_pow_u64(g.p, static_cast<unsigned long>(part)));
        return from_cyclic_orders(std::move(orders));
    }

    /// Direct sum of p-groups at pairwise distinct primes plus a free part.
    static AbelianGroupType from_sylow_list(const std::vector<PGroupType>& parts, int free_rank = 0) {
        std::vector<mpz_class> orders;
        std::set<std::uint64_t> seen;
        for (const auto& g : parts) {
            if (!seen.insert(g.p).second) throw std::invalid_argument("duplicate prime in sylow list");
            for (int part : g.lambda.parts()) orders.push_back(mpz_pow_u64(g.p, static_cast<unsigned long>(part)));
        }
        return from_cyclic_orders(std::move(orders), free_rank);
    }

    const std::vector<mpz_class>& invariant_factors() const { return factors_; }
    int free_rank() const { return free_rank_; }
    bool is_trivial() const { return factors_.empty() && free_rank_ == 0; }
    bool is_finite() const { return free_rank_ == 0; }
    std::size_t torsion_rank() const { return factors_.size(); }

    mpz_class torsion_order() const {
        mpz_class n = 1;
        for (const auto& a : factors_) n *= a;
        return n;
    }

    mpz_class order() const {
        if (!is_finite()) throw std::domain_error("order of an infinite group");
        return torsion_order();
    }

    mpz_class exponent() const { return factors_.empty() ? mpz_class(1) : factors_.back(); }

    /// Type of the p-Sylow subgroup of the torsion part.
    PGroupType sylow(std::uint64_t p) const {
        std::vector<int> exps;
        for (auto it = factors_.rbegin(); it != factors_.rend(); ++it) {
            auto v = v_p(*it, p);
            if (v > 0) exps.push_back(static_cast<int>(v));
        }
        return PGroupType(p, Partition(std::move(exps)));
    }

    std::vector<std::uint64_t> primes() const {
        std::vector<std::uint64_t> ps;
        if (!factors_.empty())
            for (const auto& [p, e] : factorize(factors_.back())) {
                if (!p.fits_ulong_p()) throw std::domain_error("prime exceeds 64 bits");
                ps.push_back(p.get_ui());
            }
        return ps;
    }

    /// "Z/2 + Z/4 + Z^2"; "0" for the trivial group.
    std::string to_string() const {
        if (is_trivial()) return "0";
        std::string s;
        for (std::size_t i = 0; i < factors_.size(); ++i) {
            if (i) s += " + ";
            s += "Z/" + factors_[i].get_str();
        }
        if (free_rank_ > 0) {
            if (!factors_.empty()) s += " + ";
            s += free_rank_ == 1 ? "Z" : "Z^" + std::to_string(free_rank_);
        }
        return s;
    }

    /// Accepts the serialized form plus shorthands like "Z4+Z2" and "Z/4+Z/2".
    static AbelianGroupType parse(const std::string& text) {
        std::vector<mpz_class> orders;
        int free_rank = 0;
        std::string token;
        auto flush = [&]() {
            if (token.empty()) return;
            if (token == "0") { token.clear(); return; }
            if (token[0] != 'Z' && token[0] != 'z') throw std::invalid_argument("bad group token: " + token);
            std::string rest = token.substr(1);
            if (rest.empty()) { ++free_rank; token.clear(); return; }
            if (rest[0] == '^') { free_rank += std::stoi(rest.substr(1)); token.clear(); return; }
            if (rest[0] == '/') rest = rest.substr(1);
            orders.emplace_back(rest);
            token.clear();
        };
        for (char c : text) {
            if (c == ' ' || c == '\t') continue;
            if (c == '+') flush();
            else token += c;
        }
        flush();
        return from_cyclic_orders(std::move(orders), free_rank);
    }

    bool operator==(const AbelianGroupType& o) const {
        return factors_ == o.factors_ && free_rank_ == o.free_rank_;
    }
    bool operator!=(const AbelianGroupType& o) const { return !(*this == o); }
    bool operator<(const AbelianGroupType& o) const {
        if (free_rank_ != o.free_rank_) return free_rank_ < o.free_rank_;
        return std::lexicographical_compare(factors_.begin(), factors_.end(),
                                            o.factors_.begin(), o.factors_.end());
    }

private:
    std::vector<mpz_class> factors_;
    int free_rank_ = 0;
};

/// rank of the 2-Sylow subgroup
inline int rank2(const AbelianGroupType& v) {
    int r = 0;
    for (const auto& a : v.invariant_factors())
        if (mpz_even_p(a.get_mpz_t())) ++r;
    return r;
}

/// Element of a finite group in invariant-factor coordinates.  Kept to 64-bit
/// coordinates; every enumeration this project does is budget-guarded far
/// below that.
struct GroupElement {
    std::vector<std::int64_t> coords;

    bool is_zero() const {
        return std::all_of(coords.begin(), coords.end(), [](std::int64_t c) { return c == 0; });
    }
    bool operator==(const GroupElement& o) const { return coords == o.coords; }
    bool operator<(const GroupElement& o) const { return coords < o.coords; }
};

/// Element arithmetic and indexing for one fixed finite group.  Indexing is
/// mixed-radix over the invariant factors; index 0 is the identity.
class GroupSpace {
public:
    explicit GroupSpace(const AbelianGroupType& type) : type_(type) {
        if (!type.is_finite()) throw std::domain_error("GroupSpace needs a finite group");
        for (const auto& a : type.invariant_factors()) {
            if (!a.fits_slong_p()) throw budget_error("invariant factor too large to enumerate");
            moduli_.push_back(a.get_si());
        }
        order_ = 1;
        for (auto m : moduli_) {
            if (order_ > (1 << 24) / std::max<std::int64_t>(m, 1))
                throw budget_error("group too large to enumerate");
            order_ *= m;
        }
    }

    const AbelianGroupType& type() const { return type_; }
    const std::vector<std::int64_t>& moduli() const { return moduli_; }
    std::size_t arity() const { return moduli_.size(); }
    std::int64_t order() const { return order_; }

    GroupElement zero() const { return GroupElement{std::vector<std::int64_t>(moduli_.size(), 0)}; }

    GroupElement reduce(std::vector<std::int64_t> coords) const {
        if (coords.size() != moduli_.size()) throw std::invalid_argument("coordinate arity mismatch");
        for (std::size_t i = 0; i < coords.size(); ++i) {
            coords[i] %= moduli_[i];
            if (coords[i] < 0) coords[i] += moduli_[i];
        }
        return GroupElement{std::move(coords)};
    }

    GroupElement add(const GroupElement& a, const GroupElement& b) const {
        GroupElement r = a;
        for (std::size_t i = 0; i < moduli_.size(); ++i) r.coords[i] = (r.coords[i] + b.coords[i]) % moduli_[i];
        return r;
    }

    GroupElement sub(const GroupElement& a, const GroupElement& b) const {
        GroupElement r = a;
        for (std::size_t i = 0; i < moduli_.size(); ++i) {
            r.coords[i] = (r.coords[i] - b.coords[i]) % moduli_[i];
            if (r.coords[i] < 0) r.coords[i] += moduli_[i];
        }
        return r;
    }

    GroupElement neg(const GroupElement& a) const { return sub(zero(), a); }

    GroupElement scale(std::int64_t k, const GroupElement& a) const {
        GroupElement r = zero();
        for (std::size_t i = 0; i < moduli_.size(); ++i) {
            std::int64_t c = (k % moduli_[i]) * (a.coords[i] % moduli_[i]) % moduli_[i];
            if (c < 0) c += moduli_[i];
            r.coords[i] = c;
        }
        return r;
    }

    std::int64_t index_of(const GroupElement& a) const {
        std::int64_t idx = 0;
        for (std::size_t i = 0; i < moduli_.size(); ++i) idx = idx * moduli_[i] + a.coords[i];
        return idx;
    }

    GroupElement element_at(std::int64_t idx) const {
        GroupElement a = zero();
        for (std::size_t i = moduli_.size(); i-- > 0;) {
            a.coords[i] = idx % moduli_[i];
            idx /= moduli_[i];
        }
        return a;
    }

    std::vector<GroupElement> all_elements() const {
        std::vector<GroupElement> out;
        out.reserve(static_cast<std::size_t>(order_));
        for (std::int64_t i = 0; i < order_; ++i) out.push_back(element_at(i));
        return out;
    }

    GroupElement generator(std::size_t i) const {
        GroupElement g = zero();
        g.coords[i] = moduli_[i] > 1 ? 1 : 0;
        return g;
    }

    mpz_class order_of(const GroupElement& a) const {
        mpz_class ord = 1;
        for (std::size_t i = 0; i < moduli_.size(); ++i) {
            std::int64_t m = moduli_[i] / std::gcd(moduli_[i], a.coords[i] == 0 ? moduli_[i] : a.coords[i]);
            mpz_class mm(static_cast<long>(m));
            mpz_lcm(ord.get_mpz_t(), ord.get_mpz_t(), mm.get_mpz_t());
        }
        return ord;
    }

    /// Subgroup generated by gens, as a sorted list of element indices.
    std::vector<std::int64_t> span(const std::vector<GroupElement>& gens) const {
        std::vector<char> seen(static_cast<std::size_t>(order_), 0);
        seen[static_cast<std::size_t>(index_of(zero()))] = 1;
        std::vector<GroupElement> frontier{zero()};
        while (!frontier.empty()) {
            std::vector<GroupElement> next;
            for (const auto& x : frontier)
                for (const auto& g : gens) {
                    GroupElement y = add(x, g);
                    auto idx = static_cast<std::size_t>(index_of(y));
                    if (!seen[idx]) {
                        seen[idx] = 1;
                        next.push_back(std::move(y));
                    }
                }
            frontier = std::move(next);
        }
        std::vector<std::int64_t> out;
        for (std::size_t i = 0; i < seen.size(); ++i)
            if (seen[i]) out.push_back(static_cast<std::int64_t>(i));
        return out;
    }

    /// |span(gens)| without materializing the elements.
    std::int64_t span_size(const std::vector<GroupElement>& gens) const {
        std::vector<char> seen(static_cast<std::size_t>(order_), 0);
        seen[static_cast<std::size_t>(index_of(zero()))] = 1;
        std::int64_t count = 1;
        std::vector<GroupElement> frontier{zero()};
        while (!frontier.empty()) {
            std::vector<GroupElement> next;
            for (const auto& x : frontier)
                for (const auto& g : gens) {
                    GroupElement y = add(x, g);
                    auto idx = static_cast<std::size_t>(index_of(y));
                    if (!seen[idx]) {
                        seen[idx] = 1;
                        ++count;
                        next.push_back(std::move(y));
                    }
                }
            frontier = std::move(next);
        }
        return count;
    }

    /// Abstract type of a subgroup given by its full element list, recovered
    /// from p^j-torsion counts: #{x : p^j x = 0} = p^{lambda'_1+...+lambda'_j}.
    AbelianGroupType subgroup_type(const std::vector<std::int64_t>& element_indices) const {
        mpz_class size(static_cast<long>(element_indices.size()));
        std::vector<PGroupType> sylows;
        for (const auto& [pz, e] : factorize(size)) {
            std::uint64_t p = pz.get_ui();
            std::vector<int> col_counts;  // lambda'_j
            unsigned prev = 0;
            for (unsigned j = 1;; ++j) {
                std::uint64_t pj = u64_pow(p, j);
                unsigned count = 0;
                for (auto idx : element_indices) {
                    GroupElement x = element_at(idx);
                    if (scale(static_cast<std::int64_t>(pj), x).is_zero()) ++count;
                }
                unsigned log = 0;
                for (unsigned c = count; c > 1; c /= static_cast<unsigned>(p)) ++log;
                int col = static_cast<int>(log - prev);
                if (col == 0) break;
                col_counts.push_back(col);
                prev = log;
            }
            Partition col(Partition(std::vector<int>(col_counts.begin(), col_counts.end())));
            sylows.emplace_back(p, col.transpose());
        }
        return AbelianGroupType::from_sylow_list(sylows);
    }

private:
    AbelianGroupType type_;
    std::vector<std::int64_t> moduli_;
    std::int64_t order_ = 1;
};

/// |Hom(G_mu, G_lambda)| = p^{sum_i mu'_i lambda'_i} for abelian p-groups.
inline mpz_class hom_count_p(const Partition& mu, const Partition& lambda, std::uint64_t p) {
    Partition mu_t = mu.transpose();
    Partition lambda_t = lambda.transpose();
    unsigned long exp = 0;
    std::size_t len = std::min(mu_t.length(), lambda_t.length());
    for (std::size_t i = 0; i < len; ++i)
        exp += static_cast<unsigned long>(mu_t.parts()[i]) * static_cast<unsigned long>(lambda_t.parts()[i]);
    return mpz_pow_u64(p, exp);
}

/// |Aut| of the abelian p-group of type lambda, in the closed form
///   p^{sum_i (lambda'_i)^2} * prod_i prod_{j=1}^{m_i} (1 - p^{-j}),
/// where m_i = lambda'_i - lambda'_{i+1} is the multiplicity of part i.
inline mpz_class aut_order(const PGroupType& g) {
    if (g.trivial()) return 1;
    Partition t = g.lambda.transpose();
    unsigned long sq = 0;
    for (int c : t.parts()) sq += static_cast<unsigned long>(c) * static_cast<unsigned long>(c);
    mpz_class result = 1;
    unsigned long correction = 0;
    for (std::size_t i = 0; i < t.length(); ++i) {
        int mult = t.parts()[i] - (i + 1 < t.length() ? t.parts()[i + 1] : 0);
        for (int j = 1; j <= mult; ++j) {
            result *= mpz_pow_u64(g.p, static_cast<unsigned long>(j)) - 1;
            correction += static_cast<unsigned long>(j);
        }
    }
    return result * mpz_pow_u64(g.p, sq - correction);
}

/// |Aut| of a finite abelian group: the product over its Sylow subgroups.
inline mpz_class aut_order(const AbelianGroupType& g) {
    if (!g.is_finite()) throw std::domain_error("aut_order of an infinite group");
    mpz_class result = 1;
    for (auto p : g.primes()) result *= aut_order(g.sylow(p));
    return result;
}

/// |Hom(G, V)| for finite G (type known) and finite V.
inline mpz_class hom_count(const AbelianGroupType& g, const AbelianGroupType& v) {
    mpz_class result = 1;
    for (auto p : v.primes()) result *= hom_count_p(g.sylow(p).lambda, v.sylow(p).lambda, p);
    return result;
}

/// A subgroup of V: its elements (as GroupSpace indices), a small generating
/// set, and its abstract type.
struct Subgroup {
    std::vector<std::int64_t> elements;
    std::vector<GroupElement> generators;
    AbelianGroupType type;

    mpz_class order() const { return mpz_class(static_cast<long>(elements.size())); }
};

/// Complete duplicate-free subgroup list of V.  Cost is linear in
/// #subgroups * |V|, guarded by the enumeration budget.
inline std::vector<Subgroup> enumerate_subgroups(const AbelianGroupType& v,
                                                 std::size_t max_subgroups = 200000) {
    GroupSpace space(v);
    if (space.order() > 4096) throw budget_error("subgroup enumeration: group too large");
    std::map<std::vector<std::int64_t>, std::vector<GroupElement>> found;
    found[space.span({})] = {};
    std::vector<std::vector<std::int64_t>> frontier{space.span({})};
    std::vector<GroupElement> all = space.all_elements();
    while (!frontier.empty()) {
        std::vector<std::vector<std::int64_t>> next;
        for (const auto& elems : frontier) {
            const auto gens = found.at(elems);
            std::set<std::int64_t> inside(elems.begin(), elems.end());
            for (const auto& x : all) {
                if (inside.count(space.index_of(x))) continue;
                auto bigger_gens = gens;
                bigger_gens.push_back(x);
                auto bigger = space.span(bigger_gens);
                if (found.emplace(bigger, bigger_gens).second) {
                    next.push_back(bigger);
                    if (found.size() > max_subgroups) throw budget_error("subgroup enumeration budget exceeded");
                }
            }
        }
        frontier = std::move(next);
    }
    std::vector<Subgroup> out;
    out.reserve(found.size());
    for (auto& [elems, gens] : found)
        out.push_back(Subgroup{elems, gens, space.subgroup_type(elems)});
    return out;
}

namespace detail {

/// Moebius function of the subgroup lattice of V, indexed against the full
/// subgroup list; mu[i] = mu(W_i, V).
inline std::vector<mpz_class> lattice_moebius_to_top(const std::vector<Subgroup>& subs) {
    const std::size_t n = subs.size();
    // containment: W_i <= W_j  (element sets are sorted)
    std::vector<std::vector<std::size_t>> supersets(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            if (subs[i].elements.size() >= subs[j].elements.size()) continue;
            if (std::includes(subs[j].elements.begin(), subs[j].elements.end(),
                              subs[i].elements.begin(), subs[i].elements.end()))
                supersets[i].push_back(j);
        }
    std::size_t top = 0;
    for (std::size_t i = 0; i < n; ++i)
        if (subs[i].elements.size() > subs[top].elements.size()) top = i;
    // mu(W, V) = -sum_{W <= U < V} mu(U, V), computed from the top down.
    std::vector<mpz_class> mu(n, 0);
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return subs[a].elements.size() > subs[b].elements.size();
    });
    mu[top] = 1;
    for (auto i : order) {
        if (i == top) continue;
        mpz_class acc = 0;
        for (auto j : supersets[i]) acc += mu[j];
        mu[i] = -acc;
    }
    return mu;
}

}  // namespace detail

/// Cached subgroup lattice of V with the Moebius weights used by sur_count.
struct SubgroupLattice {
    std::vector<Subgroup> subgroups;
    std::vector<mpz_class> moebius_to_top;

    explicit SubgroupLattice(const AbelianGroupType& v)
        : subgroups(enumerate_subgroups(v)), moebius_to_top(detail::lattice_moebius_to_top(subgroups)) {}
};

/// |Sur(G, V)| by Moebius inversion over the subgroup lattice of V:
/// sum over W <= V of mu(W, V) |Hom(G, W)|.
inline mpz_class sur_count(const AbelianGroupType& g, const SubgroupLattice& lattice) {
    mpz_class total = 0;
    for (std::size_t i = 0; i < lattice.subgroups.size(); ++i) {
        if (lattice.moebius_to_top[i] == 0) continue;
        total += lattice.moebius_to_top[i] * hom_count(g, lattice.subgroups[i].type);
    }
    return total;
}

inline mpz_class sur_count(const AbelianGroupType& g, const AbelianGroupType& v) {
    if (v.is_trivial()) return 1;
    return sur_count(g, SubgroupLattice(v));
}

}  // namespace sandlab
