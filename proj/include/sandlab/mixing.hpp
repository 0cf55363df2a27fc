#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "sandlab/abelian.hpp"
#include "sandlab/numtheory.hpp"
#include "sandlab/tensor.hpp"

namespace sandlab {

/// Exact distribution over labeled outcomes; probabilities are rationals.
/// Keys are either outcome vectors (element indices per position) or class
/// count vectors, depending on the producer.
struct RationalDistribution {
    std::map<std::vector<long>, mpq_class> prob;

    mpq_class total_mass() const {
        mpq_class s = 0;
        for (const auto& [k, p] : prob) s += p;
        return s;
    }
};

/// d_inf(P, Q) = max over outcomes of |P - Q| (missing outcome = 0).
inline mpq_class d_infinity(const RationalDistribution& p, const RationalDistribution& q) {
    mpq_class best = 0;
    auto consider = [&](const mpq_class& a, const mpq_class& b) {
        mpq_class diff = a - b;
        if (diff < 0) diff = -diff;
        if (diff > best) best = diff;
    };
    for (const auto& [k, v] : p.prob) {
        auto it = q.prob.find(k);
        consider(v, it == q.prob.end() ? mpq_class(0) : it->second);
    }
    for (const auto& [k, v] : q.prob) {
        if (!p.prob.count(k)) consider(mpq_class(0), v);
    }
    return best;
}

inline double d_infinity(const std::map<std::string, double>& p, const std::map<std::string, double>& q) {
    double best = 0;
    for (const auto& [k, v] : p) {
        auto it = q.find(k);
        best = std::max(best, std::abs(v - (it == q.end() ? 0.0 : it->second)));
    }
    for (const auto& [k, v] : q)
        if (!p.count(k)) best = std::max(best, std::abs(v));
    return best;
}

/// Multiplicity vector m_q of a vector q in V^n.
struct VectorClass {
    std::vector<long> counts;  // indexed by element index of V

    long n() const {
        long s = 0;
        for (long c : counts) s += c;
        return s;
    }
};

inline VectorClass class_of(const GroupSpace& space, const std::vector<GroupElement>& q) {
    VectorClass c;
    c.counts.assign(static_cast<std::size_t>(space.order()), 0);
    for (const auto& x : q) ++c.counts[static_cast<std::size_t>(space.index_of(x))];
    return c;
}

/// |S(q)| = n! / prod m_q(c)!, the size of the permutation class.
inline mpz_class class_size(const VectorClass& c) {
    mpz_class size = factorial(static_cast<std::size_t>(c.n()));
    for (long m : c.counts) size /= factorial(static_cast<std::size_t>(m));
    return size;
}

/// Minimal coset Aff_q = base + <q_i - base> together with s(q).
struct AffineStructure {
    GroupElement base;                     // q_n
    std::vector<std::int64_t> subgroup;    // element indices of V_0, sorted
    GroupElement sum;                      // s(q)
};

inline AffineStructure aff_and_sum(const GroupSpace& space, const std::vector<GroupElement>& q) {
    if (q.empty()) throw std::invalid_argument("aff_and_sum: empty vector");
    AffineStructure out;
    out.base = q.back();
    std::vector<GroupElement> diffs;
    for (const auto& x : q) diffs.push_back(space.sub(x, out.base));
    out.subgroup = space.span(diffs);
    out.sum = space.zero();
    for (const auto& x : q) out.sum = space.add(out.sum, x);
    return out;
}

/// Does x lie in the coset d*base + V_0?
inline bool in_scaled_coset(const GroupSpace& space, const AffineStructure& aff, unsigned d,
                            const GroupElement& x) {
    GroupElement shifted = space.sub(x, space.scale(static_cast<std::int64_t>(d), aff.base));
    return std::binary_search(aff.subgroup.begin(), aff.subgroup.end(), space.index_of(shifted));
}

/// R(q,d) = { r in (d Aff_q)^n : s(r) = d s(q) } by direct enumeration.
inline std::vector<std::vector<GroupElement>> r_set(const GroupSpace& space,
                                                    const std::vector<GroupElement>& q, unsigned d,
                                                    long budget = 1 << 22) {
    const std::size_t n = q.size();
    double total = std::pow(static_cast<double>(space.order()), static_cast<double>(n));
    if (total > static_cast<double>(budget)) throw budget_error("r_set enumeration budget");
    AffineStructure aff = aff_and_sum(space, q);
    GroupElement target = space.scale(static_cast<std::int64_t>(d), aff.sum);

    std::vector<std::vector<GroupElement>> out;
    std::vector<GroupElement> r(n, space.zero());
    std::function<void(std::size_t, GroupElement)> rec = [&](std::size_t pos, GroupElement sum) {
        if (pos == n) {
            if (sum == target) out.push_back(r);
            return;
        }
        for (std::int64_t idx = 0; idx < space.order(); ++idx) {
            GroupElement x = space.element_at(idx);
            if (!in_scaled_coset(space, aff, d, x)) continue;
            r[pos] = x;
            rec(pos + 1, space.add(sum, x));
        }
    };
    rec(0, space.zero());
    return out;
}

/// R^S(q,d): additionally <q (x) r> must lie in I_2.
inline std::vector<std::vector<GroupElement>> r_set_symmetric(const GroupSpace& space,
                                                              const std::vector<GroupElement>& q,
                                                              unsigned d, long budget = 1 << 22) {
    TensorSquare ts(space.type());
    std::vector<std::vector<GroupElement>> out;
    for (auto& r : r_set(space, q, d, budget))
        if (in_i2(ts, tensor_pair_sum(ts, q, r))) out.push_back(std::move(r));
    return out;
}

/// Tuple profile: counts m(t) over t in V^h (directed; arity = h) or
/// V^{1+h} (matching; arity = 1+h, coordinate 0 is the q-side).
struct Profile {
    AbelianGroupType group;
    unsigned arity = 0;
    std::vector<long> counts;  // mixed-radix over |V|^arity, coordinate 0 fastest

    long total() const {
        long s = 0;
        for (long c : counts) s += c;
        return s;
    }

    /// marginal over {t : t_i = c}
    long marginal(const GroupSpace& space, unsigned i, long c) const {
        const long order = space.order();
        long stride = 1;
        for (unsigned t = 0; t < i; ++t) stride *= order;
        long s = 0;
        for (long idx = 0; idx < static_cast<long>(counts.size()); ++idx)
            if ((idx / stride) % order == c) s += counts[static_cast<std::size_t>(idx)];
        return s;
    }
};

namespace mixing_detail {

/// cell index -> coordinates in V^arity (coordinate 0 = idx % |V|)
inline std::vector<int> cell_coords(long idx, unsigned arity, long order) {
    std::vector<int> t(arity);
    for (unsigned i = 0; i < arity; ++i) {
        t[i] = static_cast<int>(idx % order);
        idx /= order;
    }
    return t;
}

}  // namespace mixing_detail

/// All profiles over V^h whose coordinate marginals equal m_q; test-scale.
inline std::vector<Profile> enumerate_directed_profiles(const GroupSpace& space, const VectorClass& mq,
                                                        unsigned h, long budget = 2000000) {
    const long order = space.order();
    const long n = mq.n();
    double cells_d = std::pow(static_cast<double>(order), static_cast<double>(h));
    if (cells_d > 4096.0) throw budget_error("profile space too large");
    const long cells = static_cast<long>(cells_d);
    std::vector<std::vector<int>> coords(static_cast<std::size_t>(cells));
    for (long t = 0; t < cells; ++t) coords[static_cast<std::size_t>(t)] = mixing_detail::cell_coords(t, h, order);

    std::vector<std::vector<long>> rem(h, std::vector<long>(static_cast<std::size_t>(order)));
    for (unsigned i = 0; i < h; ++i)
        for (long c = 0; c < order; ++c) rem[i][static_cast<std::size_t>(c)] = mq.counts[static_cast<std::size_t>(c)];

    std::vector<Profile> out;
    std::vector<long> counts(static_cast<std::size_t>(cells), 0);
    long visited = 0;
    std::function<void(long, long)> rec = [&](long cell, long left) {
        if (++visited > budget) throw budget_error("profile enumeration budget");
        if (cell == cells) {
            if (left == 0) out.push_back(Profile{space.type(), h, counts});
            return;
        }
        const auto& tc = coords[static_cast<std::size_t>(cell)];
        long cap = left;
        for (unsigned i = 0; i < h; ++i) cap = std::min(cap, rem[i][static_cast<std::size_t>(tc[i])]);
        for (long v = 0; v <= cap; ++v) {
            if (v > 0)
                for (unsigned i = 0; i < h; ++i) rem[i][static_cast<std::size_t>(tc[i])] -= 1;
            counts[static_cast<std::size_t>(cell)] = v;
            rec(cell + 1, left - v);
        }
        counts[static_cast<std::size_t>(cell)] = 0;
        for (long v = cap; v > 0; --v)
            for (unsigned i = 0; i < h; ++i) rem[i][static_cast<std::size_t>(tc[i])] += 1;
    };
    rec(0, n);
    return out;
}

/// Law of P_1 q + ... + P_h q for independent uniform permutations P_i,
/// evaluated from the exact factorial formula: over all nonnegative integral
/// profiles m with coordinate marginals m(tau_i = c) = m_q(c),
///   P(sum = r) = sum_m [ prod_c m_r(c)! / prod_t m(t)! ] / (n!/prod_c m_q(c)!)^h
/// where m_r is the tau_Sigma marginal of m.  The profile search is
/// depth-first with running marginal budgets; a cell is abandoned as soon as
/// a coordinate budget is exhausted.
///
/// Returns the per-vector probability indexed by the class m_r.
inline RationalDistribution exact_class_dist_directed(const GroupSpace& space,
                                                      const VectorClass& mq, unsigned h,
                                                      long budget = 200000000) {
    const long order = space.order();
    const long n = mq.n();
    double cells_d = std::pow(static_cast<double>(order), static_cast<double>(h));
    if (cells_d > 4096.0) throw budget_error("profile space too large");
    const long cells = static_cast<long>(cells_d);

    // precomputed coordinates and addition table
    std::vector<std::vector<int>> coords(static_cast<std::size_t>(cells));
    std::vector<int> sums(static_cast<std::size_t>(cells));
    for (long t = 0; t < cells; ++t) {
        coords[static_cast<std::size_t>(t)] = mixing_detail::cell_coords(t, h, order);
        GroupElement acc = space.zero();
        for (int c : coords[static_cast<std::size_t>(t)]) acc = space.add(acc, space.element_at(c));
        sums[static_cast<std::size_t>(t)] = static_cast<int>(space.index_of(acc));
    }
    // tightest-first ordering: cells whose coordinates hit scarce values first
    std::vector<long> cell_order(static_cast<std::size_t>(cells));
    std::iota(cell_order.begin(), cell_order.end(), 0);
    std::sort(cell_order.begin(), cell_order.end(), [&](long a, long b) {
        long sa = 0, sb = 0;
        for (int c : coords[static_cast<std::size_t>(a)]) sa += mq.counts[static_cast<std::size_t>(c)];
        for (int c : coords[static_cast<std::size_t>(b)]) sb += mq.counts[static_cast<std::size_t>(c)];
        return sa < sb;
    });

    std::vector<std::vector<long>> rem(h, std::vector<long>(static_cast<std::size_t>(order)));
    for (unsigned i = 0; i < h; ++i)
        for (long c = 0; c < order; ++c) rem[i][static_cast<std::size_t>(c)] = mq.counts[static_cast<std::size_t>(c)];

    std::map<std::vector<long>, mpq_class> acc;  // m_r class -> sum of 1/prod m(t)!
    std::vector<long> mr(static_cast<std::size_t>(order), 0);
    long visited = 0;

    std::function<void(std::size_t, long, mpq_class)> rec = [&](std::size_t pos, long left, mpq_class inv) {
        if (++visited > budget) throw budget_error("profile enumeration budget");
        if (pos == cell_order.size()) {
            if (left == 0) acc[mr] += inv;
            return;
        }
        long t = cell_order[pos];
        const auto& tc = coords[static_cast<std::size_t>(t)];
        long cap = left;
        for (unsigned i = 0; i < h; ++i) cap = std::min(cap, rem[i][static_cast<std::size_t>(tc[i])]);
        for (long v = 0; v <= cap; ++v) {
            if (v > 0) {
                for (unsigned i = 0; i < h; ++i) rem[i][static_cast<std::size_t>(tc[i])] -= 1;
                mr[static_cast<std::size_t>(sums[static_cast<std::size_t>(t)])] += 1;
            }
            rec(pos + 1, left - v, inv / factorial(static_cast<std::size_t>(v)));
        }
        for (long v = cap; v > 0; --v) {
            for (unsigned i = 0; i < h; ++i) rem[i][static_cast<std::size_t>(tc[i])] += 1;
            mr[static_cast<std::size_t>(sums[static_cast<std::size_t>(t)])] -= 1;
        }
    };
    rec(0, n, mpq_class(1));

    mpz_class tuples = 1;
    mpz_class per_perm = class_size(mq);
    for (unsigned i = 0; i < h; ++i) tuples *= per_perm;

    RationalDistribution out;
    for (auto& [cls, sum_inv] : acc) {
        mpq_class p = sum_inv;
        for (long c : cls) p *= factorial(static_cast<std::size_t>(c));
        p /= tuples;
        p.canonicalize();
        if (p != 0) out.prob[cls] = p;
    }
    return out;
}

/// Vector-level version: probability of each r in V^n (enumeration budget).
inline RationalDistribution exact_dist_directed(const GroupSpace& space,
                                                const std::vector<GroupElement>& q, unsigned h,
                                                long budget = 1 << 22) {
    VectorClass mq = class_of(space, q);
    RationalDistribution classes = exact_class_dist_directed(space, mq, h);
    const std::size_t n = q.size();
    double total = std::pow(static_cast<double>(space.order()), static_cast<double>(n));
    if (total > static_cast<double>(budget)) throw budget_error("vector enumeration budget");

    RationalDistribution out;
    std::vector<long> r(n, 0);
    for (;;) {
        std::vector<long> cls(static_cast<std::size_t>(space.order()), 0);
        for (long x : r) ++cls[static_cast<std::size_t>(x)];
        auto it = classes.prob.find(cls);
        if (it != classes.prob.end() && it->second != 0) out.prob[r] = it->second;
        std::size_t pos = 0;
        while (pos < n && ++r[pos] == space.order()) r[pos++] = 0;
        if (pos == n) break;
    }
    return out;
}

/// Law of M_1 q + ... + M_h q for independent uniform perfect matchings,
/// from the matching factorial formula: profiles live on V^{1+h} with
/// coordinate 0 carrying q, subject to the pairing symmetry
/// m(tau_0=a, tau_i=b) = m(tau_0=b, tau_i=a) and evenness of the diagonal
/// blocks; each matching contributes its block matching counts
///   prod_a (m_aa - 1)!! * prod_{a<b} m_ab!
/// against the total n!/(2^{n/2}(n/2)!).  The square roots of the paper's
/// formula are grouped over unordered pairs so every term stays rational.
///
/// Returns per-vector probabilities indexed by the joint class m_{q,r}
/// (flattened |V| x |V|, rows = q value).
inline RationalDistribution exact_class_dist_matching(const GroupSpace& space,
                                                      const VectorClass& mq, unsigned h,
                                                      long budget = 200000000) {
    const long order = space.order();
    const long n = mq.n();
    if (n % 2 != 0) throw std::invalid_argument("matching model needs even n");
    const unsigned arity = 1 + h;
    double cells_d = std::pow(static_cast<double>(order), static_cast<double>(arity));
    if (cells_d > 4096.0) throw budget_error("profile space too large");
    const long cells = static_cast<long>(cells_d);

    std::vector<std::vector<int>> coords(static_cast<std::size_t>(cells));
    std::vector<int> sums(static_cast<std::size_t>(cells));  // tau_Sigma excludes coordinate 0
    for (long t = 0; t < cells; ++t) {
        coords[static_cast<std::size_t>(t)] = mixing_detail::cell_coords(t, arity, order);
        GroupElement acc = space.zero();
        for (unsigned i = 1; i < arity; ++i)
            acc = space.add(acc, space.element_at(coords[static_cast<std::size_t>(t)][i]));
        sums[static_cast<std::size_t>(t)] = static_cast<int>(space.index_of(acc));
    }
    std::vector<long> cell_order(static_cast<std::size_t>(cells));
    std::iota(cell_order.begin(), cell_order.end(), 0);
    std::sort(cell_order.begin(), cell_order.end(), [&](long a, long b) {
        long sa = 0, sb = 0;
        for (int c : coords[static_cast<std::size_t>(a)]) sa += mq.counts[static_cast<std::size_t>(c)];
        for (int c : coords[static_cast<std::size_t>(b)]) sb += mq.counts[static_cast<std::size_t>(c)];
        return sa < sb;
    });

    // marginal budgets for every coordinate including the q side
    std::vector<std::vector<long>> rem(arity, std::vector<long>(static_cast<std::size_t>(order)));
    for (unsigned i = 0; i < arity; ++i)
        for (long c = 0; c < order; ++c) rem[i][static_cast<std::size_t>(c)] = mq.counts[static_cast<std::size_t>(c)];

    // pair blocks per matching index i >= 1: block[i-1][a][b] = m(tau_0=a, tau_i=b)
    std::vector<std::vector<long>> block(h, std::vector<long>(static_cast<std::size_t>(order * order), 0));
    std::vector<long> joint(static_cast<std::size_t>(order * order), 0);  // m(tau_0=a, tau_Sigma=c)

    std::map<std::vector<long>, mpq_class> acc;
    long visited = 0;

    std::function<void(std::size_t, long, mpq_class)> rec = [&](std::size_t pos, long left, mpq_class inv) {
        if (++visited > budget) throw budget_error("profile enumeration budget");
        if (pos == cell_order.size()) {
            if (left != 0) return;
            // pairing symmetry and even diagonal per matching
            mpq_class weight = inv;
            for (unsigned i = 0; i < h; ++i) {
                const auto& blk = block[i];
                for (long a = 0; a < order; ++a) {
                    long diag = blk[static_cast<std::size_t>(a * order + a)];
                    if (diag % 2 != 0) return;
                    weight *= perfect_matching_count(static_cast<std::size_t>(diag));
                    for (long b = a + 1; b < order; ++b) {
                        if (blk[static_cast<std::size_t>(a * order + b)] !=
                            blk[static_cast<std::size_t>(b * order + a)])
                            return;
                        weight *= factorial(static_cast<std::size_t>(blk[static_cast<std::size_t>(a * order + b)]));
                    }
                }
            }
            acc[joint] += weight;
            return;
        }
        long t = cell_order[pos];
        const auto& tc = coords[static_cast<std::size_t>(t)];
        long cap = left;
        for (unsigned i = 0; i < arity; ++i) cap = std::min(cap, rem[i][static_cast<std::size_t>(tc[i])]);
        const long a0 = tc[0];
        const long jidx = a0 * order + sums[static_cast<std::size_t>(t)];
        for (long v = 0; v <= cap; ++v) {
            if (v > 0) {
                for (unsigned i = 0; i < arity; ++i) rem[i][static_cast<std::size_t>(tc[i])] -= 1;
                for (unsigned i = 1; i < arity; ++i)
                    block[i - 1][static_cast<std::size_t>(a0 * order + tc[i])] += 1;
                joint[static_cast<std::size_t>(jidx)] += 1;
            }
            rec(pos + 1, left - v, inv / factorial(static_cast<std::size_t>(v)));
        }
        for (long v = cap; v > 0; --v) {
            for (unsigned i = 0; i < arity; ++i) rem[i][static_cast<std::size_t>(tc[i])] += 1;
            for (unsigned i = 1; i < arity; ++i)
                block[i - 1][static_cast<std::size_t>(a0 * order + tc[i])] -= 1;
            joint[static_cast<std::size_t>(jidx)] -= 1;
        }
    };
    rec(0, n, mpq_class(1));

    mpz_class matchings_h = 1;
    mpz_class per_matching = perfect_matching_count(static_cast<std::size_t>(n));
    for (unsigned i = 0; i < h; ++i) matchings_h *= per_matching;

    RationalDistribution out;
    for (auto& [cls, sum_w] : acc) {
        mpq_class p = sum_w;
        for (long c : cls) p *= factorial(static_cast<std::size_t>(c));
        p /= matchings_h;
        p.canonicalize();
        if (p != 0) out.prob[cls] = p;
    }
    return out;
}

inline RationalDistribution exact_dist_matching(const GroupSpace& space,
                                                const std::vector<GroupElement>& q, unsigned h,
                                                long budget = 1 << 22) {
    VectorClass mq = class_of(space, q);
    RationalDistribution classes = exact_class_dist_matching(space, mq, h);
    const std::size_t n = q.size();
    const long order = space.order();
    double total = std::pow(static_cast<double>(order), static_cast<double>(n));
    if (total > static_cast<double>(budget)) throw budget_error("vector enumeration budget");

    RationalDistribution out;
    std::vector<long> r(n, 0);
    for (;;) {
        std::vector<long> cls(static_cast<std::size_t>(order * order), 0);
        for (std::size_t i = 0; i < n; ++i)
            ++cls[static_cast<std::size_t>(space.index_of(q[i]) * order + r[i])];
        auto it = classes.prob.find(cls);
        if (it != classes.prob.end() && it->second != 0) out.prob[r] = it->second;
        std::size_t pos = 0;
        while (pos < n && ++r[pos] == order) r[pos++] = 0;
        if (pos == n) break;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Class-level convolution engines.  The models are sums of h independent
// identically distributed steps (a permuted copy of q, resp. a matched copy),
// and the per-vector probability is constant across the class m_w (directed)
// or m_{q,w} (matching).  Convolving class by class keeps the computation
// exact and polynomial in n.  These are the engines behind total_mixing_gap;
// they agree with the factorial-formula engines wherever both run.
// ---------------------------------------------------------------------------

namespace mixing_detail {

inline mpz_class multinomial(long total, const std::vector<long>& parts) {
    mpz_class r = factorial(static_cast<std::size_t>(total));
    for (long p : parts) r /= factorial(static_cast<std::size_t>(p));
    return r;
}

/// size of the class of vectors with pair profile J given m_q: per q-value a,
/// choose which positions carry each w-value.
inline mpz_class pair_class_size(const VectorClass& mq, const std::vector<long>& joint, long order) {
    mpz_class size = 1;
    for (long a = 0; a < order; ++a) {
        std::vector<long> row(joint.begin() + a * order, joint.begin() + (a + 1) * order);
        size *= multinomial(mq.counts[static_cast<std::size_t>(a)], row);
    }
    return size;
}

/// number of matching permutations sending the class pattern J:
/// J must be symmetric with even diagonal; product of within-block matchings
/// and cross-block bijections.
inline mpz_class matching_count(const std::vector<long>& joint, long order) {
    mpz_class count = 1;
    for (long a = 0; a < order; ++a) {
        long diag = joint[static_cast<std::size_t>(a * order + a)];
        if (diag % 2 != 0) return 0;
        count *= perfect_matching_count(static_cast<std::size_t>(diag));
        for (long b = a + 1; b < order; ++b) {
            if (joint[static_cast<std::size_t>(a * order + b)] != joint[static_cast<std::size_t>(b * order + a)])
                return 0;
            count *= factorial(static_cast<std::size_t>(joint[static_cast<std::size_t>(a * order + b)]));
        }
    }
    return count;
}

}  // namespace mixing_detail

/// Exact law of A^{(h)} q over classes m_w, by convolution: one step adds an
/// independent permuted copy of q, and the transition between classes is a
/// sum over |V| x |V| transfer tables.
inline RationalDistribution directed_class_law(const GroupSpace& space, const VectorClass& mq,
                                               unsigned h) {
    const long order = space.order();
    const long n = mq.n();
    mpz_class perm_count = class_size(mq);

    RationalDistribution rho;
    rho.prob[mq.counts] = 1;

    // difference table: diff[a][b] = index of element(a) - element(b)
    std::vector<long> diff(static_cast<std::size_t>(order * order));
    for (long a = 0; a < order; ++a)
        for (long b = 0; b < order; ++b)
            diff[static_cast<std::size_t>(a * order + b)] =
                space.index_of(space.sub(space.element_at(a), space.element_at(b)));

    for (unsigned step = 1; step < h; ++step) {
        RationalDistribution next;
        for (const auto& [prev_cls, rho_prev] : rho.prob) {
            mpq_class per_vector = rho_prev / mixing_detail::multinomial(n, prev_cls);
            // transfer table T(a,b) = #positions with new value a, old value b;
            // column sums = prev class, difference marginals = m_q.
            std::vector<long> table(static_cast<std::size_t>(order * order), 0);
            std::vector<long> col_left = prev_cls;
            std::vector<long> diff_left = mq.counts;
            std::vector<long> new_cls(static_cast<std::size_t>(order), 0);
            std::function<void(long)> rec = [&](long cell) {
                if (cell == order * order) {
                    for (long b = 0; b < order; ++b)
                        if (col_left[static_cast<std::size_t>(b)] != 0) return;
                    // per-vector contribution for a new vector of class B:
                    //   prev per-vector * #{old w consistent with T} * P(one step)
                    mpq_class w = per_vector;
                    for (long a = 0; a < order; ++a) {
                        std::vector<long> row(table.begin() + a * order, table.begin() + (a + 1) * order);
                        w *= mixing_detail::multinomial(new_cls[static_cast<std::size_t>(a)], row);
                    }
                    w /= perm_count;  // P(permuted copy = fixed difference vector)
                    next.prob[new_cls] += w * mixing_detail::multinomial(n, new_cls);
                    return;
                }
                long a = cell / order, b = cell % order;
                long d = diff[static_cast<std::size_t>(cell)];
                long cap = std::min(col_left[static_cast<std::size_t>(b)], diff_left[static_cast<std::size_t>(d)]);
                for (long v = 0; v <= cap; ++v) {
                    table[static_cast<std::size_t>(cell)] = v;
                    col_left[static_cast<std::size_t>(b)] -= v;
                    diff_left[static_cast<std::size_t>(d)] -= v;
                    new_cls[static_cast<std::size_t>(a)] += v;
                    rec(cell + 1);
                    col_left[static_cast<std::size_t>(b)] += v;
                    diff_left[static_cast<std::size_t>(d)] += v;
                    new_cls[static_cast<std::size_t>(a)] -= v;
                }
                table[static_cast<std::size_t>(cell)] = 0;
            };
            rec(0);
        }
        for (auto& [k, v] : next.prob) v.canonicalize();
        rho = std::move(next);
    }
    return rho;  // class totals; per-vector = rho(cls) / multinomial(n, cls)
}

/// Exact law of C^{(h)} q over joint classes m_{q,w}, by convolution with
/// matching steps; transitions run over |V|^3 transfer tables.
inline RationalDistribution matching_class_law(const GroupSpace& space, const VectorClass& mq,
                                               unsigned h) {
    const long order = space.order();
    const long n = mq.n();
    if (n % 2 != 0) throw std::invalid_argument("matching model needs even n");
    mpz_class total_matchings = perfect_matching_count(static_cast<std::size_t>(n));

    // step 1: law of M q over joint classes
    RationalDistribution rho;
    {
        std::vector<long> joint(static_cast<std::size_t>(order * order), 0);
        std::function<void(long)> enumerate_joint = [&](long cell) {
            if (cell == order * order) {
                mpz_class mc = mixing_detail::matching_count(joint, order);
                if (mc == 0) return;
                mpq_class p(mc, total_matchings);
                p *= mixing_detail::pair_class_size(mq, joint, order);
                p.canonicalize();
                rho.prob[joint] += p;
                return;
            }
            long a = cell / order;
            long used = 0;
            for (long b = 0; b < order; ++b) used += joint[static_cast<std::size_t>(a * order + b)];
            long cap = mq.counts[static_cast<std::size_t>(a)] - used;
            bool last_in_row = (cell % order) == order - 1;
            if (last_in_row) {
                joint[static_cast<std::size_t>(cell)] = cap;
                enumerate_joint(cell + 1);
                joint[static_cast<std::size_t>(cell)] = 0;
                return;
            }
            for (long v = 0; v <= cap; ++v) {
                joint[static_cast<std::size_t>(cell)] = v;
                enumerate_joint(cell + 1);
            }
            joint[static_cast<std::size_t>(cell)] = 0;
        };
        enumerate_joint(0);
    }

    for (unsigned step = 1; step < h; ++step) {
        RationalDistribution next;
        for (const auto& [prev_joint, rho_prev] : rho.prob) {
            mpq_class per_vector = rho_prev / mixing_detail::pair_class_size(mq, prev_joint, order);
            // T(a,b,c): q=a, old=b, new=c; marginal over c = prev_joint(a,b)
            std::vector<long> t3(static_cast<std::size_t>(order * order * order), 0);
            std::function<void(long)> rec = [&](long cell) {
                if (cell == order * order * order) {
                    std::vector<long> new_joint(static_cast<std::size_t>(order * order), 0);
                    std::vector<long> step_joint(static_cast<std::size_t>(order * order), 0);
                    for (long a = 0; a < order; ++a)
                        for (long b = 0; b < order; ++b)
                            for (long c = 0; c < order; ++c) {
                                long v = t3[static_cast<std::size_t>((a * order + b) * order + c)];
                                if (v == 0) continue;
                                new_joint[static_cast<std::size_t>(a * order + c)] += v;
                                long e = space.index_of(
                                    space.sub(space.element_at(c), space.element_at(b)));
                                step_joint[static_cast<std::size_t>(a * order + e)] += v;
                            }
                    mpz_class mc = mixing_detail::matching_count(step_joint, order);
                    if (mc == 0) return;
                    mpq_class w = per_vector * mpq_class(mc, total_matchings);
                    // choose which positions inside each (q=a, new=c) group carried old value b
                    for (long a = 0; a < order; ++a)
                        for (long c = 0; c < order; ++c) {
                            std::vector<long> parts;
                            for (long b = 0; b < order; ++b)
                                parts.push_back(t3[static_cast<std::size_t>((a * order + b) * order + c)]);
                            w *= mixing_detail::multinomial(new_joint[static_cast<std::size_t>(a * order + c)], parts);
                        }
                    next.prob[new_joint] += w * mixing_detail::pair_class_size(mq, new_joint, order);
                    return;
                }
                long ab = cell / order;
                long used = 0;
                for (long c = 0; c < order; ++c) used += t3[static_cast<std::size_t>(ab * order + c)];
                long cap = prev_joint[static_cast<std::size_t>(ab)] - used;
                bool last = (cell % order) == order - 1;
                if (last) {
                    t3[static_cast<std::size_t>(cell)] = cap;
                    rec(cell + 1);
                    t3[static_cast<std::size_t>(cell)] = 0;
                    return;
                }
                for (long v = 0; v <= cap; ++v) {
                    t3[static_cast<std::size_t>(cell)] = v;
                    rec(cell + 1);
                }
                t3[static_cast<std::size_t>(cell)] = 0;
            };
            rec(0);
        }
        for (auto& [k, v] : next.prob) v.canonicalize();
        rho = std::move(next);
    }
    return rho;  // per-vector = rho(J) / pair_class_size(mq, J)
}

/// All compositions of n over the elements of V (class vectors).
inline void for_each_composition(long n, long order, const std::function<void(const std::vector<long>&)>& f) {
    std::vector<long> cls(static_cast<std::size_t>(order), 0);
    std::function<void(long, long)> rec = [&](long pos, long left) {
        if (pos == order - 1) {
            cls[static_cast<std::size_t>(pos)] = left;
            f(cls);
            return;
        }
        for (long v = 0; v <= left; ++v) {
            cls[static_cast<std::size_t>(pos)] = v;
            rec(pos + 1, left - v);
        }
    };
    if (order > 0) rec(0, n);
}

enum class MixingModel { Directed, Matching };

/// sum over q in V^n of d_inf(model law on q, uniform law on R / R^S),
/// computed exactly over equivalence classes (classes of q weighted by
/// |S(q)|; outcome classes by m_r resp. m_{q,r}).
inline mpq_class total_mixing_gap(long n, const AbelianGroupType& v, unsigned d, MixingModel model) {
    GroupSpace space(v);
    const long order = space.order();
    TensorSquare ts(v);
    if (model == MixingModel::Matching && n % 2 != 0)
        throw std::invalid_argument("matching model needs even n");

    mpq_class total = 0;
    for_each_composition(n, order, [&](const std::vector<long>& qcls) {
        VectorClass mq{qcls};
        // representative q: elements in index order, used for Aff and tensor data
        std::vector<GroupElement> q;
        for (long c = 0; c < order; ++c)
            for (long k = 0; k < qcls[static_cast<std::size_t>(c)]; ++k) q.push_back(space.element_at(c));
        AffineStructure aff = aff_and_sum(space, q);
        GroupElement target_sum = space.scale(static_cast<std::int64_t>(d), aff.sum);

        mpq_class gap = 0;
        auto consider = [&](const mpq_class& model_p, const mpq_class& unif_p) {
            mpq_class diff = model_p - unif_p;
            if (diff < 0) diff = -diff;
            if (diff > gap) gap = diff;
        };

        if (model == MixingModel::Directed) {
            RationalDistribution rho = directed_class_law(space, mq, d);
            // R(q,d) classes and size
            std::map<std::vector<long>, bool> member;
            mpz_class r_size = 0;
            for_each_composition(n, order, [&](const std::vector<long>& rcls) {
                GroupElement sum = space.zero();
                bool ok = true;
                for (long c = 0; c < order && ok; ++c) {
                    long count = rcls[static_cast<std::size_t>(c)];
                    if (count == 0) continue;
                    if (!in_scaled_coset(space, aff, d, space.element_at(c))) ok = false;
                    sum = space.add(sum, space.scale(count, space.element_at(c)));
                }
                if (ok && sum == target_sum) {
                    member[rcls] = true;
                    r_size += mixing_detail::multinomial(n, rcls);
                }
            });
            mpq_class unif(1, r_size);
            unif.canonicalize();
            for (const auto& [cls, mass] : rho.prob) {
                mpq_class pv = mass / mixing_detail::multinomial(n, cls);
                consider(pv, member.count(cls) ? unif : mpq_class(0));
            }
            for (const auto& entry : member)
                if (!rho.prob.count(entry.first)) consider(mpq_class(0), unif);
        } else {
            RationalDistribution rho = matching_class_law(space, mq, d);
            // R^S(q,d) joint classes: row sums fixed to m_q
            std::map<std::vector<long>, bool> member;
            mpz_class r_size = 0;
            std::vector<long> joint(static_cast<std::size_t>(order * order), 0);
            std::function<void(long)> enum_joint = [&](long cell) {
                if (cell == order * order) {
                    GroupElement sum = space.zero();
                    std::vector<std::int64_t> tensor_coords(ts.side() * ts.side(), 0);
                    bool ok = true;
                    for (long a = 0; a < order && ok; ++a)
                        for (long b = 0; b < order && ok; ++b) {
                            long count = joint[static_cast<std::size_t>(a * order + b)];
                            if (count == 0) continue;
                            if (!in_scaled_coset(space, aff, d, space.element_at(b))) ok = false;
                            sum = space.add(sum, space.scale(count, space.element_at(b)));
                        }
                    if (!ok || !(sum == target_sum)) return;
                    // <q (x) r> from the class
                    TensorElement x = ts.zero();
                    for (long a = 0; a < order; ++a)
                        for (long b = 0; b < order; ++b) {
                            long count = joint[static_cast<std::size_t>(a * order + b)];
                            if (count == 0) continue;
                            TensorElement pure = ts.pure_tensor(space.element_at(a), space.element_at(b));
                            for (std::size_t cidx = 0; cidx < pure.coords.size(); ++cidx)
                                pure.coords[cidx] = pure.coords[cidx] * (count % ts.component_moduli()[cidx]) %
                                                    ts.component_moduli()[cidx];
                            x = ts.add(x, ts.reduce(std::move(pure.coords)));
                        }
                    if (!in_i2(ts, x)) return;
                    member[joint] = true;
                    r_size += mixing_detail::pair_class_size(mq, joint, order);
                }
                else {
                    long a = cell / order;
                    long used = 0;
                    for (long b = 0; b < order; ++b) used += joint[static_cast<std::size_t>(a * order + b)];
                    long cap = mq.counts[static_cast<std::size_t>(a)] - used;
                    bool last = (cell % order) == order - 1;
                    if (last) {
                        joint[static_cast<std::size_t>(cell)] = cap;
                        enum_joint(cell + 1);
                        joint[static_cast<std::size_t>(cell)] = 0;
                        return;
                    }
                    for (long v = 0; v <= cap; ++v) {
                        joint[static_cast<std::size_t>(cell)] = v;
                        enum_joint(cell + 1);
                    }
                    joint[static_cast<std::size_t>(cell)] = 0;
                }
            };
            enum_joint(0);
            mpq_class unif(1, r_size);
            unif.canonicalize();
            for (const auto& [cls, mass] : rho.prob) {
                mpq_class pv = mass / mixing_detail::pair_class_size(mq, cls, order);
                consider(pv, member.count(cls) ? unif : mpq_class(0));
            }
            for (const auto& entry : member)
                if (!rho.prob.count(entry.first)) consider(mpq_class(0), unif);
        }

        total += gap * class_size(mq);
    });
    total.canonicalize();
    return total;
}

/// ||m_q - n/|V| * 1||_inf < n^alpha.  The paper keeps 1/2 < alpha < 2/3;
/// out-of-range exponents are still evaluated and flagged through the
/// optional out-parameter.
inline bool is_alpha_typical(const VectorClass& mq, double exponent, bool* exponent_in_range = nullptr) {
    if (exponent_in_range) *exponent_in_range = exponent > 0.5 && exponent < 2.0 / 3.0;
    const double n = static_cast<double>(mq.n());
    const double mean = n / static_cast<double>(mq.counts.size());
    const double bound = std::pow(n, exponent);
    for (long c : mq.counts)
        if (std::abs(static_cast<double>(c) - mean) >= bound) return false;
    return true;
}

}  // namespace sandlab
