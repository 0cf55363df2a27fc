#pragma once

// Brute-force reference computations for the test suite.  Everything here is
// deliberately independent of the library's implementation paths: direct
// enumeration, gcds of minors, subset counting.

#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "sandlab/abelian.hpp"
#include "sandlab/bigmat.hpp"
#include "sandlab/graphs.hpp"

namespace oracles {

using sandlab::AbelianGroupType;
using sandlab::BigIntMatrix;
using sandlab::GroupElement;
using sandlab::GroupSpace;

/// Count maps G -> V given by generator images with the right order, i.e.
/// all homomorphisms, by full enumeration of image tuples.
inline long count_homs(const AbelianGroupType& g, const AbelianGroupType& v,
                       long budget = 20000000) {
    GroupSpace gs(g), vs(v);
    const auto& orders = g.invariant_factors();
    std::vector<std::vector<GroupElement>> candidates;
    long total = 1;
    for (const auto& a : orders) {
        std::vector<GroupElement> ok;
        for (const auto& x : vs.all_elements())
            if (vs.scale(a.get_si(), x).is_zero()) ok.push_back(x);
        total *= static_cast<long>(ok.size());
        if (total > budget) throw sandlab::budget_error("count_homs oracle budget");
        candidates.push_back(std::move(ok));
    }
    long count = 0;
    std::vector<std::size_t> idx(candidates.size(), 0);
    for (;;) {
        ++count;
        std::size_t pos = 0;
        while (pos < idx.size() && ++idx[pos] == candidates[pos].size()) idx[pos++] = 0;
        if (pos == idx.size()) break;
        if (idx.empty()) break;
    }
    return candidates.empty() ? 1 : count;
}

/// Count surjective homomorphisms by enumerating image tuples and testing
/// that the images generate V.
inline long count_surjections(const AbelianGroupType& g, const AbelianGroupType& v,
                              long budget = 20000000) {
    GroupSpace gs(g), vs(v);
    const auto& orders = g.invariant_factors();
    std::vector<std::vector<GroupElement>> candidates;
    long total = 1;
    for (const auto& a : orders) {
        std::vector<GroupElement> ok;
        for (const auto& x : vs.all_elements())
            if (vs.scale(a.get_si(), x).is_zero()) ok.push_back(x);
        total *= static_cast<long>(ok.size());
        if (total > budget) throw sandlab::budget_error("count_surjections oracle budget");
        candidates.push_back(std::move(ok));
    }
    if (candidates.empty()) return vs.order() == 1 ? 1 : 0;
    long count = 0;
    std::vector<std::size_t> idx(candidates.size(), 0);
    std::vector<GroupElement> images;
    for (;;) {
        images.clear();
        for (std::size_t i = 0; i < idx.size(); ++i) images.push_back(candidates[i][idx[i]]);
        if (vs.span_size(images) == vs.order()) ++count;
        std::size_t pos = 0;
        while (pos < idx.size() && ++idx[pos] == candidates[pos].size()) idx[pos++] = 0;
        if (pos == idx.size()) break;
    }
    return count;
}

/// |Aut(G)| as the number of surjective (= bijective) endomorphisms.
inline long count_automorphisms(const AbelianGroupType& g, long budget = 20000000) {
    return count_surjections(g, g, budget);
}

/// Determinantal-divisor route to the Smith form: D_i = gcd of all i x i
/// minors, d_i = D_i / D_{i-1}.  Minors by Bareiss over int64 (entries are
/// small in every use).
inline std::vector<long> determinantal_divisors(const std::vector<std::vector<long>>& m) {
    const std::size_t rows = m.size(), cols = rows ? m[0].size() : 0;
    const std::size_t nmin = std::min(rows, cols);

    auto det_int = [](std::vector<std::vector<long>> a) -> long {
        const std::size_t n = a.size();
        if (n == 0) return 1;
        long prev = 1;
        int sign = 1;
        for (std::size_t k = 0; k + 1 < n; ++k) {
            if (a[k][k] == 0) {
                std::size_t piv = k + 1;
                while (piv < n && a[piv][k] == 0) ++piv;
                if (piv == n) return 0;
                std::swap(a[k], a[piv]);
                sign = -sign;
            }
            for (std::size_t i = k + 1; i < n; ++i)
                for (std::size_t j = k + 1; j < n; ++j)
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            prev = a[k][k];
        }
        return sign * a[n - 1][n - 1];
    };

    std::vector<long> dd;  // D_1, D_2, ... until gcd hits 0
    for (std::size_t size = 1; size <= nmin; ++size) {
        std::vector<std::size_t> ri(size), ci(size);
        std::iota(ri.begin(), ri.end(), 0);
        long g = 0;
        for (;;) {  // row subsets
            std::iota(ci.begin(), ci.end(), 0);
            for (;;) {  // column subsets
                std::vector<std::vector<long>> sub(size, std::vector<long>(size));
                for (std::size_t i = 0; i < size; ++i)
                    for (std::size_t j = 0; j < size; ++j) sub[i][j] = m[ri[i]][ci[j]];
                g = std::gcd(g, det_int(sub));
                // next column combination
                std::size_t k = size;
                while (k-- > 0) {
                    if (ci[k] + (size - k) < cols) {
                        ++ci[k];
                        for (std::size_t l = k + 1; l < size; ++l) ci[l] = ci[l - 1] + 1;
                        break;
                    }
                    if (k == 0) goto cols_done;
                }
                if (size == 0) break;
            }
        cols_done:;
            std::size_t k = size;
            bool advanced = false;
            while (k-- > 0) {
                if (ri[k] + (size - k) < rows) {
                    ++ri[k];
                    for (std::size_t l = k + 1; l < size; ++l) ri[l] = ri[l - 1] + 1;
                    advanced = true;
                    break;
                }
            }
            if (!advanced) break;
        }
        if (g == 0) break;
        dd.push_back(std::abs(g));
    }
    std::vector<long> invariant;
    long prev = 1;
    for (long d : dd) {
        invariant.push_back(d / prev);
        prev = d;
    }
    return invariant;  // d_1, ..., d_rank
}

/// Literal quotient-group computation for a square nonsingular integer
/// matrix with small determinant: cokernel = (Z/m)^c / <rows>, m = |det|;
/// the abelian type is read off p^j-torsion counts.
inline AbelianGroupType quotient_group_by_enumeration(const BigIntMatrix& mat, long size_budget = 2000000) {
    mpz_class det = sandlab::determinant(mat);
    if (det == 0) throw std::invalid_argument("quotient oracle needs a nonsingular matrix");
    if (!det.fits_slong_p()) throw sandlab::budget_error("quotient oracle budget");
    long m = std::abs(det.get_si());
    const std::size_t c = mat.cols();
    double total = 1;
    for (std::size_t i = 0; i < c; ++i) total *= static_cast<double>(m);
    if (total > static_cast<double>(size_budget)) throw sandlab::budget_error("quotient oracle budget");

    auto encode = [&](const std::vector<long>& x) {
        long idx = 0;
        for (long v : x) idx = idx * m + v;
        return idx;
    };
    // span of the rows inside (Z/m)^c
    std::set<long> span;
    std::vector<std::vector<long>> frontier;
    std::vector<long> zero(c, 0);
    span.insert(encode(zero));
    frontier.push_back(zero);
    std::vector<std::vector<long>> gens;
    for (std::size_t i = 0; i < mat.rows(); ++i) {
        std::vector<long> row(c);
        for (std::size_t j = 0; j < c; ++j) {
            mpz_class r = mat(i, j) % m;
            if (r < 0) r += m;
            row[j] = r.get_si();
        }
        gens.push_back(row);
    }
    while (!frontier.empty()) {
        std::vector<std::vector<long>> next;
        for (const auto& x : frontier)
            for (const auto& g : gens) {
                std::vector<long> y(c);
                for (std::size_t j = 0; j < c; ++j) y[j] = (x[j] + g[j]) % m;
                if (span.insert(encode(y)).second) next.push_back(y);
            }
        frontier = std::move(next);
    }

    // #{x in quotient : k x = 0} = #{x in (Z/m)^c : k x in span} / |span|
    auto torsion_count = [&](long k) {
        long count = 0;
        std::vector<long> x(c, 0);
        for (;;) {
            std::vector<long> kx(c);
            for (std::size_t j = 0; j < c; ++j) kx[j] = (x[j] * (k % m)) % m;
            if (span.count(encode(kx))) ++count;
            std::size_t pos = 0;
            while (pos < c && ++x[pos] == m) x[pos++] = 0;
            if (pos == c) break;
        }
        return count / static_cast<long>(span.size());
    };

    std::vector<sandlab::PGroupType> sylows;
    for (const auto& [pz, e] : sandlab::factorize(mpz_class(m))) {
        std::uint64_t p = pz.get_ui();
        std::vector<int> cols_profile;
        long prev_count = 1;
        for (unsigned j = 1;; ++j) {
            long pj = 1;
            for (unsigned t = 0; t < j; ++t) pj *= static_cast<long>(p);
            long count = torsion_count(pj % m == 0 ? m : pj);
            if (count == prev_count) break;
            unsigned log = 0;
            for (long q = count / prev_count; q > 1; q /= static_cast<long>(p)) ++log;
            cols_profile.push_back(static_cast<int>(log));
            prev_count = count;
        }
        sylows.emplace_back(p, sandlab::Partition(std::vector<int>(cols_profile.begin(), cols_profile.end())).transpose());
    }
    return AbelianGroupType::from_sylow_list(sylows);
}

/// Number of spanning arborescences oriented towards `root`: every other
/// vertex picks one outgoing edge (multiplicities count), keep the acyclic
/// selections.
inline mpz_class count_arborescences(const sandlab::DirectedMultigraph& g, std::size_t root) {
    std::vector<std::vector<std::size_t>> choices(g.n);
    for (std::size_t i = 0; i < g.n; ++i) {
        if (i == root) continue;
        for (std::size_t j = 0; j < g.n; ++j)
            for (std::uint32_t c = 0; c < g.mult(i, j); ++c) choices[i].push_back(j);
        if (choices[i].empty()) return 0;
    }
    std::vector<std::size_t> pick(g.n, 0);
    mpz_class count = 0;
    for (;;) {
        bool good = true;
        for (std::size_t start = 0; start < g.n && good; ++start) {
            std::size_t v = start;
            std::size_t steps = 0;
            while (v != root && steps++ <= g.n) v = choices[v][pick[v]];
            if (v != root) good = false;
        }
        if (good) ++count;
        std::size_t pos = 0;
        while (pos < g.n) {
            if (pos == root || choices[pos].empty()) {
                ++pos;
                continue;
            }
            if (++pick[pos] < choices[pos].size()) break;
            pick[pos++] = 0;
        }
        if (pos == g.n) break;
    }
    return count;
}

/// Number of spanning trees, parallel edges distinct, by subset enumeration.
inline mpz_class count_spanning_trees(const sandlab::UndirectedMultigraph& g) {
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (std::size_t i = 0; i < g.n; ++i)
        for (std::size_t j = i + 1; j < g.n; ++j)
            for (std::uint32_t c = 0; c < g.mult(i, j); ++c) edges.emplace_back(i, j);
    if (g.n == 0) return 0;
    const std::size_t need = g.n - 1;
    if (edges.size() < need) return 0;
    std::vector<std::size_t> idx(need);
    std::iota(idx.begin(), idx.end(), 0);
    mpz_class count = 0;
    for (;;) {
        std::vector<std::size_t> parent(g.n);
        std::iota(parent.begin(), parent.end(), 0);
        std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
            while (parent[x] != x) x = parent[x] = parent[parent[x]];
            return x;
        };
        bool acyclic = true;
        for (auto e : idx) {
            auto [u, v] = edges[e];
            auto ru = find(u), rv = find(v);
            if (ru == rv) {
                acyclic = false;
                break;
            }
            parent[ru] = rv;
        }
        if (acyclic) ++count;
        std::size_t k = need;
        bool advanced = false;
        while (k-- > 0) {
            if (idx[k] + (need - k) < edges.size()) {
                ++idx[k];
                for (std::size_t l = k + 1; l < need; ++l) idx[l] = idx[l - 1] + 1;
                advanced = true;
                break;
            }
        }
        if (!advanced) break;
    }
    return count;
}

}  // namespace oracles
