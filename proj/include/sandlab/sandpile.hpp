#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "sandlab/graphs.hpp"
#include "sandlab/snf.hpp"

namespace sandlab {

struct disconnected_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SandpileResult {
    AbelianGroupType group;
    double torsion_order_log = 0.0;  // natural log of |tors|
    bool connected = true;
    bool truncation_flag = false;
};

inline double log_of_mpz(const mpz_class& n) {
    signed long exp = 0;
    double d = mpz_get_d_2exp(&exp, n.get_mpz_t());
    return std::log(std::abs(d)) + static_cast<double>(exp) * std::log(2.0);
}

/// Sandpile group Z^{n-1} / RowSpace(reduced Laplacian), full type via
/// integer Smith normal form.  Small-graph scale; the Monte Carlo paths use
/// sylow_of_sandpile / log_torsion instead.
template <typename Graph>
SandpileResult sandpile_group(const Graph& g) {
    if (g.n < 2) throw std::invalid_argument("sandpile_group: need n >= 2");
    SandpileResult out;
    out.connected = is_strongly_connected(g);
    out.group = cokernel_type(reduced_laplacian(g));
    out.torsion_order_log = log_of_mpz(out.group.torsion_order());
    return out;
}

/// p-Sylow type of the sandpile group from elimination mod p^k; flags any
/// exponent that hits the cap k (possible truncation).
template <typename Graph>
PGroupType sylow_of_sandpile(const Graph& g, std::uint64_t p, unsigned k, bool* truncated = nullptr) {
    if (!is_strongly_connected(g)) throw disconnected_error("sylow_of_sandpile: graph not connected");
    auto exps = snf_mod_pk(reduced_laplacian(g), p, k);
    return pgroup_from_exponents(p, exps, k, truncated);
}

/// Total sandpile group Z_0^n / RowSpace(Delta) of a directed graph:
/// the Laplacian rows, written in the basis e_i - e_n of Z_0^n, are the
/// Laplacian with its last column deleted.
inline AbelianGroupType total_sandpile_group(const DirectedMultigraph& g) {
    BigIntMatrix full = laplacian(g);
    BigIntMatrix m(full.rows(), full.cols() - 1);
    for (std::size_t i = 0; i < full.rows(); ++i)
        for (std::size_t j = 0; j + 1 < full.cols(); ++j) m(i, j) = full(i, j);
    return cokernel_type(m);
}

/// log |tors(Gamma)|.  For each connected component one vertex is deleted
/// from the Laplacian; the determinant of the result is the torsion order
/// (for one component this is the Matrix-Tree count).  Directed graphs that
/// are not strongly connected fall back to the full Smith normal form.
template <typename Graph>
double log_torsion(const Graph& g) {
    constexpr bool directed = std::is_same_v<Graph, DirectedMultigraph>;
    if constexpr (directed) {
        if (!is_strongly_connected(g)) {
            auto type = cokernel_type(reduced_laplacian(g));
            return log_of_mpz(type.torsion_order());
        }
    }
    auto comp = detail::weak_components(g);
    int comps = component_count(g);
    std::vector<char> drop(g.n, 0);
    for (int c = 0; c < comps; ++c)
        for (std::size_t v = g.n; v-- > 0;)
            if (comp[v] == c) {
                drop[v] = 1;
                break;
            }
    BigIntMatrix full = laplacian(g);
    std::vector<std::size_t> keep;
    for (std::size_t v = 0; v < g.n; ++v)
        if (!drop[v]) keep.push_back(v);
    BigIntMatrix m(keep.size(), keep.size());
    for (std::size_t i = 0; i < keep.size(); ++i)
        for (std::size_t j = 0; j < keep.size(); ++j) m(i, j) = full(keep[i], keep[j]);
    mpz_class det = determinant(m);
    if (det == 0) throw std::runtime_error("log_torsion: singular component minor");
    return log_of_mpz(det);
}

/// rank of the p-Sylow subgroup per prime = corank of the reduced Laplacian
/// mod p.
template <typename Graph>
std::map<std::uint64_t, std::size_t> group_rank_profile(const Graph& g,
                                                        const std::vector<std::uint64_t>& primes) {
    if (!is_strongly_connected(g)) throw disconnected_error("group_rank_profile: graph not connected");
    BigIntMatrix red = reduced_laplacian(g);
    std::map<std::uint64_t, std::size_t> out;
    for (auto p : primes) out[p] = corank_mod_p(red, p);
    return out;
}

}  // namespace sandlab
