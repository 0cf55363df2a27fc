#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "sandlab/bigmat.hpp"
#include "sandlab/rng.hpp"

namespace sandlab {

/// Directed multigraph on {0, ..., n-1} as an n x n multiplicity grid.
struct DirectedMultigraph {
    std::size_t n = 0;
    std::vector<std::uint32_t> multiplicity;  // row-major d(i, j)

    DirectedMultigraph() = default;
    explicit DirectedMultigraph(std::size_t vertices)
        : n(vertices), multiplicity(vertices * vertices, 0) {}

    std::uint32_t& mult(std::size_t i, std::size_t j) { return multiplicity[i * n + j]; }
    std::uint32_t mult(std::size_t i, std::size_t j) const { return multiplicity[i * n + j]; }

    std::uint32_t out_degree(std::size_t i) const {
        std::uint32_t d = 0;
        for (std::size_t j = 0; j < n; ++j) d += mult(i, j);
        return d;
    }
    std::uint32_t in_degree(std::size_t j) const {
        std::uint32_t d = 0;
        for (std::size_t i = 0; i < n; ++i) d += mult(i, j);
        return d;
    }
};

/// Undirected multigraph: symmetric multiplicity grid with zero diagonal.
struct UndirectedMultigraph {
    std::size_t n = 0;
    std::vector<std::uint32_t> multiplicity;

    UndirectedMultigraph() = default;
    explicit UndirectedMultigraph(std::size_t vertices)
        : n(vertices), multiplicity(vertices * vertices, 0) {}

    std::uint32_t& mult(std::size_t i, std::size_t j) { return multiplicity[i * n + j]; }
    std::uint32_t mult(std::size_t i, std::size_t j) const { return multiplicity[i * n + j]; }

    void add_edge(std::size_t i, std::size_t j, std::uint32_t count = 1) {
        if (i == j) throw std::invalid_argument("loops not allowed in undirected multigraph");
        mult(i, j) += count;
        mult(j, i) += count;
    }

    std::uint32_t degree(std::size_t i) const {
        std::uint32_t d = 0;
        for (std::size_t j = 0; j < n; ++j) d += mult(i, j);
        return d;
    }
};

/// Union of d independent uniform random permutation graphs: the adjacency
/// matrix is P_1 + ... + P_d.  Permutation m draws from stream (seed, m), so
/// the sample is reproducible and the streams are independent.
inline DirectedMultigraph sample_directed_regular(std::size_t n, unsigned d, Seed seed) {
    if (n < 1 || d < 1) throw std::invalid_argument("sample_directed_regular: need n >= 1, d >= 1");
    DirectedMultigraph g(n);
    for (unsigned m = 0; m < d; ++m) {
        Xoshiro256 rng(Seed(seed.value, mix_seed(seed.stream + 1, m)));
        auto perm = random_permutation(static_cast<std::uint32_t>(n), rng);
        for (std::size_t i = 0; i < n; ++i) ++g.mult(i, perm[i]);
    }
    return g;
}

/// Union of d independent uniform random perfect matchings.  A uniform
/// matching is drawn by shuffling the vertices and pairing them up.
inline UndirectedMultigraph sample_undirected_matching(std::size_t n, unsigned d, Seed seed) {
    if (n < 2 || n % 2 != 0) throw std::invalid_argument("sample_undirected_matching: n must be even and >= 2");
    if (d < 1) throw std::invalid_argument("sample_undirected_matching: d must be >= 1");
    UndirectedMultigraph g(n);
    for (unsigned m = 0; m < d; ++m) {
        Xoshiro256 rng(Seed(seed.value, mix_seed(seed.stream + 1, m)));
        auto perm = random_permutation(static_cast<std::uint32_t>(n), rng);
        for (std::size_t i = 0; i < n; i += 2) g.add_edge(perm[i], perm[i + 1]);
    }
    return g;
}

/// Directed Erdos-Renyi D(n, rho): each ordered pair (i, j), i != j, carries
/// an edge independently with probability rho.  No loops.
inline DirectedMultigraph sample_directed_er(std::size_t n, double rho, Seed seed) {
    if (rho < 0.0 || rho > 1.0) throw std::invalid_argument("sample_directed_er: rho outside [0,1]");
    DirectedMultigraph g(n);
    Xoshiro256 rng(Seed(seed.value, mix_seed(seed.stream + 1, 0)));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            if (rng.bernoulli(rho)) g.mult(i, j) = 1;
        }
    return g;
}

/// Laplacian with the sign convention Delta_ij = d(i,j) off the diagonal and
/// d(i,i) - d_out(i) on it, so every row sums to zero and loops cancel.
inline BigIntMatrix laplacian(const DirectedMultigraph& g) {
    BigIntMatrix m(g.n, g.n);
    for (std::size_t i = 0; i < g.n; ++i) {
        for (std::size_t j = 0; j < g.n; ++j) m(i, j) = static_cast<long>(g.mult(i, j));
        m(i, i) -= static_cast<long>(g.out_degree(i));
    }
    return m;
}

inline BigIntMatrix laplacian(const UndirectedMultigraph& g) {
    BigIntMatrix m(g.n, g.n);
    for (std::size_t i = 0; i < g.n; ++i) {
        for (std::size_t j = 0; j < g.n; ++j) m(i, j) = static_cast<long>(g.mult(i, j));
        m(i, i) -= static_cast<long>(g.degree(i));
    }
    return m;
}

namespace detail {

/// Deletes the last row and column: the deleted vertex is always index n-1.
inline BigIntMatrix drop_last_row_col(const BigIntMatrix& m) {
    if (m.rows() < 2) throw std::invalid_argument("reduced laplacian needs n >= 2");
    BigIntMatrix r(m.rows() - 1, m.cols() - 1);
    for (std::size_t i = 0; i + 1 < m.rows(); ++i)
        for (std::size_t j = 0; j + 1 < m.cols(); ++j) r(i, j) = m(i, j);
    return r;
}

}  // namespace detail

template <typename Graph>
inline BigIntMatrix reduced_laplacian(const Graph& g) {
    return detail::drop_last_row_col(laplacian(g));
}

/// Adjacency as an integer matrix (for the invertibility experiments).
inline BigIntMatrix adjacency(const UndirectedMultigraph& g) {
    BigIntMatrix m(g.n, g.n);
    for (std::size_t i = 0; i < g.n; ++i)
        for (std::size_t j = 0; j < g.n; ++j) m(i, j) = static_cast<long>(g.mult(i, j));
    return m;
}

inline BigIntMatrix adjacency(const DirectedMultigraph& g) {
    BigIntMatrix m(g.n, g.n);
    for (std::size_t i = 0; i < g.n; ++i)
        for (std::size_t j = 0; j < g.n; ++j) m(i, j) = static_cast<long>(g.mult(i, j));
    return m;
}

namespace detail {

template <typename Graph>
std::vector<int> weak_components(const Graph& g) {
    std::vector<int> comp(g.n, -1);
    int c = 0;
    for (std::size_t start = 0; start < g.n; ++start) {
        if (comp[start] >= 0) continue;
        std::vector<std::size_t> stack{start};
        comp[start] = c;
        while (!stack.empty()) {
            std::size_t v = stack.back();
            stack.pop_back();
            for (std::size_t w = 0; w < g.n; ++w)
                if ((g.mult(v, w) > 0 || g.mult(w, v) > 0) && comp[w] < 0) {
                    comp[w] = c;
                    stack.push_back(w);
                }
        }
        ++c;
    }
    return comp;
}

}  // namespace detail

template <typename Graph>
int component_count(const Graph& g) {
    auto comp = detail::weak_components(g);
    int c = 0;
    for (int x : comp) c = std::max(c, x + 1);
    return c;
}

template <typename Graph>
bool is_connected(const Graph& g) {
    return g.n == 0 || component_count(g) == 1;
}

/// Strong connectivity by forward and backward reachability from vertex 0.
inline bool is_strongly_connected(const DirectedMultigraph& g) {
    if (g.n == 0) return true;
    auto reach = [&](bool forward) {
        std::vector<char> seen(g.n, 0);
        std::vector<std::size_t> stack{0};
        seen[0] = 1;
        while (!stack.empty()) {
            std::size_t v = stack.back();
            stack.pop_back();
            for (std::size_t w = 0; w < g.n; ++w) {
                bool edge = forward ? g.mult(v, w) > 0 : g.mult(w, v) > 0;
                if (edge && !seen[w]) {
                    seen[w] = 1;
                    stack.push_back(w);
                }
            }
        }
        for (char s : seen)
            if (!s) return false;
        return true;
    };
    return reach(true) && reach(false);
}

inline bool is_strongly_connected(const UndirectedMultigraph& g) { return is_connected(g); }

}  // namespace sandlab
