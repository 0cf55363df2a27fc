#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "sandlab/numtheory.hpp"

namespace sandlab {

/// Dense arbitrary-precision integer matrix, row-major.
class BigIntMatrix {
public:
    BigIntMatrix() = default;
    BigIntMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), entries_(rows * cols, mpz_class(0)) {}

    static BigIntMatrix identity(std::size_t n) {
        BigIntMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
        return m;
    }

    static BigIntMatrix from_rows(const std::vector<std::vector<long>>& rows) {
        if (rows.empty()) return {};
        BigIntMatrix m(rows.size(), rows[0].size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != m.cols()) throw std::invalid_argument("ragged rows");
            for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
        }
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    mpz_class& operator()(std::size_t i, std::size_t j) { return entries_[i * cols_ + j]; }
    const mpz_class& operator()(std::size_t i, std::size_t j) const { return entries_[i * cols_ + j]; }

    void swap_rows(std::size_t a, std::size_t b) {
        if (a == b) return;
        for (std::size_t j = 0; j < cols_; ++j) std::swap((*this)(a, j), (*this)(b, j));
    }
    void swap_cols(std::size_t a, std::size_t b) {
        if (a == b) return;
        for (std::size_t i = 0; i < rows_; ++i) std::swap((*this)(i, a), (*this)(i, b));
    }
    /// row a += factor * row b
    void add_row(std::size_t a, std::size_t b, const mpz_class& factor) {
        for (std::size_t j = 0; j < cols_; ++j) (*this)(a, j) += factor * (*this)(b, j);
    }
    void add_col(std::size_t a, std::size_t b, const mpz_class& factor) {
        for (std::size_t i = 0; i < rows_; ++i) (*this)(i, a) += factor * (*this)(i, b);
    }
    void negate_row(std::size_t a) {
        for (std::size_t j = 0; j < cols_; ++j) (*this)(a, j) = -(*this)(a, j);
    }

    BigIntMatrix transposed() const {
        BigIntMatrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    BigIntMatrix operator*(const BigIntMatrix& o) const {
        if (cols_ != o.rows_) throw std::invalid_argument("matrix product shape mismatch");
        BigIntMatrix r(rows_, o.cols_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t k = 0; k < cols_; ++k) {
                const mpz_class& a = (*this)(i, k);
                if (a == 0) continue;
                for (std::size_t j = 0; j < o.cols_; ++j) r(i, j) += a * o(k, j);
            }
        return r;
    }

    bool operator==(const BigIntMatrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && entries_ == o.entries_;
    }

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<mpz_class> entries_;
};

/// Matrix over Z/m with entries reduced into [0, m).
struct ModMatrix {
    std::uint64_t modulus = 2;
    std::size_t rows = 0, cols = 0;
    std::vector<std::uint64_t> entries;

    ModMatrix() = default;
    ModMatrix(std::uint64_t m, std::size_t r, std::size_t c)
        : modulus(m), rows(r), cols(c), entries(r * c, 0) {
        if (m < 2) throw std::invalid_argument("modulus must be >= 2");
    }

    std::uint64_t& at(std::size_t i, std::size_t j) { return entries[i * cols + j]; }
    std::uint64_t at(std::size_t i, std::size_t j) const { return entries[i * cols + j]; }

    static ModMatrix reduce(const BigIntMatrix& m, std::uint64_t modulus) {
        ModMatrix r(modulus, m.rows(), m.cols());
        mpz_class mod(static_cast<unsigned long>(modulus)), tmp;
        for (std::size_t i = 0; i < m.rows(); ++i)
            for (std::size_t j = 0; j < m.cols(); ++j) {
                mpz_fdiv_r(tmp.get_mpz_t(), m(i, j).get_mpz_t(), mod.get_mpz_t());
                r.at(i, j) = tmp.get_ui();
            }
        return r;
    }
};

/// Exact determinant by Bareiss fraction-free elimination.
inline mpz_class determinant(const BigIntMatrix& input) {
    if (input.rows() != input.cols()) throw std::invalid_argument("determinant of non-square matrix");
    const std::size_t n = input.rows();
    if (n == 0) return 1;
    BigIntMatrix m = input;
    mpz_class prev(1);
    int sign = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (m(k, k) == 0) {
            std::size_t pivot = k + 1;
            while (pivot < n && m(pivot, k) == 0) ++pivot;
            if (pivot == n) return 0;
            m.swap_rows(k, pivot);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i)
            for (std::size_t j = k + 1; j < n; ++j) {
                mpz_class num = m(i, j) * m(k, k) - m(i, k) * m(k, j);
                mpz_divexact(m(i, j).get_mpz_t(), num.get_mpz_t(), prev.get_mpz_t());
            }
        prev = m(k, k);
    }
    return sign > 0 ? m(n - 1, n - 1) : mpz_class(-m(n - 1, n - 1));
}

namespace detail {

inline std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>((static_cast<__uint128_t>(a) * b) % m);
}

inline std::uint64_t powmod(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
    std::uint64_t r = 1 % m;
    base %= m;
    while (exp) {
        if (exp & 1) r = mulmod(r, base, m);
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    return r;
}

/// Inverse of a unit modulo p^k via extended Euclid.
inline std::uint64_t invmod(std::uint64_t a, std::uint64_t m) {
    std::int64_t t = 0, new_t = 1;
    std::int64_t r = static_cast<std::int64_t>(m), new_r = static_cast<std::int64_t>(a % m);
    while (new_r != 0) {
        std::int64_t q = r / new_r;
        std::int64_t tmp = t - q * new_t;
        t = new_t; new_t = tmp;
        tmp = r - q * new_r;
        r = new_r; new_r = tmp;
    }
    if (r != 1) throw std::invalid_argument("invmod: not a unit");
    return static_cast<std::uint64_t>(t < 0 ? t + static_cast<std::int64_t>(m) : t);
}

}  // namespace detail

/// Rank over the p-element field by Gaussian elimination.
inline std::size_t rank_mod_p(ModMatrix m, std::uint64_t p) {
    if (m.modulus != p) throw std::invalid_argument("rank_mod_p: matrix modulus != p");
    std::size_t rank = 0;
    for (std::size_t col = 0; col < m.cols && rank < m.rows; ++col) {
        std::size_t pivot = rank;
        while (pivot < m.rows && m.at(pivot, col) % p == 0) ++pivot;
        if (pivot == m.rows) continue;
        if (pivot != rank)
            for (std::size_t j = col; j < m.cols; ++j) std::swap(m.at(pivot, j), m.at(rank, j));
        std::uint64_t inv = detail::invmod(m.at(rank, col), p);
        for (std::size_t i = rank + 1; i < m.rows; ++i) {
            std::uint64_t f = detail::mulmod(m.at(i, col), inv, p);
            if (f == 0) continue;
            for (std::size_t j = col; j < m.cols; ++j) {
                std::uint64_t sub = detail::mulmod(f, m.at(rank, j), p);
                m.at(i, j) = (m.at(i, j) + p - sub) % p;
            }
        }
        ++rank;
    }
    return rank;
}

inline std::size_t rank_mod_p(const BigIntMatrix& m, std::uint64_t p) {
    return rank_mod_p(ModMatrix::reduce(m, p), p);
}

inline std::size_t corank_mod_p(const BigIntMatrix& m, std::uint64_t p) {
    return m.cols() - rank_mod_p(m, p);
}

}  // namespace sandlab
