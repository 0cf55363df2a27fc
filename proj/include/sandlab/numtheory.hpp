#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include <gmpxx.h>

namespace sandlab {

inline mpz_class mpz_pow(const mpz_class& base, unsigned long exp) {
    mpz_class r;
    mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), exp);
    return r;
}

inline mpz_class mpz_pow_u64(std::uint64_t base, unsigned long exp) {
    return mpz_pow(mpz_class(static_cast<unsigned long>(base)), exp);
}

/// Shared factorial table; grows on demand.
inline const mpz_class& factorial(std::size_t n) {
    static std::vector<mpz_class> table = {mpz_class(1)};
    while (table.size() <= n) table.push_back(table.back() * mpz_class(static_cast<unsigned long>(table.size())));
    return table[n];
}

/// m! / (2^{m/2} (m/2)!) = (m-1)!!, the number of perfect matchings of m points.
inline mpz_class perfect_matching_count(std::size_t m) {
    if (m % 2 != 0) throw std::invalid_argument("perfect_matching_count: odd size");
    mpz_class half_pow;
    mpz_ui_pow_ui(half_pow.get_mpz_t(), 2, static_cast<unsigned long>(m / 2));
    return factorial(m) / (half_pow * factorial(m / 2));
}

inline std::uint64_t u64_pow(std::uint64_t base, unsigned exp) {
    std::uint64_t r = 1;
    while (exp--) r *= base;
    return r;
}

inline std::uint64_t v_p(mpz_class n, std::uint64_t p) {
    if (n == 0) throw std::invalid_argument("v_p of zero");
    std::uint64_t v = 0;
    mpz_class q, r, pz(static_cast<unsigned long>(p));
    for (;;) {
        mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), n.get_mpz_t(), pz.get_mpz_t());
        if (r != 0) return v;
        n = q;
        ++v;
    }
}

namespace detail {

inline mpz_class pollard_rho(const mpz_class& n, unsigned long c) {
    mpz_class x(2), y(2), d(1), diff;
    while (d == 1) {
        x = (x * x + c) % n;
        y = (y * y + c) % n;
        y = (y * y + c) % n;
        diff = x > y ? x - y : y - x;
        if (diff == 0) return 0;
        mpz_gcd(d.get_mpz_t(), diff.get_mpz_t(), n.get_mpz_t());
    }
    return d == n ? 0 : d;
}

}  // namespace detail

/// Prime factorization: trial division up to 10^6, probabilistic primality on
/// the cofactor, Pollard rho for composite leftovers.  Determinants of small
/// test graphs never get past the trial-division stage.
inline std::map<mpz_class, unsigned> factorize(mpz_class n) {
    if (n < 0) n = -n;
    if (n <= 1) return {};
    std::map<mpz_class, unsigned> factors;
    for (std::uint64_t p = 2; p <= 1000000 && mpz_class(n) >= mpz_class(static_cast<unsigned long>(p)) * static_cast<unsigned long>(p); p += (p == 2 ? 1 : 2)) {
        while (mpz_divisible_ui_p(n.get_mpz_t(), static_cast<unsigned long>(p))) {
            ++factors[mpz_class(static_cast<unsigned long>(p))];
            mpz_divexact_ui(n.get_mpz_t(), n.get_mpz_t(), static_cast<unsigned long>(p));
        }
    }
    std::vector<mpz_class> pending;
    if (n > 1) pending.push_back(n);
    while (!pending.empty()) {
        mpz_class m = pending.back();
        pending.pop_back();
        if (m == 1) continue;
        if (mpz_probab_prime_p(m.get_mpz_t(), 40) != 0) {
            ++factors[m];
            continue;
        }
        mpz_class d;
        for (unsigned long c = 1; ; ++c) {
            d = detail::pollard_rho(m, c);
            if (d != 0) break;
            if (c > 64) throw std::runtime_error("factorize: pollard rho failed");
        }
        pending.push_back(d);
        pending.push_back(m / d);
    }
    return factors;
}

}  // namespace sandlab
