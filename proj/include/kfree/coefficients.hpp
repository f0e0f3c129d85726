// coefficients.hpp
// Exact Dirichlet-series coefficient machinery for
//
//   F(s) = L(s, chi) P(s) / zeta(ks)                    (k even)
//   F(s) = L(s, chi) P(s) / (L(ks, chi) P(ks))          (k odd)
//
// nu(d^k) = mu(d) and psi(d^k) = mu(d) chi(d) are supported on k-th powers,
// the q-core set N holds the integers built only from primes dividing q, and
//
//   h  = nu * 1_N                     coefficients of P(s)/zeta(ks)
//   h~ = psi * (nu 1_N) * 1_N         coefficients of P(s)/(L(ks) P(ks))
//
// so that f = chi * h (k even) and f = chi * h~ (k odd).
//
// With a bad-prime sign of -1 the same identities hold after weighting the
// q-core factors by g: 1_N becomes g 1_N and nu 1_N becomes nu g 1_N.

#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "characters.hpp"
#include "errors.hpp"
#include "sequence.hpp"
#include "sieve.hpp"

namespace kfree {

namespace detail {

inline void require_same_limit(const CoefficientSequence& a, const CoefficientSequence& b) {
    if (a.limit() != b.limit())
        throw DomainError("convolution of '" + a.name() + "' (limit " + std::to_string(a.limit()) + ") and '" +
                          b.name() + "' (limit " + std::to_string(b.limit()) + ") needs matching limits");
}

// mu(d) for 1 <= d <= n by a small sieve; index 0 unused.
inline std::vector<std::int64_t> small_mobius(std::uint64_t n) {
    std::vector<std::int64_t> mu(n + 1, 1);
    if (n == 0) return mu;
    std::vector<bool> composite(n + 1, false);
    for (std::uint64_t p = 2; p <= n; ++p) {
        if (composite[p]) continue;
        for (std::uint64_t m = p; m <= n; m += p) {
            if (m > p) composite[m] = true;
            mu[m] = -mu[m];
        }
        if (p <= n / p)
            for (std::uint64_t m = p * p; m <= n; m += p * p) mu[m] = 0;
    }
    return mu;
}

}  // namespace detail

// (a * b)(n) = sum_{de = n} a(d) b(e) on 1..N. Sparse x sparse stays sparse;
// any dense operand gives a dense result.
inline CoefficientSequence dirichlet_convolve(const CoefficientSequence& a, const CoefficientSequence& b) {
    detail::require_same_limit(a, b);
    const std::uint64_t n_max = a.limit();
    const std::string name = "(" + a.name() + "*" + b.name() + ")";

    if (a.is_sparse() && b.is_sparse()) {
        std::vector<Term> out;
        for (const Term& x : a.terms()) {
            for (const Term& y : b.terms()) {
                if (y.n > n_max / x.n) break;
                out.push_back({x.n * y.n, x.value * y.value});
            }
        }
        return CoefficientSequence::sparse(name, n_max, std::move(out));
    }

    std::vector<std::int64_t> out(n_max + 1, 0);
    if (a.is_sparse() || b.is_sparse()) {
        const CoefficientSequence& sp = a.is_sparse() ? a : b;
        const auto dv = (a.is_sparse() ? b : a).dense_values();
        for (const Term& x : sp.terms()) {
            const std::uint64_t top = n_max / x.n;
            for (std::uint64_t m = 1; m <= top; ++m) out[x.n * m] += x.value * dv[m];
        }
    } else {
        const auto av = a.dense_values();
        const auto bv = b.dense_values();
        for (std::uint64_t d = 1; d <= n_max; ++d) {
            if (av[d] == 0) continue;
            const std::uint64_t top = n_max / d;
            for (std::uint64_t e = 1; e <= top; ++e) out[d * e] += av[d] * bv[e];
        }
    }
    return CoefficientSequence::dense(name, std::move(out));
}

// Pointwise product a(n) b(n).
inline CoefficientSequence pointwise_product(const CoefficientSequence& a, const CoefficientSequence& b) {
    detail::require_same_limit(a, b);
    std::vector<Term> out;
    const CoefficientSequence& driver = a.is_sparse() || !b.is_sparse() ? a : b;
    const CoefficientSequence& other = &driver == &a ? b : a;
    driver.for_each_nonzero([&](std::uint64_t n, std::int64_t v) {
        const std::int64_t w = other(n);
        if (w != 0) out.push_back({n, v * w});
    });
    CoefficientSequence s = CoefficientSequence::sparse(a.name() + "." + b.name(), a.limit(), std::move(out));
    return (a.is_sparse() || b.is_sparse()) ? s : s.to_dense();
}

// The delta sequence: 1 at n = 1, else 0.
inline CoefficientSequence unit_sequence(std::uint64_t n_max) {
    return CoefficientSequence::sparse("delta", n_max, n_max >= 1 ? std::vector<Term>{{1, 1}} : std::vector<Term>{});
}

inline CoefficientSequence nu_values(KFreeParams k, std::uint64_t n_max) {
    const std::uint64_t dmax = integer_root(n_max, k.k());
    const auto mu = detail::small_mobius(dmax);
    std::vector<Term> t;
    for (std::uint64_t d = 1; d <= dmax; ++d)
        if (mu[d] != 0) t.push_back({power_capped(d, k.k(), n_max), mu[d]});
    return CoefficientSequence::sparse("nu", n_max, std::move(t));
}

inline CoefficientSequence psi_values(KFreeParams k, const QuadraticCharacter& chi, std::uint64_t n_max) {
    const std::uint64_t dmax = integer_root(n_max, k.k());
    const auto mu = detail::small_mobius(dmax);
    std::vector<Term> t;
    for (std::uint64_t d = 1; d <= dmax; ++d) {
        const std::int64_t v = mu[d] * chi(d);
        if (v != 0) t.push_back({power_capped(d, k.k(), n_max), v});
    }
    return CoefficientSequence::sparse("psi", n_max, std::move(t));
}

// N = {n : p | n implies p | q}, materialised up to n_max.
class QCoreSet {
public:
    QCoreSet(std::uint64_t q, std::uint64_t n_max) : q_(q), limit_(n_max) {
        if (q < 1) throw DomainError("q-core set needs q >= 1");
        const std::vector<std::uint64_t> ps = detail::distinct_prime_factors(q);
        members_.push_back(1);
        for (std::uint64_t p : ps) {
            const std::size_t existing = members_.size();
            for (std::size_t i = 0; i < existing; ++i) {
                for (std::uint64_t m = members_[i]; m <= n_max / p;) {
                    m *= p;
                    members_.push_back(m);
                }
            }
        }
        std::sort(members_.begin(), members_.end());
        if (n_max == 0) members_.clear();
    }

    std::uint64_t modulus() const noexcept { return q_; }
    std::uint64_t limit() const noexcept { return limit_; }
    const std::vector<std::uint64_t>& members() const noexcept { return members_; }

    // Strip gcd(n, q) repeatedly; n is in N iff this reaches 1.
    bool contains(std::uint64_t n) const {
        if (n == 0) return false;
        for (std::uint64_t g = std::gcd(n, q_); g > 1; g = std::gcd(n, q_)) {
            while (n % g == 0) n /= g;
        }
        return n == 1;
    }

    // The indicator, weighted by sign^Omega(m) (sign = bad-prime value of g).
    CoefficientSequence indicator(int sign = 1) const {
        std::vector<Term> t;
        t.reserve(members_.size());
        for (std::uint64_t m : members_) t.push_back({m, sign == 1 ? 1 : liouville_weight(m, sign)});
        return CoefficientSequence::sparse("1_N", limit_, std::move(t));
    }

private:
    static std::int64_t liouville_weight(std::uint64_t m, int sign) {
        std::int64_t v = 1;
        for (std::uint64_t p = 2; p * p <= m; ++p)
            while (m % p == 0) {
                m /= p;
                v *= sign;
            }
        if (m > 1) v *= sign;
        return v;
    }

    std::uint64_t q_;
    std::uint64_t limit_;
    std::vector<std::uint64_t> members_;
};

// h = nu * (g 1_N), sparse. With bad_prime_sign = +1 this is nu * 1_N.
inline CoefficientSequence h_coefficients(KFreeParams k, const QCoreSet& core, std::uint64_t n_max,
                                          int bad_prime_sign = 1) {
    if (n_max > core.limit())
        throw CapacityError("h_coefficients: q-core set materialised only to " + std::to_string(core.limit()));
    const CoefficientSequence nu = nu_values(k, n_max);
    const CoefficientSequence one_n = core.indicator(bad_prime_sign).truncated(n_max);
    return dirichlet_convolve(nu, one_n).renamed("h");
}

// h~ = psi * (nu g 1_N) * (g 1_N), sparse.
inline CoefficientSequence htilde_coefficients(KFreeParams k, const QuadraticCharacter& chi, const QCoreSet& core,
                                               std::uint64_t n_max, int bad_prime_sign = 1) {
    if (n_max > core.limit())
        throw CapacityError("htilde_coefficients: q-core set materialised only to " + std::to_string(core.limit()));
    const CoefficientSequence one_n = core.indicator(bad_prime_sign).truncated(n_max);
    const CoefficientSequence nu_core = pointwise_product(nu_values(k, n_max), one_n);
    const CoefficientSequence psi = psi_values(k, chi, n_max);
    return dirichlet_convolve(dirichlet_convolve(psi, nu_core), one_n).renamed("htilde");
}

// h for even k, h~ for odd k.
inline CoefficientSequence core_coefficients(KFreeParams k, const ModifiedCharacter& g, std::uint64_t n_max) {
    const QCoreSet core(g.base().modulus(), n_max);
    return k.even() ? h_coefficients(k, core, n_max, g.bad_prime_sign())
                    : htilde_coefficients(k, g.base(), core, n_max, g.bad_prime_sign());
}

inline std::int64_t sum_abs(const CoefficientSequence& a, std::uint64_t x) {
    if (x > a.limit())
        throw CapacityError("sum_abs: x = " + std::to_string(x) + " exceeds limit of '" + a.name() + "'");
    std::int64_t s = 0;
    if (a.is_sparse()) {
        for (const Term& t : a.terms()) {
            if (t.n > x) break;
            s += t.value < 0 ? -t.value : t.value;
        }
    } else {
        const auto v = a.dense_values();
        for (std::uint64_t n = 1; n <= x; ++n) s += v[n] < 0 ? -v[n] : v[n];
    }
    return s;
}

struct Mismatch {
    std::uint64_t n;
    std::int64_t lhs;
    std::int64_t rhs;
};

struct FactorizationReport {
    int k = 0;
    std::uint64_t modulus = 0;
    std::uint64_t checked_to = 0;
    std::string identity;  // "f = chi*h" or "f = chi*htilde"
    std::optional<Mismatch> mismatch;

    bool holds() const noexcept { return !mismatch.has_value(); }
};

// Coefficientwise check of f = chi * h (k even) or f = chi * h~ (k odd) on
// 1..n_max, with chi the q-periodic sequence. Any mismatch is a bug.
inline FactorizationReport verify_factorization(KFreeParams k, const ModifiedCharacter& g, const SieveTable& table,
                                                std::uint64_t n_max) {
    const CoefficientSequence f = f_values(k, g, table, n_max);
    const CoefficientSequence chi = periodic_character_sequence(g.base(), n_max);
    const CoefficientSequence rhs = dirichlet_convolve(chi, core_coefficients(k, g, n_max));

    FactorizationReport r;
    r.k = k.k();
    r.modulus = g.base().modulus();
    r.checked_to = n_max;
    r.identity = k.even() ? "f = chi*h" : "f = chi*htilde";
    const auto lv = f.dense_values();
    const auto rv = rhs.dense_values();
    for (std::uint64_t n = 1; n <= n_max; ++n) {
        if (lv[n] != rv[n]) {
            r.mismatch = Mismatch{n, lv[n], rv[n]};
            break;
        }
    }
    return r;
}

inline FactorizationReport verify_factorization(KFreeParams k, const ModifiedCharacter& g, std::uint64_t n_max) {
    return verify_factorization(k, g, build_sieve(std::max<std::uint64_t>(n_max, 1)), n_max);
}

}  // namespace kfree
