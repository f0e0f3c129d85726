// sieve.hpp
// Smallest-prime-factor sieve and the elementary arithmetic functions built on
// it: mu(n), the k-free indicator, omega(n), and the smooth-number count
// Psi(x, y). Also a fixed-width segmented sieve for ranges past the table.
//
// Conventions for n = 1: mu(1) = 1, mu^(k)(1) = 1, omega(1) = 0, and 1 is
// y-smooth for every y.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"
#include "sequence.hpp"

namespace kfree {

// In-memory tables are capped so that spf + primes stay under ~1 GB.
inline constexpr std::uint64_t kMaxSieveLimit = 200'000'000;
inline constexpr std::uint64_t kDefaultSegmentWidth = std::uint64_t{1} << 22;

class KFreeParams {
public:
    explicit KFreeParams(int k) : k_(k) {
        if (k < 2) throw DomainError("k-free parameter must satisfy k >= 2, got " + std::to_string(k));
    }
    int k() const noexcept { return k_; }
    bool even() const noexcept { return k_ % 2 == 0; }

private:
    int k_;
};

// floor(x^(1/k)) computed exactly.
inline std::uint64_t integer_root(std::uint64_t x, int k) {
    if (k <= 0) throw DomainError("integer_root needs k >= 1");
    if (x == 0 || k == 1) return x;
    auto pow_le = [&](std::uint64_t r) {
        // true iff r^k <= x, without overflow
        std::uint64_t acc = 1;
        for (int i = 0; i < k; ++i) {
            if (acc > x / r) return false;
            acc *= r;
        }
        return true;
    };
    auto r = static_cast<std::uint64_t>(std::pow(static_cast<long double>(x), 1.0L / k));
    while (r > 0 && !pow_le(r)) --r;
    while (pow_le(r + 1)) ++r;
    return r;
}

// Returns d^k, or 0 if it exceeds `cap`.
inline std::uint64_t power_capped(std::uint64_t d, int k, std::uint64_t cap) {
    std::uint64_t acc = 1;
    for (int i = 0; i < k; ++i) {
        if (d != 0 && acc > cap / d) return 0;
        acc *= d;
    }
    return acc <= cap ? acc : 0;
}

class SieveTable {
public:
    std::uint64_t limit() const noexcept { return limit_; }
    std::span<const std::uint32_t> primes() const noexcept { return primes_; }

    std::uint32_t smallest_prime_factor(std::uint64_t n) const {
        check(n);
        if (n < 2) throw DomainError("smallest prime factor is defined for n >= 2");
        return spf_[n];
    }

    bool is_prime(std::uint64_t n) const {
        check(n);
        return n >= 2 && spf_[n] == n;
    }

    // pi(x) for x <= limit.
    std::uint64_t prime_count(std::uint64_t x) const {
        check(x);
        return static_cast<std::uint64_t>(
            std::upper_bound(primes_.begin(), primes_.end(), x) - primes_.begin());
    }

    // Calls fn(p, e) for each prime power p^e exactly dividing n.
    template <class Fn>
    void for_each_prime_power(std::uint64_t n, Fn&& fn) const {
        check(n);
        while (n > 1) {
            const std::uint32_t p = spf_[n];
            int e = 0;
            while (n % p == 0) {
                n /= p;
                ++e;
            }
            fn(std::uint64_t{p}, e);
        }
    }

private:
    friend SieveTable build_sieve(std::uint64_t);

    void check(std::uint64_t n) const {
        if (n > limit_)
            throw CapacityError("n = " + std::to_string(n) + " exceeds sieve limit " + std::to_string(limit_));
    }

    std::uint64_t limit_ = 0;
    std::vector<std::uint32_t> spf_;
    std::vector<std::uint32_t> primes_;
};

// Linear sieve: each composite is struck exactly once by its smallest prime.
inline SieveTable build_sieve(std::uint64_t limit) {
    if (limit == 0) throw CapacityError("sieve limit must be at least 1");
    if (limit > kMaxSieveLimit)
        throw CapacityError("sieve limit " + std::to_string(limit) + " exceeds in-memory bound " +
                            std::to_string(kMaxSieveLimit) + "; use the segmented sieve");
    SieveTable t;
    t.limit_ = limit;
    t.spf_.assign(limit + 1, 0);
    if (limit >= 1) t.spf_[1] = 1;
    for (std::uint64_t i = 2; i <= limit; ++i) {
        if (t.spf_[i] == 0) {
            t.spf_[i] = static_cast<std::uint32_t>(i);
            t.primes_.push_back(static_cast<std::uint32_t>(i));
        }
        const std::uint32_t si = t.spf_[i];
        for (std::uint32_t p : t.primes_) {
            if (p > si || i * p > limit) break;
            t.spf_[i * p] = p;
        }
    }
    return t;
}

inline CoefficientSequence mobius_values(const SieveTable& table, std::uint64_t n_max) {
    if (n_max > table.limit())
        throw CapacityError("mobius_values: N = " + std::to_string(n_max) + " exceeds sieve limit " +
                            std::to_string(table.limit()));
    std::vector<std::int64_t> mu(n_max + 1, 0);
    if (n_max >= 1) mu[1] = 1;
    for (std::uint64_t n = 2; n <= n_max; ++n) {
        const std::uint64_t p = table.smallest_prime_factor(n);
        const std::uint64_t m = n / p;
        mu[n] = (m % p == 0) ? 0 : -mu[m];
    }
    return CoefficientSequence::dense("mu", std::move(mu));
}

inline CoefficientSequence kfree_indicator(const SieveTable& table, KFreeParams k, std::uint64_t n_max) {
    if (n_max > table.limit())
        throw CapacityError("kfree_indicator: N = " + std::to_string(n_max) + " exceeds sieve limit " +
                            std::to_string(table.limit()));
    // Exponent of the smallest prime in n, reused through n / p.
    std::vector<std::uint8_t> spf_exp(n_max + 1, 0);
    std::vector<std::int64_t> ind(n_max + 1, 0);
    if (n_max >= 1) ind[1] = 1;
    for (std::uint64_t n = 2; n <= n_max; ++n) {
        const std::uint64_t p = table.smallest_prime_factor(n);
        const std::uint64_t m = n / p;
        const bool same = m > 1 && table.smallest_prime_factor(m) == p;
        spf_exp[n] = same ? static_cast<std::uint8_t>(spf_exp[m] + 1) : 1;
        ind[n] = (spf_exp[n] >= k.k()) ? 0 : ind[m];
    }
    return CoefficientSequence::dense("mu_k" + std::to_string(k.k()), std::move(ind));
}

inline int omega(const SieveTable& table, std::uint64_t n) {
    if (n == 0) throw DomainError("omega(0) is undefined");
    int count = 0;
    table.for_each_prime_power(n, [&](std::uint64_t, int) { ++count; });
    return count;
}

// Plain Eratosthenes, for small auxiliary ranges.
inline std::vector<std::uint64_t> primes_up_to(std::uint64_t limit) {
    std::vector<std::uint64_t> out;
    if (limit < 2) return out;
    std::vector<bool> composite(limit + 1, false);
    for (std::uint64_t i = 2; i <= limit; ++i) {
        if (composite[i]) continue;
        out.push_back(i);
        for (std::uint64_t j = i * i; j <= limit; j += i) composite[j] = true;
    }
    return out;
}

// Psi(x, y): count of n <= x whose prime factors are all <= y, 1 included.
// Depth-first enumeration over prime powers, so the cost is Psi(x, y) itself.
inline std::uint64_t psi_smooth_count(std::uint64_t x, std::uint64_t y) {
    if (x == 0) throw DomainError("psi_smooth_count requires x >= 1");
    if (y < 2) throw DomainError("psi_smooth_count requires y >= 2");
    if (y >= x) return x;
    const std::vector<std::uint64_t> ps = primes_up_to(y);
    std::function<std::uint64_t(std::uint64_t, std::size_t)> count =
        [&](std::uint64_t bound, std::size_t from) -> std::uint64_t {
        std::uint64_t c = 1;  // the empty product
        for (std::size_t j = from; j < ps.size() && ps[j] <= bound; ++j) {
            for (std::uint64_t m = bound / ps[j]; m >= 1; m /= ps[j]) c += count(m, j + 1);
        }
        return c;
    };
    return count(x, 0);
}

// Segmented sieve for mu^(k)(n) * w(n) on 1..x_max, with w completely
// multiplicative and w(p) in {-1, +1} supplied by `prime_weight`. Segments of `width`
// integers are handed to `sink(lo, values)` in ascending order, values[i]
// belonging to n = lo + i.
template <class PrimeWeight, class Sink>
void segmented_weighted_kfree(std::uint64_t x_max, KFreeParams k, PrimeWeight&& prime_weight, Sink&& sink,
                              std::uint64_t width = kDefaultSegmentWidth) {
    if (width == 0) throw DomainError("segment width must be positive");
    if (x_max == 0) return;
    const std::vector<std::uint64_t> base = primes_up_to(integer_root(x_max, 2));
    std::vector<std::int8_t> base_weight(base.size());
    for (std::size_t i = 0; i < base.size(); ++i) base_weight[i] = static_cast<std::int8_t>(prime_weight(base[i]));

    std::vector<std::uint64_t> rem;
    std::vector<std::int8_t> val;
    for (std::uint64_t lo = 1; lo <= x_max; lo += width) {
        const std::uint64_t hi = std::min(x_max, lo + width - 1);
        const std::size_t len = static_cast<std::size_t>(hi - lo + 1);
        rem.resize(len);
        val.assign(len, 1);
        for (std::size_t i = 0; i < len; ++i) rem[i] = lo + i;
        for (std::size_t j = 0; j < base.size(); ++j) {
            const std::uint64_t p = base[j];
            if (p * p > hi) break;
            const std::int8_t wp = base_weight[j];
            for (std::uint64_t m = ((lo + p - 1) / p) * p; m <= hi; m += p) {
                const std::size_t i = static_cast<std::size_t>(m - lo);
                int e = 0;
                while (rem[i] % p == 0) {
                    rem[i] /= p;
                    ++e;
                }
                if (e >= k.k())
                    val[i] = 0;
                else if (e % 2 == 1)
                    val[i] = static_cast<std::int8_t>(val[i] * wp);
            }
        }
        for (std::size_t i = 0; i < len; ++i) {
            if (rem[i] > 1 && val[i] != 0) val[i] = static_cast<std::int8_t>(val[i] * prime_weight(rem[i]));
        }
        sink(lo, std::span<const std::int8_t>(val));
    }
}

}  // namespace kfree
