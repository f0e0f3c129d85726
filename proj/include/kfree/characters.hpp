// characters.hpp
// Real non-principal Dirichlet characters and the modified character g that
// agrees with chi away from the modulus and takes a fixed sign at p | q.

#pragma once

#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "sequence.hpp"
#include "sieve.hpp"

namespace kfree {

// Jacobi symbol (a/n) for odd n > 0.
inline int jacobi(std::int64_t a, std::uint64_t n) {
    if (n == 0 || n % 2 == 0) throw DomainError("jacobi symbol needs an odd positive modulus");
    std::int64_t r = a % static_cast<std::int64_t>(n);
    if (r < 0) r += static_cast<std::int64_t>(n);
    std::uint64_t x = static_cast<std::uint64_t>(r);
    int result = 1;
    while (x != 0) {
        while (x % 2 == 0) {
            x /= 2;
            const std::uint64_t m8 = n % 8;
            if (m8 == 3 || m8 == 5) result = -result;
        }
        std::swap(x, n);
        if (x % 4 == 3 && n % 4 == 3) result = -result;
        x %= n;
    }
    return n == 1 ? result : 0;
}

// Kronecker symbol (a/n) for n >= 0.
inline int kronecker(std::int64_t a, std::uint64_t n) {
    if (n == 0) return (a == 1 || a == -1) ? 1 : 0;
    int result = 1;
    if (n % 2 == 0) {
        if (a % 2 == 0) return 0;
        int v = 0;
        while (n % 2 == 0) {
            n /= 2;
            ++v;
        }
        // (a/2) = +1 for a = +-1 mod 8, -1 for a = +-3 mod 8
        std::int64_t m8 = a % 8;
        if (m8 < 0) m8 += 8;
        if (v % 2 == 1 && (m8 == 3 || m8 == 5)) result = -result;
    }
    if (n == 1) return result;
    return result * jacobi(a, n);
}

inline bool is_squarefree_integer(std::uint64_t m) {
    if (m == 0) return false;
    for (std::uint64_t p = 2; p * p <= m; ++p) {
        if (m % p != 0) continue;
        m /= p;
        if (m % p == 0) return false;
    }
    return true;
}

// Empty when d is a fundamental discriminant, otherwise the failed condition.
inline std::optional<std::string> fundamental_discriminant_failure(std::int64_t d) {
    if (d == 0 || d == 1) return "d must not be 0 or 1";
    std::int64_t r = d % 4;
    if (r < 0) r += 4;
    const std::uint64_t abs_d = static_cast<std::uint64_t>(d < 0 ? -d : d);
    if (r == 1) {
        if (!is_squarefree_integer(abs_d)) return "d = 1 mod 4 but d is not squarefree";
        return std::nullopt;
    }
    if (r == 0) {
        std::int64_t m = d / 4;
        std::int64_t mr = m % 4;
        if (mr < 0) mr += 4;
        if (mr != 2 && mr != 3) return "d = 4m requires m = 2 or 3 mod 4";
        if (!is_squarefree_integer(static_cast<std::uint64_t>(m < 0 ? -m : m)))
            return "d = 4m requires m squarefree";
        return std::nullopt;
    }
    return "d must be 0 or 1 mod 4";
}

class QuadraticCharacter {
public:
    std::uint64_t modulus() const noexcept { return values_.size(); }
    std::optional<std::int64_t> discriminant() const noexcept { return discriminant_; }
    std::span<const std::int8_t> values() const noexcept { return values_; }

    int operator()(std::uint64_t n) const noexcept { return values_[n % values_.size()]; }

    // sum_{1 <= b <= u} chi(b), O(1) through one period of prefix sums.
    std::int64_t partial_sum(std::uint64_t u) const noexcept {
        const std::uint64_t q = modulus();
        return prefix_[u % q];  // the full-period sum is zero
    }

    // Distinct primes dividing the modulus, ascending.
    const std::vector<std::uint64_t>& bad_primes() const noexcept { return bad_primes_; }

    std::string label() const {
        if (discriminant_) return "d=" + std::to_string(*discriminant_);
        return "table(q=" + std::to_string(modulus()) + ")";
    }

private:
    friend QuadraticCharacter character_from_table(std::uint64_t, std::vector<int>);
    friend QuadraticCharacter character_from_discriminant(std::int64_t);

    std::vector<std::int8_t> values_;
    std::vector<std::int64_t> prefix_;
    std::vector<std::uint64_t> bad_primes_;
    std::optional<std::int64_t> discriminant_;
};

namespace detail {

inline std::vector<std::uint64_t> distinct_prime_factors(std::uint64_t n) {
    std::vector<std::uint64_t> out;
    for (std::uint64_t p = 2; p * p <= n; ++p) {
        if (n % p != 0) continue;
        out.push_back(p);
        while (n % p == 0) n /= p;
    }
    if (n > 1) out.push_back(n);
    return out;
}

}  // namespace detail

// Checks every axiom of a real non-principal character mod q and throws a
// ValidationError naming the first witness. Complete multiplicativity is
// checked as chi(a p) = chi(a) chi(p) for all residues a and primes p < q,
// which together with chi(1) = 1 implies it for every pair.
inline QuadraticCharacter character_from_table(std::uint64_t q, std::vector<int> values) {
    if (q < 3) throw ValidationError("modulus must satisfy q >= 3, got " + std::to_string(q));
    if (values.size() != q)
        throw ValidationError("character table has " + std::to_string(values.size()) + " entries, expected q = " +
                              std::to_string(q));
    for (std::uint64_t a = 0; a < q; ++a) {
        const int v = values[a];
        if (v < -1 || v > 1)
            throw ValidationError("value chi(" + std::to_string(a) + ") = " + std::to_string(v) +
                                  " is not in {-1, 0, 1}");
        const bool coprime = std::gcd(a, q) == 1;
        if (coprime == (v == 0))
            throw ValidationError("chi(" + std::to_string(a) + ") = " + std::to_string(v) +
                                  " but gcd(" + std::to_string(a) + ", " + std::to_string(q) +
                                  ") = " + std::to_string(std::gcd(a, q)));
    }
    if (values[1] != 1) throw ValidationError("chi(1) must equal 1");
    for (std::uint64_t p : primes_up_to(q - 1)) {
        for (std::uint64_t a = 0; a < q; ++a) {
            if (values[(a * p) % q] != values[a] * values[p])
                throw ValidationError("not completely multiplicative: witness pair (a, b) = (" + std::to_string(a) +
                                      ", " + std::to_string(p) + ")");
        }
    }
    long long sum = 0;
    bool has_minus = false;
    for (int v : values) {
        sum += v;
        has_minus = has_minus || v == -1;
    }
    if (sum != 0 || !has_minus) throw ValidationError("character is principal (values sum to " + std::to_string(sum) + ")");

    QuadraticCharacter chi;
    chi.values_.assign(values.begin(), values.end());
    chi.prefix_.assign(q, 0);
    for (std::uint64_t u = 1; u < q; ++u) chi.prefix_[u] = chi.prefix_[u - 1] + values[u];
    chi.bad_primes_ = detail::distinct_prime_factors(q);
    return chi;
}

// n -> (d / n) with modulus |d|, for a fundamental discriminant d.
inline QuadraticCharacter character_from_discriminant(std::int64_t d) {
    if (auto why = fundamental_discriminant_failure(d))
        throw ValidationError("d = " + std::to_string(d) + " is not a fundamental discriminant: " + *why);
    const std::uint64_t q = static_cast<std::uint64_t>(d < 0 ? -d : d);
    std::vector<int> values(q);
    for (std::uint64_t n = 0; n < q; ++n) values[n] = kronecker(d, n);
    QuadraticCharacter chi = character_from_table(q, std::move(values));
    chi.discriminant_ = d;
    return chi;
}

// Completely multiplicative g with g(p) = chi(p) for p not dividing q and
// g(p) = bad_prime_sign for p | q. |g(n)| = 1 for all n >= 1.
class ModifiedCharacter {
public:
    explicit ModifiedCharacter(QuadraticCharacter base, int bad_prime_sign = 1)
        : base_(std::move(base)), sign_(bad_prime_sign) {
        if (sign_ != 1 && sign_ != -1)
            throw ValidationError("sign at primes dividing q must be +1 or -1, got " + std::to_string(sign_));
    }

    const QuadraticCharacter& base() const noexcept { return base_; }
    int bad_prime_sign() const noexcept { return sign_; }

    // g(p) for a prime p.
    int at_prime(std::uint64_t p) const noexcept {
        const int c = base_(p);
        return c == 0 ? sign_ : c;
    }

    // g(n) by trial division; for spot checks outside any table.
    int operator()(std::uint64_t n) const {
        if (n == 0) throw DomainError("g(0) is undefined");
        int v = 1;
        for (std::uint64_t p = 2; p * p <= n; ++p) {
            while (n % p == 0) {
                n /= p;
                v *= at_prime(p);
            }
        }
        if (n > 1) v *= at_prime(n);
        return v;
    }

private:
    QuadraticCharacter base_;
    int sign_;
};

inline CoefficientSequence modified_values(const ModifiedCharacter& g, const SieveTable& table, std::uint64_t n_max) {
    if (n_max > table.limit())
        throw CapacityError("modified_values: N = " + std::to_string(n_max) + " exceeds sieve limit " +
                            std::to_string(table.limit()));
    std::vector<std::int64_t> v(n_max + 1, 0);
    if (n_max >= 1) v[1] = 1;
    for (std::uint64_t n = 2; n <= n_max; ++n) {
        const std::uint64_t p = table.smallest_prime_factor(n);
        v[n] = g.at_prime(p) * v[n / p];
    }
    return CoefficientSequence::dense("g", std::move(v));
}

// f = mu^(k) g, supported on the k-free integers.
inline CoefficientSequence f_values(KFreeParams k, const ModifiedCharacter& g, const SieveTable& table,
                                    std::uint64_t n_max) {
    const CoefficientSequence ind = kfree_indicator(table, k, n_max);
    const CoefficientSequence gv = modified_values(g, table, n_max);
    std::vector<std::int64_t> v(n_max + 1, 0);
    const auto a = ind.dense_values();
    const auto b = gv.dense_values();
    for (std::uint64_t n = 1; n <= n_max; ++n) v[n] = a[n] * b[n];
    return CoefficientSequence::dense("f", std::move(v));
}

// Streams f(1..x_max) through the segmented sieve; no table limit applies.
template <class Sink>
void f_segments(KFreeParams k, const ModifiedCharacter& g, std::uint64_t x_max, Sink&& sink,
                std::uint64_t width = kDefaultSegmentWidth) {
    segmented_weighted_kfree(
        x_max, k, [&](std::uint64_t p) { return g.at_prime(p); }, std::forward<Sink>(sink), width);
}

// chi(n mod q) as a dense sequence on 1..n_max.
inline CoefficientSequence periodic_character_sequence(const QuadraticCharacter& chi, std::uint64_t n_max) {
    std::vector<std::int64_t> v(n_max + 1, 0);
    for (std::uint64_t n = 1; n <= n_max; ++n) v[n] = chi(n);
    return CoefficientSequence::dense("chi", std::move(v));
}

}  // namespace kfree
