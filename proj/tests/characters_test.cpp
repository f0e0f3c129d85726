#include <gtest/gtest.h>

#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "kfree/characters.hpp"
#include "oracles.hpp"

using namespace kfree;

namespace {

std::uint64_t pow_mod(std::uint64_t b, std::uint64_t e, std::uint64_t m) {
    std::uint64_t r = 1 % m;
    b %= m;
    while (e) {
        if (e & 1) r = r * b % m;
        b = b * b % m;
        e >>= 1;
    }
    return r;
}

}  // namespace

TEST(Kronecker, AgreesWithEulerCriterionAtOddPrimes) {
    for (std::uint64_t p : {3u, 5u, 7u, 11u, 13u, 101u}) {
        for (std::int64_t a = -50; a <= 50; ++a) {
            std::int64_t r = a % static_cast<std::int64_t>(p);
            if (r < 0) r += p;
            const std::uint64_t e = pow_mod(static_cast<std::uint64_t>(r), (p - 1) / 2, p);
            const int expected = r == 0 ? 0 : (e == 1 ? 1 : -1);
            ASSERT_EQ(kronecker(a, p), expected) << a << "/" << p;
        }
    }
}

TEST(Kronecker, TwoAdicRule) {
    // (a/2) by a mod 8: 1 -> 1, 3 -> -1, 5 -> -1, 7 -> 1, even -> 0
    EXPECT_EQ(kronecker(1, 2), 1);
    EXPECT_EQ(kronecker(3, 2), -1);
    EXPECT_EQ(kronecker(5, 2), -1);
    EXPECT_EQ(kronecker(7, 2), 1);
    EXPECT_EQ(kronecker(-3, 2), -1);
    EXPECT_EQ(kronecker(4, 2), 0);
    EXPECT_EQ(kronecker(-3, 0), 0);
    EXPECT_EQ(kronecker(1, 0), 1);
}

TEST(Discriminant, Examples) {
    const QuadraticCharacter m3 = character_from_discriminant(-3);
    EXPECT_EQ(m3.modulus(), 3u);
    EXPECT_EQ(m3(1), 1);
    EXPECT_EQ(m3(2), -1);
    EXPECT_EQ(m3(0), 0);

    const QuadraticCharacter m4 = character_from_discriminant(-4);
    EXPECT_EQ(m4.modulus(), 4u);
    EXPECT_EQ(m4(1), 1);
    EXPECT_EQ(m4(3), -1);
    EXPECT_EQ(m4(2), 0);

    // quadratic residues mod 5 are {1, 4}
    const QuadraticCharacter p5 = character_from_discriminant(5);
    EXPECT_EQ(p5(2), -1);
    EXPECT_EQ(p5(4), 1);

    EXPECT_EQ(character_from_discriminant(8).modulus(), 8u);
    EXPECT_EQ(*character_from_discriminant(-3).discriminant(), -3);
}

TEST(Discriminant, RejectsNonFundamental) {
    for (std::int64_t d : {0, 1, 2, 3, -1, -2, 4, 9, 12, -8 * 2, 16, 20, -12, 25, 45}) {
        if (!fundamental_discriminant_failure(d)) continue;
        EXPECT_THROW(character_from_discriminant(d), ValidationError) << d;
    }
    EXPECT_FALSE(fundamental_discriminant_failure(12).has_value());  // 12 = 4 * 3
    EXPECT_TRUE(fundamental_discriminant_failure(-12).has_value());  // -3 = 1 mod 4
    try {
        character_from_discriminant(9);
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find("squarefree"), std::string::npos);
    }
    try {
        character_from_discriminant(6);
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find("0 or 1 mod 4"), std::string::npos);
    }
}

TEST(Discriminant, AllSmallFundamentalDiscriminantsGiveValidCharacters) {
    int built = 0;
    for (std::int64_t d = -200; d <= 200; ++d) {
        if (fundamental_discriminant_failure(d)) continue;
        const QuadraticCharacter chi = character_from_discriminant(d);
        ++built;
        const std::uint64_t q = chi.modulus();
        std::int64_t sum = 0;
        for (std::uint64_t a = 0; a < q; ++a) {
            sum += chi(a);
            ASSERT_EQ(chi(a) == 0, std::gcd(a, q) != 1);
            for (std::uint64_t b = 0; b < q; ++b) ASSERT_EQ(chi(a * b), chi(a) * chi(b));
        }
        ASSERT_EQ(sum, 0);
    }
    EXPECT_GT(built, 100);
}

TEST(Table, AcceptsAndRejects) {
    EXPECT_NO_THROW(character_from_table(3, {0, 1, -1}));
    EXPECT_NO_THROW(character_from_table(4, {0, 1, 0, -1}));
    EXPECT_THROW(character_from_table(3, {0, 1, 1}), ValidationError);       // principal
    EXPECT_THROW(character_from_table(3, {0, 1}), ValidationError);          // wrong length
    EXPECT_THROW(character_from_table(3, {1, 1, -1}), ValidationError);      // chi(0) != 0
    EXPECT_THROW(character_from_table(2, {0, 1}), ValidationError);          // q < 3
    EXPECT_THROW(character_from_table(3, {0, 2, -1}), ValidationError);      // not real
    try {
        character_from_table(5, {0, 1, -1, 1, -1});  // chi(2)^2 = 1 but chi(4) = -1
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find("witness pair"), std::string::npos);
    }
}

TEST(Table, ImprimitiveCharacterAccepted) {
    // chi_{-4} induced to modulus 12
    std::vector<int> v(12);
    for (int a = 0; a < 12; ++a) v[a] = std::gcd(a, 12) == 1 ? kronecker(-4, a) : 0;
    const QuadraticCharacter chi = character_from_table(12, v);
    EXPECT_EQ(chi.modulus(), 12u);
    EXPECT_FALSE(chi.discriminant().has_value());
    EXPECT_EQ(chi.bad_primes(), (std::vector<std::uint64_t>{2, 3}));
}

TEST(Characters, PartialSumsBoundedByModulus) {
    for (std::int64_t d : {-3, -4, 5, 8, -7, 13}) {
        const QuadraticCharacter chi = character_from_discriminant(d);
        std::int64_t s = 0;
        for (std::uint64_t x = 1; x <= 100'000; ++x) {
            s += chi(x);
            ASSERT_LE(std::abs(s), static_cast<std::int64_t>(chi.modulus()));
            ASSERT_EQ(chi.partial_sum(x), s);
        }
    }
}

TEST(Modified, Examples) {
    const ModifiedCharacter g(character_from_discriminant(-3));
    const SieveTable t = build_sieve(100);
    const CoefficientSequence gv = modified_values(g, t, 100);
    EXPECT_EQ(gv(3), 1);
    EXPECT_EQ(gv(6), -1);
    EXPECT_EQ(gv(9), 1);
    EXPECT_EQ(g(6), -1);
    EXPECT_THROW(modified_values(g, t, 101), CapacityError);
    EXPECT_THROW(ModifiedCharacter(character_from_discriminant(-3), 0), ValidationError);
}

TEST(Modified, CompletelyMultiplicativeAndUnimodular) {
    for (int sign : {1, -1}) {
        const ModifiedCharacter g(character_from_discriminant(-4), sign);
        const std::uint64_t n_max = 10'000;
        const SieveTable t = build_sieve(n_max);
        const CoefficientSequence gv = modified_values(g, t, n_max);
        EXPECT_EQ(gv(2), sign);
        EXPECT_EQ(gv(3), -1);
        for (std::uint64_t n = 1; n <= n_max; ++n) ASSERT_EQ(std::abs(gv(n)), 1);
        for (std::uint64_t m = 1; m <= n_max; ++m)
            for (std::uint64_t n = 1; m * n <= n_max; ++n) ASSERT_EQ(gv(m * n), gv(m) * gv(n)) << m << "," << n;
    }
}

TEST(FValues, Examples) {
    const SieveTable t = build_sieve(100);
    const ModifiedCharacter g(character_from_discriminant(-3));
    const CoefficientSequence f2 = f_values(KFreeParams(2), g, t, 100);
    const CoefficientSequence f3 = f_values(KFreeParams(3), g, t, 100);
    EXPECT_EQ(f2(9), 0);
    EXPECT_EQ(f2(6), oracle::mobius(6) * oracle::mobius(6) * g(6));
    EXPECT_EQ(f2(6), -1);
    EXPECT_EQ(f3(9), 1);
}

TEST(FValues, ProductOfIndicatorAndModifiedCharacter) {
    const std::uint64_t n_max = 20'000;
    const SieveTable t = build_sieve(n_max);
    for (int k : {2, 3}) {
        const ModifiedCharacter g(character_from_discriminant(5));
        const CoefficientSequence f = f_values(KFreeParams(k), g, t, n_max);
        for (std::uint64_t n = 1; n <= n_max; ++n) {
            const int expected = oracle::is_kfree(n, k) ? g(n) : 0;
            ASSERT_EQ(f(n), expected) << n;
        }
        // the streaming generator agrees with the table
        std::int64_t mism = 0;
        f_segments(
            KFreeParams(k), g, n_max,
            [&](std::uint64_t lo, std::span<const std::int8_t> v) {
                for (std::size_t i = 0; i < v.size(); ++i) mism += (v[i] != f(lo + i));
            },
            777);
        EXPECT_EQ(mism, 0);
    }
}
