#include <gtest/gtest.h>

#include <cstdint>
#include <random>
#include <vector>

#include "kfree/coefficients.hpp"
#include "oracles.hpp"

using namespace kfree;

namespace {

CoefficientSequence random_sparse(std::mt19937_64& rng, std::uint64_t n_max, int count) {
    std::uniform_int_distribution<std::uint64_t> pos(1, n_max);
    std::uniform_int_distribution<int> val(-3, 3);
    std::vector<Term> t;
    for (int i = 0; i < count; ++i) t.push_back({pos(rng), val(rng)});
    return CoefficientSequence::sparse("r", n_max, t);
}

CoefficientSequence random_dense(std::mt19937_64& rng, std::uint64_t n_max) {
    std::uniform_int_distribution<int> val(-2, 2);
    std::vector<std::int64_t> v(n_max + 1);
    for (auto& x : v) x = val(rng);
    return CoefficientSequence::dense("r", v);
}

}  // namespace

TEST(Sequence, SparseMergesAndDropsZeros) {
    const auto s = CoefficientSequence::sparse("s", 10, {{5, 2}, {3, 1}, {5, -2}, {7, 4}});
    EXPECT_EQ(s.support_size(), 2u);
    EXPECT_EQ(s(3), 1);
    EXPECT_EQ(s(5), 0);
    EXPECT_EQ(s(7), 4);
    EXPECT_THROW(s(11), CapacityError);
    EXPECT_THROW(CoefficientSequence::sparse("s", 10, {{11, 1}}), DomainError);
    EXPECT_TRUE(s.same_values(s.to_dense()));
    EXPECT_TRUE(s.to_dense().to_sparse().same_values(s));
}

TEST(Convolution, MobiusInvertsOne) {
    const std::uint64_t n_max = 5000;
    const SieveTable t = build_sieve(n_max);
    const CoefficientSequence one = CoefficientSequence::dense("1", std::vector<std::int64_t>(n_max + 1, 1));
    const CoefficientSequence d = dirichlet_convolve(one, mobius_values(t, n_max));
    EXPECT_TRUE(d.same_values(unit_sequence(n_max)));
}

TEST(Convolution, DeltaIsIdentity) {
    std::mt19937_64 rng(7);
    const std::uint64_t n_max = 3000;
    const auto a = random_dense(rng, n_max);
    const auto b = random_sparse(rng, n_max, 50);
    EXPECT_TRUE(dirichlet_convolve(a, unit_sequence(n_max)).same_values(a));
    EXPECT_TRUE(dirichlet_convolve(unit_sequence(n_max), b).same_values(b));
}

TEST(Convolution, CommutativeAndAssociative) {
    std::mt19937_64 rng(11);
    const std::uint64_t n_max = 2000;
    for (int trial = 0; trial < 5; ++trial) {
        const auto a = random_dense(rng, n_max);
        const auto b = random_sparse(rng, n_max, 40);
        const auto c = random_sparse(rng, n_max, 40);
        EXPECT_TRUE(dirichlet_convolve(a, b).same_values(dirichlet_convolve(b, a)));
        EXPECT_TRUE(dirichlet_convolve(b, c).same_values(dirichlet_convolve(c, b)));
        EXPECT_TRUE(dirichlet_convolve(dirichlet_convolve(a, b), c)
                        .same_values(dirichlet_convolve(a, dirichlet_convolve(b, c))));
        EXPECT_TRUE(dirichlet_convolve(b, c).is_sparse());
    }
}

TEST(Convolution, MatchesDivisorEnumeration) {
    std::mt19937_64 rng(3);
    const std::uint64_t n_max = 600;
    const auto a = random_dense(rng, n_max);
    const auto b = random_sparse(rng, n_max, 30);
    const auto c = dirichlet_convolve(a, b);
    for (std::uint64_t n = 1; n <= n_max; ++n)
        ASSERT_EQ(c(n), oracle::convolve_at([&](std::uint64_t d) { return a(d); },
                                            [&](std::uint64_t d) { return b(d); }, n));
}

TEST(Convolution, RejectsMismatchedLimits) {
    EXPECT_THROW(dirichlet_convolve(unit_sequence(10), unit_sequence(11)), DomainError);
}

TEST(NuPsi, Examples) {
    const QuadraticCharacter chi = character_from_discriminant(-3);
    const auto nu = nu_values(KFreeParams(2), 100);
    // candidate positions d^2 for d = 1..10; mu(d) vanishes at d = 4, 8, 9
    EXPECT_EQ(integer_root(100, 2), 10u);
    EXPECT_EQ(nu.support_size(), 7u);
    EXPECT_EQ(nu(4), -1);
    EXPECT_EQ(nu(36), 1);
    EXPECT_EQ(nu(16), 0);
    EXPECT_EQ(nu(2), 0);
    const auto psi = psi_values(KFreeParams(3), chi, 100);
    EXPECT_EQ(psi(8), 1);  // mu(2) chi(2) = (-1)(-1)
    EXPECT_EQ(psi(27), 0);
    EXPECT_EQ(psi(64), 0);
}

TEST(Core, Membership) {
    const QCoreSet core(12, 1000);
    EXPECT_TRUE(core.contains(1));
    EXPECT_TRUE(core.contains(96));
    EXPECT_FALSE(core.contains(10));
    EXPECT_FALSE(core.contains(0));
    for (std::uint64_t n = 1; n <= 1000; ++n) {
        const bool listed = std::binary_search(core.members().begin(), core.members().end(), n);
        ASSERT_EQ(listed, oracle::in_core(n, 12)) << n;
        ASSERT_EQ(core.contains(n), listed);
    }
}

TEST(H, Examples) {
    const QCoreSet c3(3, 100);
    const auto h = h_coefficients(KFreeParams(2), c3, 100);
    EXPECT_EQ(h(1), 1);
    EXPECT_EQ(h(3), 1);
    EXPECT_EQ(h(4), -1);
    EXPECT_EQ(h(36), 0);
    EXPECT_EQ(h(2), 0);

    const QCoreSet c4(4, 100);
    EXPECT_EQ(h_coefficients(KFreeParams(2), c4, 100)(4), 0);

    const QuadraticCharacter chi = character_from_discriminant(-3);
    const auto ht = htilde_coefficients(KFreeParams(3), chi, c3, 100);
    EXPECT_EQ(ht(1), 1);
    EXPECT_EQ(ht(3), 1);
    EXPECT_EQ(ht(8), 1);
}

TEST(H, ChiConvolutionAtSix) {
    const QCoreSet c3(3, 100);
    const auto h = h_coefficients(KFreeParams(2), c3, 100);
    const auto chi = periodic_character_sequence(character_from_discriminant(-3), 100);
    EXPECT_EQ(dirichlet_convolve(chi, h)(6), -1);
}

TEST(H, MatchesBruteForceOracles) {
    const std::uint64_t n_max = 10'000;
    for (std::int64_t d : {-3, -4, 5, 8}) {
        const QuadraticCharacter chi = character_from_discriminant(d);
        const std::uint64_t q = chi.modulus();
        const QCoreSet core(q, n_max);
        for (int k : {2, 3}) {
            const auto nu = nu_values(KFreeParams(k), n_max);
            const auto psi = psi_values(KFreeParams(k), chi, n_max);
            const auto h = h_coefficients(KFreeParams(k), core, n_max);
            for (std::uint64_t n = 1; n <= n_max; ++n) {
                ASSERT_EQ(nu(n), oracle::nu(n, k));
                const std::uint64_t r = oracle::kth_root(n, k);
                ASSERT_EQ(psi(n), r ? oracle::mobius(r) * chi(r) : 0);
                ASSERT_EQ(h(n), oracle::h(n, k, q)) << "d=" << d << " k=" << k << " n=" << n;
            }
        }
        const auto ht = htilde_coefficients(KFreeParams(3), chi, core, 2000);
        for (std::uint64_t n = 1; n <= 2000; ++n)
            ASSERT_EQ(ht(n), oracle::htilde(n, 3, q, [&](std::uint64_t m) { return chi(m); })) << d << " " << n;
    }
}

TEST(H, SupportLiesInKthPowerTimesCore) {
    const std::uint64_t n_max = 100'000;
    const QCoreSet core(3, n_max);
    const auto h = h_coefficients(KFreeParams(2), core, n_max);
    for (const Term& t : h.terms()) {
        bool found = false;
        for (std::uint64_t d = 1; d * d <= t.n && !found; ++d)
            if (t.n % (d * d) == 0 && core.contains(t.n / (d * d))) found = true;
        ASSERT_TRUE(found) << t.n;
    }
}

TEST(Factorization, HoldsForSmallModuli) {
    const std::uint64_t n_max = 50'000;
    const SieveTable t = build_sieve(n_max);
    for (std::int64_t d : {-3, -4, 5, 8, -7, 12}) {
        for (int k : {2, 3, 4}) {
            for (int sign : {1, -1}) {
                const ModifiedCharacter g(character_from_discriminant(d), sign);
                const FactorizationReport r = verify_factorization(KFreeParams(k), g, t, n_max);
                EXPECT_TRUE(r.holds()) << "d=" << d << " k=" << k << " sign=" << sign << " n=" << (r.holds() ? 0 : r.mismatch->n);
                EXPECT_EQ(r.identity, k % 2 == 0 ? "f = chi*h" : "f = chi*htilde");
            }
        }
    }
}

TEST(Factorization, DetectsACorruptedCharacter) {
    // Using chi_{-4} coefficients for f built from chi_{-3} must fail.
    const std::uint64_t n_max = 100;
    const SieveTable t = build_sieve(n_max);
    const ModifiedCharacter g(character_from_discriminant(-3));
    const auto f = f_values(KFreeParams(2), g, t, n_max);
    const auto wrong = dirichlet_convolve(periodic_character_sequence(character_from_discriminant(-4), n_max),
                                          h_coefficients(KFreeParams(2), QCoreSet(3, n_max), n_max));
    EXPECT_FALSE(f.same_values(wrong));
}

TEST(SumAbs, ExamplesAndMonotone) {
    const QCoreSet core(3, 100'000);
    const auto h = h_coefficients(KFreeParams(2), core, 100'000);
    EXPECT_EQ(sum_abs(h, 1), 1);
    EXPECT_EQ(sum_abs(h, 4), 3);  // h(1), h(3), h(4)
    std::int64_t prev = 0;
    for (std::uint64_t x = 1; x <= 100'000; x = x * 3 + 1) {
        const std::int64_t s = sum_abs(h, x);
        EXPECT_GE(s, prev);
        prev = s;
    }
    EXPECT_THROW(sum_abs(h, 100'001), CapacityError);
}
