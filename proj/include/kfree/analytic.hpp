// analytic.hpp
// Double-precision evaluation of zeta(s, a), zeta(s), L(s, chi), the finite
// Euler product P(s), the closed forms of F(s), the tail functions H_y and
// H~_y, and trapezoid quadrature along vertical lines.
//
// Hurwitz zeta uses Euler-Maclaurin summation:
//
//   zeta(s, a) = sum_{n<M} (n+a)^{-s} + (M+a)^{1-s}/(s-1) + (M+a)^{-s}/2
//              + sum_{j=1}^{p} B_{2j}/(2j)! (s)_{2j-1} (M+a)^{-s-2j+1} + R
//
//   |R| <= 2 zeta(2p+1)/(2 pi)^{2p+1} |(s)_{2p+1}| (M+a)^{-sigma-2p}/(sigma+2p)
//
// where (s)_m is the rising factorial and 2p = EvalBudget::bernoulli_order.
// The cutoff M is the smallest value >= 50 for which the bound on |R| meets
// the budget.
//
// Validated region: sigma >= 0.4, |t| <= EvalBudget::max_t (default 10^3).
// Outside it the engine throws RegionError rather than degrade silently.

#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "characters.hpp"
#include "coefficients.hpp"
#include "errors.hpp"
#include "parallel.hpp"
#include "sieve.hpp"

namespace kfree {

using Complex = std::complex<double>;

inline constexpr double kValidatedSigmaMin = 0.4;
inline constexpr double kHurwitzSigmaMin = -1.0;
inline constexpr double kPoleGuard = 1e-6;
inline constexpr std::uint64_t kMinCutoff = 50;

struct EvalBudget {
    double target_abs_error = 1e-10;
    std::uint64_t max_terms = 20'000'000;
    int bernoulli_order = 16;
    double max_t = 1e3;

    void validate() const {
        if (!(target_abs_error >= 1e-12))
            throw DomainError("target_abs_error must be >= 1e-12");
        if (bernoulli_order < 2 || bernoulli_order > 30 || bernoulli_order % 2 != 0)
            throw DomainError("bernoulli_order must be even and in [2, 30]");
        if (max_terms < kMinCutoff) throw DomainError("max_terms must be at least 50");
        if (!(max_t > 0) || !std::isfinite(max_t)) throw DomainError("max_t must be positive and finite");
    }
};

namespace detail {

inline std::string fmt_complex(Complex s) {
    std::ostringstream os;
    os.precision(10);
    os << s.real() << (s.imag() < 0 ? " - " : " + ") << std::abs(s.imag()) << "i";
    return os.str();
}

inline void require_finite(Complex s, const char* what) {
    if (!std::isfinite(s.real()) || !std::isfinite(s.imag()))
        throw DomainError(std::string(what) + ": non-finite argument");
}

// B_{2j} for j = 1..15.
inline constexpr std::array<double, 15> kBernoulli = {
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
    8553103.0 / 6.0,
    -23749461029.0 / 870.0,
    8615841276005.0 / 14322.0,
};

// Rigorous Euler-Maclaurin remainder bound at cutoff point u = M + a.
inline double em_remainder_bound(Complex s, double u, int order) {
    const int m = order + 1;  // (s)_{2p+1}
    double rising = 1.0;
    for (int i = 0; i < m; ++i) rising *= std::abs(s + static_cast<double>(i));
    const double two_pi = 2.0 * std::numbers::pi;
    const double zeta_odd = 1.0 + std::pow(2.0, -m) + std::pow(2.0, 1 - m) / (m - 1);  // >= zeta(2p+1)
    const double sigma = s.real();
    return 2.0 * zeta_odd * rising / std::pow(two_pi, m) * std::pow(u, -sigma - order) / (sigma + order);
}

// Smallest cutoff M >= 50 meeting `target` for all shifts a >= a_min.
inline std::uint64_t choose_cutoff(Complex s, double a_min, const EvalBudget& budget, double target) {
    auto ok = [&](std::uint64_t m) {
        return em_remainder_bound(s, static_cast<double>(m) + a_min, budget.bernoulli_order) <= target;
    };
    std::uint64_t hi = kMinCutoff;
    while (!ok(hi)) {
        if (hi >= budget.max_terms)
            throw RegionError("Euler-Maclaurin cutoff exceeds max_terms at s = " + fmt_complex(s));
        hi = std::min(hi * 2, budget.max_terms);
    }
    std::uint64_t lo = hi == kMinCutoff ? kMinCutoff : hi / 2;
    if (lo == hi) return hi;
    while (lo + 1 < hi) {
        const std::uint64_t mid = lo + (hi - lo) / 2;
        (ok(mid) ? hi : lo) = mid;
    }
    return hi;
}

// Euler-Maclaurin corrections at u: u^{-s}/2 + sum_j B_{2j}/(2j)! (s)_{2j-1} u^{-s-2j+1}.
inline Complex em_corrections(Complex s, double u, int order) {
    const Complex u_pow = std::exp(-s * std::log(u));  // u^{-s}
    Complex total = 0.5 * u_pow;
    Complex rising = s;  // (s)_{2j-1}
    double factorial = 2.0;
    double u_scale = 1.0 / u;  // u^{-2j+1}
    for (int j = 1; 2 * j <= order; ++j) {
        total += kBernoulli[j - 1] / factorial * rising * u_scale * u_pow;
        rising *= (s + static_cast<double>(2 * j - 1)) * (s + static_cast<double>(2 * j));
        factorial *= static_cast<double>((2 * j + 1) * (2 * j + 2));
        u_scale /= u * u;
    }
    return total;
}

// (e^z - 1)/z without cancellation near 0.
inline Complex expm1_over(Complex z) {
    if (std::abs(z) < 1e-4) return 1.0 + z / 2.0 + z * z / 6.0 + z * z * z / 24.0;
    return (std::exp(z) - 1.0) / z;
}

// log n for n < 2^20 from a table built once; std::log beyond.
inline double log_int(std::uint64_t n) {
    static const std::vector<double> table = [] {
        std::vector<double> t(std::size_t{1} << 20);
        t[0] = 0.0;
        for (std::size_t i = 1; i < t.size(); ++i) t[i] = std::log(static_cast<double>(i));
        return t;
    }();
    return n < table.size() ? table[n] : std::log(static_cast<double>(n));
}

// n^{-s} for integer n with a precomputed log n.
inline Complex inv_pow(double log_n, Complex s) {
    return std::polar(std::exp(-s.real() * log_n), -s.imag() * log_n);
}

inline void check_region(Complex s, double sigma_min, const EvalBudget& budget, const char* what) {
    require_finite(s, what);
    if (s.real() < sigma_min || std::abs(s.imag()) > budget.max_t) {
        std::ostringstream os;
        os << what << ": s = " << fmt_complex(s) << " outside validated region sigma >= " << sigma_min
           << ", |t| <= " << budget.max_t;
        throw RegionError(os.str());
    }
}

}  // namespace detail

// zeta(s, a) = sum_{n >= 0} (n + a)^{-s}, continued to sigma >= -1.
inline Complex hurwitz_zeta(Complex s, double a, const EvalBudget& budget = {}) {
    budget.validate();
    detail::check_region(s, kHurwitzSigmaMin, budget, "hurwitz_zeta");
    if (!(a > 0.0 && a <= 1.0)) throw DomainError("hurwitz_zeta: shift a must lie in (0, 1]");
    if (std::abs(s - 1.0) < kPoleGuard) throw PoleError("hurwitz_zeta: s = " + detail::fmt_complex(s) + " is at the pole s = 1");

    const std::uint64_t m = detail::choose_cutoff(s, a, budget, budget.target_abs_error / 2);
    std::vector<Complex> terms(m);
    for (std::uint64_t n = 0; n < m; ++n)
        terms[n] = a == 1.0 ? detail::inv_pow(detail::log_int(n + 1), s)
                            : std::exp(-s * std::log(static_cast<double>(n) + a));
    Complex total = pairwise_sum<Complex>(terms);
    const double u = static_cast<double>(m) + a;
    total += std::exp((1.0 - s) * std::log(u)) / (s - 1.0);
    total += detail::em_corrections(s, u, budget.bernoulli_order);
    return total;
}

inline Complex riemann_zeta(Complex s, const EvalBudget& budget = {}) { return hurwitz_zeta(s, 1.0, budget); }

// L(s, chi) = q^{-s} sum_{a=1}^{q} chi(a) zeta(s, a/q), assembled as one
// direct sum to qM followed by per-residue Euler-Maclaurin tails. The pole
// terms cancel because chi sums to zero, so s = 1 is evaluated directly.
inline Complex dirichlet_L(Complex s, const QuadraticCharacter& chi, const EvalBudget& budget = {}) {
    budget.validate();
    detail::check_region(s, kValidatedSigmaMin, budget, "dirichlet_L");
    const std::uint64_t q = chi.modulus();
    const double qd = static_cast<double>(q);
    const std::uint64_t m = detail::choose_cutoff(s, 1.0 / qd, budget, budget.target_abs_error / 2);
    if (m > budget.max_terms / q) throw RegionError("dirichlet_L: term budget exhausted");

    const std::uint64_t top = q * m;
    std::vector<Complex> terms;
    terms.reserve(top);
    for (std::uint64_t n = 1; n <= top; ++n) {
        const int c = chi(n);
        if (c != 0) terms.push_back(static_cast<double>(c) * detail::inv_pow(detail::log_int(n), s));
    }
    Complex direct = pairwise_sum<Complex>(terms);

    const Complex w = s - 1.0;
    Complex tail = 0.0;
    for (std::uint64_t a = 1; a <= q; ++a) {
        const int c = chi(a);
        if (c == 0) continue;
        const double u = static_cast<double>(m) + static_cast<double>(a) / qd;
        const double log_u = std::log(u);
        // u^{1-s}/(s-1) minus the residue-free 1/(s-1), which cancels over a.
        const Complex pole_part = -log_u * detail::expm1_over(-w * log_u);
        tail += static_cast<double>(c) * (pole_part + detail::em_corrections(s, u, budget.bernoulli_order));
    }
    return direct + std::exp(-s * std::log(qd)) * tail;
}

// P(s) = prod_{p | q} (1 - sign p^{-s})^{-1}; sign = +1 is the usual product.
inline Complex p_function(Complex s, std::uint64_t q, int bad_prime_sign = 1) {
    detail::require_finite(s, "p_function");
    if (s.real() <= 0.0) throw RegionError("p_function: requires sigma > 0, got s = " + detail::fmt_complex(s));
    if (std::abs(s) < kPoleGuard) throw PoleError("p_function: s = " + detail::fmt_complex(s) + " is at the pole s = 0");
    const double offset = bad_prime_sign == 1 ? 0.0 : std::numbers::pi;
    Complex prod = 1.0;
    for (std::uint64_t p : detail::distinct_prime_factors(q)) {
        const double log_p = std::log(static_cast<double>(p));
        // Poles at s = i (2 pi m + offset) / log p.
        const long long m = std::llround((s.imag() * log_p - offset) / (2.0 * std::numbers::pi));
        const Complex pole(0.0, (2.0 * std::numbers::pi * static_cast<double>(m) + offset) / log_p);
        if ((m != 0 || offset != 0.0) && std::abs(s - pole) < kPoleGuard)
            throw PoleError("p_function: s = " + detail::fmt_complex(s) + " is within 1e-6 of the pole (p, m) = (" +
                            std::to_string(p) + ", " + std::to_string(m) + ")");
        prod /= 1.0 - static_cast<double>(bad_prime_sign) * detail::inv_pow(log_p, s);
    }
    return prod;
}

// Closed form of F(s) = sum f(n) n^{-s} for f = mu^(k) g.
inline Complex F_closed_form(Complex s, KFreeParams k, const ModifiedCharacter& g, const EvalBudget& budget = {}) {
    if (s.real() <= 1.0 / k.k()) throw RegionError("F_closed_form: requires sigma > 1/k");
    const QuadraticCharacter& chi = g.base();
    const std::uint64_t q = chi.modulus();
    const int sign = g.bad_prime_sign();
    const Complex ks = static_cast<double>(k.k()) * s;
    if (k.even()) return dirichlet_L(s, chi, budget) * p_function(s, q, sign) / riemann_zeta(ks, budget);
    return dirichlet_L(s, chi, budget) / dirichlet_L(ks, chi, budget) * p_function(s, q, sign) /
           p_function(ks, q, sign);
}

inline Complex F_closed_form(Complex s, KFreeParams k, const QuadraticCharacter& chi, const EvalBudget& budget = {}) {
    return F_closed_form(s, k, ModifiedCharacter(chi), budget);
}

enum class TailVariant { even, odd };

struct TailFunctionSpec {
    int k = 2;
    ModifiedCharacter g;
    std::uint64_t y = 1;
    TailVariant variant = TailVariant::even;
};

// H_y(s)  = P(s)/zeta(ks)         - sum_{n<=y} h(n) n^{-s}   (k even)
// H~_y(s) = P(s)/(L(ks) P(ks))    - sum_{n<=y} h~(n) n^{-s}  (k odd)
//
// Admissible region: sigma >= 1/k + 0.05 with |t|, |kt| inside the validated
// region. Coefficients are computed once at construction.
class TailFunction {
public:
    static constexpr double kSigmaMargin = 0.05;

    explicit TailFunction(TailFunctionSpec spec) : spec_(std::move(spec)), k_(spec_.k) {
        if (spec_.y < 1) throw DomainError("tail function needs y >= 1");
        const bool even = spec_.variant == TailVariant::even;
        if (even != k_.even())
            throw ValidationError("tail variant does not match the parity of k = " + std::to_string(k_.k()));
        coeffs_ = core_coefficients(k_, spec_.g, spec_.y);
        for (const Term& t : coeffs_.terms()) logs_.push_back(std::log(static_cast<double>(t.n)));
    }

    const TailFunctionSpec& spec() const noexcept { return spec_; }
    const CoefficientSequence& coefficients() const noexcept { return coeffs_; }

    Complex closed_form(Complex s, const EvalBudget& budget = {}) const {
        const QuadraticCharacter& chi = spec_.g.base();
        const std::uint64_t q = chi.modulus();
        const int sign = spec_.g.bad_prime_sign();
        const Complex ks = static_cast<double>(k_.k()) * s;
        if (k_.even()) return p_function(s, q, sign) / riemann_zeta(ks, budget);
        return p_function(s, q, sign) / (dirichlet_L(ks, chi, budget) * p_function(ks, q, sign));
    }

    Complex truncated_sum(Complex s) const {
        std::vector<Complex> terms(logs_.size());
        const auto ts = coeffs_.terms();
        for (std::size_t i = 0; i < ts.size(); ++i)
            terms[i] = static_cast<double>(ts[i].value) * detail::inv_pow(logs_[i], s);
        return pairwise_sum<Complex>(terms);
    }

    Complex operator()(Complex s, const EvalBudget& budget = {}) const {
        detail::require_finite(s, "tail_function");
        const double sigma_min = 1.0 / k_.k() + kSigmaMargin;
        if (s.real() < sigma_min - 1e-12)
            throw RegionError("tail_function: s = " + detail::fmt_complex(s) + " outside admissible region sigma >= 1/k + 0.05");
        return closed_form(s, budget) - truncated_sum(s);
    }

private:
    TailFunctionSpec spec_;
    KFreeParams k_;
    CoefficientSequence coeffs_;
    std::vector<double> logs_;
};

inline Complex tail_function(const TailFunctionSpec& spec, Complex s, const EvalBudget& budget = {}) {
    return TailFunction(spec)(s, budget);
}

struct LineQuadrature {
    double step = 0.01;
    // log x of an oscillating factor x^{it}; the step must then be at most
    // 2 pi / (20 log x).
    std::optional<double> log_x;
    // G(conj s) = conj G(s): integrate over [0, T] and double the real part.
    bool conjugate_symmetric = false;
};

struct LineIntegral {
    Complex value;                   // trapezoid result at step h/2
    double discretization_estimate;  // |I(h) - I(h/2)|
    double step;                     // the h actually used (2T / intervals)
    std::size_t evaluations;
};

inline double max_step_for(double log_x) { return 2.0 * std::numbers::pi / (20.0 * log_x); }

// (1 / 2 pi i) * integral over sigma0 - iT .. sigma0 + iT of G(s) ds
// = (1 / 2 pi) * integral_{-T}^{T} G(sigma0 + it) dt, by composite trapezoid.
inline LineIntegral vertical_line_integral(const std::function<Complex(Complex)>& integrand, double sigma0, double T,
                                           const LineQuadrature& control) {
    if (!(T > 0) || !std::isfinite(T)) throw DomainError("vertical_line_integral: T must be positive");
    if (!(control.step > 0)) throw DomainError("vertical_line_integral: step must be positive");
    if (control.log_x) {
        const double limit = max_step_for(*control.log_x);
        if (control.step > limit * (1 + 1e-12)) {
            std::ostringstream os;
            os << "vertical_line_integral: step " << control.step << " does not resolve x^{it}; use step <= " << limit;
            throw DomainError(os.str());
        }
    }
    const double t_lo = control.conjugate_symmetric ? 0.0 : -T;
    const double length = T - t_lo;
    const auto intervals = static_cast<std::size_t>(std::ceil(length / control.step - 1e-9));
    const std::size_t fine = 2 * intervals;
    const double h_fine = length / static_cast<double>(fine);

    std::vector<Complex> values(fine + 1);
    parallel_fill(values, [&](std::size_t i) {
        const double t = (i == fine) ? T : t_lo + static_cast<double>(i) * h_fine;
        return integrand(Complex(sigma0, t));
    });

    std::vector<Complex> odd;
    std::vector<Complex> even;
    odd.reserve(intervals);
    even.reserve(intervals + 1);
    for (std::size_t i = 0; i <= fine; ++i) (i % 2 ? odd : even).push_back(values[i]);
    const Complex ends = 0.5 * (values.front() + values.back());
    const Complex sum_even = pairwise_sum<Complex>(even) - ends;  // interior coarse nodes + half ends
    const Complex sum_odd = pairwise_sum<Complex>(odd);
    Complex coarse = 2.0 * h_fine * sum_even;
    Complex finer = h_fine * (sum_even + sum_odd);

    const double norm = 1.0 / (2.0 * std::numbers::pi);
    if (control.conjugate_symmetric) {
        coarse = Complex(2.0 * coarse.real(), 0.0);
        finer = Complex(2.0 * finer.real(), 0.0);
    }
    coarse *= norm;
    finer *= norm;
    return LineIntegral{finer, std::abs(finer - coarse), 2.0 * h_fine, fine + 1};
}

}  // namespace kfree
