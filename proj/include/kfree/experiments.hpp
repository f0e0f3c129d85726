// experiments.hpp
// Runnable checks of the quantitative claims about f = mu^(k) g: partial-sum
// growth and exponent fits, the A/B split of sum f(n), Perron residuals,
// mean values of L on vertical lines, and tail decay of H_y.
//
// Every "<<" bound is checked as a bounded ratio with an explicit slack; the
// implied constants are unknown, so nothing here proves anything.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "analytic.hpp"
#include "characters.hpp"
#include "coefficients.hpp"
#include "errors.hpp"
#include "sequence.hpp"
#include "sieve.hpp"

namespace kfree {

inline constexpr double kCheckpointRatio = 1.1;

// floor(start * 1.1^j) for j = 0, 1, ... up to x_max, deduplicated, with x_max
// appended when it is not already the last point.
inline std::vector<std::uint64_t> checkpoint_grid(std::uint64_t x_max, std::uint64_t start = 10) {
    std::vector<std::uint64_t> grid;
    for (int j = 0;; ++j) {
        const auto x = static_cast<std::uint64_t>(std::floor(static_cast<double>(start) * std::pow(kCheckpointRatio, j)));
        if (x > x_max) break;
        if (grid.empty() || grid.back() != x) grid.push_back(x);
    }
    if (grid.empty() || grid.back() != x_max) grid.push_back(x_max);
    return grid;
}

struct CheckpointSeries {
    std::vector<std::uint64_t> checkpoints;
    std::vector<std::int64_t> partial_sum;
    std::vector<std::int64_t> running_max;  // max_{m <= x} |S(m)| over all integers m
};

// Streaming accumulator; feed values for n = 1, 2, 3, ... in order.
class PartialSumTracker {
public:
    explicit PartialSumTracker(std::vector<std::uint64_t> grid) {
        series_.checkpoints = std::move(grid);
        series_.partial_sum.reserve(series_.checkpoints.size());
        series_.running_max.reserve(series_.checkpoints.size());
    }

    void push(std::int64_t value) {
        ++n_;
        sum_ += value;
        max_ = std::max(max_, sum_ < 0 ? -sum_ : sum_);
        if (next_ < series_.checkpoints.size() && series_.checkpoints[next_] == n_) {
            series_.partial_sum.push_back(sum_);
            series_.running_max.push_back(max_);
            ++next_;
        }
    }

    std::uint64_t count() const noexcept { return n_; }
    CheckpointSeries take() && { return std::move(series_); }

private:
    CheckpointSeries series_;
    std::uint64_t n_ = 0;
    std::int64_t sum_ = 0;
    std::int64_t max_ = 0;
    std::size_t next_ = 0;
};

inline CheckpointSeries partial_sum_series(const CoefficientSequence& values, std::uint64_t x_max) {
    if (x_max < 100) throw DomainError("partial_sum_series requires x_max >= 100");
    if (x_max > values.limit())
        throw CapacityError("partial_sum_series: x_max exceeds the limit of '" + values.name() + "'");
    PartialSumTracker tracker(checkpoint_grid(x_max));
    if (values.is_sparse()) {
        std::size_t i = 0;
        const auto ts = values.terms();
        for (std::uint64_t n = 1; n <= x_max; ++n) {
            std::int64_t v = 0;
            if (i < ts.size() && ts[i].n == n) v = ts[i++].value;
            tracker.push(v);
        }
    } else {
        const auto dv = values.dense_values();
        for (std::uint64_t n = 1; n <= x_max; ++n) tracker.push(dv[n]);
    }
    return std::move(tracker).take();
}

// Same series for f = mu^(k) g, generated segment by segment.
inline CheckpointSeries partial_sum_series(KFreeParams k, const ModifiedCharacter& g, std::uint64_t x_max,
                                           std::uint64_t segment_width = kDefaultSegmentWidth) {
    if (x_max < 100) throw DomainError("partial_sum_series requires x_max >= 100");
    PartialSumTracker tracker(checkpoint_grid(x_max));
    f_segments(
        k, g, x_max,
        [&](std::uint64_t, std::span<const std::int8_t> vals) {
            for (std::int8_t v : vals) tracker.push(v);
        },
        segment_width);
    return std::move(tracker).take();
}

struct LinearFit {
    double slope = 0;
    double intercept = 0;
    double r_squared = 0;
};

inline LinearFit least_squares(std::span<const double> xs, std::span<const double> ys) {
    const std::size_t n = xs.size();
    if (n < 2 || ys.size() != n) throw DomainError("least_squares needs at least two paired points");
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    if (sxx == 0) throw DomainError("least_squares: abscissae are all equal");
    LinearFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r_squared = syy == 0 ? 1.0 : (sxy * sxy) / (sxx * syy);
    return f;
}

struct ExponentFit {
    double slope = 0;
    double intercept = 0;
    double r_squared = 0;
    std::uint64_t window_lo = 0;
    std::uint64_t window_hi = 0;
    std::size_t points = 0;
};

inline constexpr std::size_t kMinFitPoints = 10;

// Least squares of log running_max against log x over the top
// `window_fraction` of checkpoints by index; zero maxima are skipped.
inline ExponentFit fit_exponent(const CheckpointSeries& series, double window_fraction = 0.5) {
    if (!(window_fraction > 0.0 && window_fraction <= 1.0))
        throw DomainError("window_fraction must lie in (0, 1]");
    const std::size_t total = series.checkpoints.size();
    const auto take = static_cast<std::size_t>(std::ceil(window_fraction * static_cast<double>(total)));
    std::vector<double> lx, ly;
    ExponentFit fit;
    for (std::size_t i = total - std::min(take, total); i < total; ++i) {
        if (series.running_max[i] <= 0) continue;
        if (lx.empty()) fit.window_lo = series.checkpoints[i];
        fit.window_hi = series.checkpoints[i];
        lx.push_back(std::log(static_cast<double>(series.checkpoints[i])));
        ly.push_back(std::log(static_cast<double>(series.running_max[i])));
    }
    if (lx.size() < kMinFitPoints)
        throw DomainError("fit_exponent: " + std::to_string(lx.size()) + " usable checkpoints, need at least " +
                          std::to_string(kMinFitPoints));
    const LinearFit lf = least_squares(lx, ly);
    fit.slope = lf.slope;
    fit.intercept = lf.intercept;
    fit.r_squared = lf.r_squared;
    fit.points = lx.size();
    return fit;
}

// running_max(x) / x^{exponent} over checkpoints x >= from.
struct GrowthRatioCheck {
    double exponent = 0;
    std::vector<std::uint64_t> x;
    std::vector<double> ratio;
    std::vector<std::uint64_t> increases;  // checkpoints where the ratio rose
    bool non_increasing() const noexcept { return increases.empty(); }
};

inline GrowthRatioCheck growth_ratio_check(const CheckpointSeries& series, double exponent, std::uint64_t from) {
    GrowthRatioCheck c;
    c.exponent = exponent;
    for (std::size_t i = 0; i < series.checkpoints.size(); ++i) {
        const std::uint64_t x = series.checkpoints[i];
        if (x < from) continue;
        const double r = static_cast<double>(series.running_max[i]) / std::pow(static_cast<double>(x), exponent);
        if (!c.ratio.empty() && r > c.ratio.back()) c.increases.push_back(x);
        c.x.push_back(x);
        c.ratio.push_back(r);
    }
    return c;
}

// sum_{n <= x} |h(n)| / (x^{1/k} (log 3x)^{pi(q) + extra_log}), with
// extra_log = 0 for h (k even) and 1 for h~ (k odd).
struct CoreSumRow {
    std::uint64_t x;
    std::int64_t sum_abs;
    double ratio;
};

inline std::vector<CoreSumRow> core_sum_ratio_series(KFreeParams k, const ModifiedCharacter& g, std::uint64_t x_min,
                                                     std::uint64_t x_max) {
    const CoefficientSequence h = core_coefficients(k, g, x_max);
    const std::uint64_t q = g.base().modulus();
    const double log_power = static_cast<double>(primes_up_to(q).size()) + (k.even() ? 0.0 : 1.0);
    std::vector<CoreSumRow> rows;
    std::int64_t running = 0;
    std::size_t i = 0;
    const auto ts = h.terms();
    for (std::uint64_t x : checkpoint_grid(x_max, x_min)) {
        while (i < ts.size() && ts[i].n <= x) running += std::abs(ts[i++].value);
        const double xd = static_cast<double>(x);
        const double denom = std::pow(xd, 1.0 / k.k()) * std::pow(std::log(3.0 * xd), log_power);
        rows.push_back({x, running, static_cast<double>(running) / denom});
    }
    return rows;
}

struct ProofSplitConfig {
    int k = 2;
    std::uint64_t x = 0;
    double beta = 0.5;
    double epsilon_slack = 0.01;
    std::uint64_t y = 0;
    double T = 0;

    // y = floor(x^{2k beta / (2k beta + 1)}), T = x^2 unless given.
    static ProofSplitConfig make(int k, std::uint64_t x, double beta, double epsilon_slack,
                                 std::optional<std::uint64_t> y = std::nullopt, std::optional<double> T = std::nullopt) {
        ProofSplitConfig c;
        c.k = k;
        c.x = x;
        c.beta = beta;
        c.epsilon_slack = epsilon_slack;
        const double e = 2.0 * k * beta / (2.0 * k * beta + 1.0);
        c.y = y ? *y : static_cast<std::uint64_t>(std::floor(std::pow(static_cast<double>(x), e)));
        c.T = T ? *T : static_cast<double>(x) * static_cast<double>(x);
        c.validate();
        return c;
    }

    void validate() const {
        KFreeParams{k};
        if (!(epsilon_slack > 0)) throw ConfigError("epsilon_slack must be positive");
        if (beta < 0.5 + epsilon_slack) throw ConfigError("beta must be at least 1/2 + epsilon_slack");
        if (x < 2) throw ConfigError("split point x must be at least 2");
        if (y >= x) throw ConfigError("split requires y < x (got y = " + std::to_string(y) + ", x = " + std::to_string(x) + ")");
        if (y < 1) throw ConfigError("split requires y >= 1");
    }
};

struct ABSplit {
    std::int64_t A = 0;  // sum over ab <= x with a <= y of h(a) chi(b)
    std::int64_t B = 0;  // sum over ab <= x with a > y
    std::int64_t total() const noexcept { return A + B; }
};

// Iterates the sparse support of h (or h~) and sums chi over b <= x/a in O(1)
// through one period of prefix sums.
inline ABSplit ab_split_sums(const ProofSplitConfig& cfg, const QuadraticCharacter& chi,
                             const CoefficientSequence& core) {
    cfg.validate();
    if (core.limit() < cfg.x) throw CapacityError("ab_split_sums: coefficients computed only to " + std::to_string(core.limit()));
    ABSplit r;
    core.for_each_nonzero([&](std::uint64_t a, std::int64_t ha) {
        if (a > cfg.x) return;
        const std::int64_t contrib = ha * chi.partial_sum(cfg.x / a);
        (a <= cfg.y ? r.A : r.B) += contrib;
    });
    return r;
}

inline ABSplit ab_split_sums(const ProofSplitConfig& cfg, const ModifiedCharacter& g) {
    return ab_split_sums(cfg, g.base(), core_coefficients(KFreeParams(cfg.k), g, cfg.x));
}

inline std::int64_t direct_partial_sum(KFreeParams k, const ModifiedCharacter& g, std::uint64_t x) {
    std::int64_t s = 0;
    f_segments(k, g, x, [&](std::uint64_t, std::span<const std::int8_t> vals) {
        for (std::int8_t v : vals) s += v;
    });
    return s;
}

struct PerronCheckResult {
    double x = 0;
    double T = 0;
    double sigma0 = 0;
    std::int64_t direct_sum = 0;
    double integral_value = 0;
    double residual = 0;
    double r_bound = 0;
    double quadrature_estimate = 0;
    double step = 0;
    std::size_t evaluations = 0;
    bool pass() const noexcept { return residual <= r_bound + quadrature_estimate; }
};

// Error term of the truncated Perron formula with unit implied constant:
//   sum_{x/2 < n < 2x, n != x} |f(n)| min(1, x / (T |x - n|))
//     + (x^{sigma0} + 4^{sigma0}) / T * sum_n |f(n)| n^{-sigma0},
// where sum |f(n)| n^{-sigma0} = zeta(sigma0) / zeta(k sigma0).
inline double perron_error_bound(KFreeParams k, const ModifiedCharacter& g, double x, double T, double sigma0) {
    const auto lo = static_cast<std::uint64_t>(std::floor(x / 2.0)) + 1;
    const auto hi = static_cast<std::uint64_t>(std::ceil(2.0 * x)) - 1;
    double near = 0;
    f_segments(k, g, hi, [&](std::uint64_t base, std::span<const std::int8_t> vals) {
        for (std::size_t i = 0; i < vals.size(); ++i) {
            const std::uint64_t n = base + i;
            const double nd = static_cast<double>(n);
            if (n < lo || vals[i] == 0 || nd == x) continue;
            near += std::min(1.0, x / (T * std::abs(x - nd)));
        }
    });
    EvalBudget b;
    const double dirichlet = riemann_zeta(sigma0, b).real() / riemann_zeta(k.k() * sigma0, b).real();
    return near + (std::pow(x, sigma0) + std::pow(4.0, sigma0)) / T * dirichlet;
}

struct PerronOptions {
    std::optional<double> sigma0;  // default 1 + 1/log x
    std::optional<double> step;    // default 2 pi / (20 log x)
    EvalBudget budget{1e-9, 20'000'000, 30, 0};  // max_t set from T
};

// Compares sum_{n <= x} f(n) with (1/2 pi i) int F(s) x^s / s ds over
// sigma0 +- iT. x should be a half-integer so that n = x never occurs.
inline PerronCheckResult perron_check(KFreeParams k, const ModifiedCharacter& g, double x, double T,
                                      const PerronOptions& opts = {}) {
    if (!(x > 1.0)) throw DomainError("perron_check requires x > 1");
    if (!(T > 0)) throw DomainError("perron_check requires T > 0");
    const double log_x = std::log(x);
    PerronCheckResult r;
    r.x = x;
    r.T = T;
    r.sigma0 = opts.sigma0.value_or(1.0 + 1.0 / log_x);
    if (r.sigma0 <= 1.0) throw RegionError("perron_check: sigma0 must exceed 1");
    r.direct_sum = direct_partial_sum(k, g, static_cast<std::uint64_t>(std::floor(x)));

    EvalBudget budget = opts.budget;
    budget.max_t = std::max(budget.max_t, k.k() * T);
    const auto integrand = [&](Complex s) {
        return F_closed_form(s, k, g, budget) * std::exp(s * log_x) / s;
    };
    LineQuadrature lq;
    lq.step = opts.step.value_or(max_step_for(log_x));
    lq.log_x = log_x;
    lq.conjugate_symmetric = true;
    const LineIntegral li = vertical_line_integral(integrand, r.sigma0, T, lq);
    r.integral_value = li.value.real();
    r.quadrature_estimate = li.discretization_estimate;
    r.step = li.step;
    r.evaluations = li.evaluations;
    r.residual = std::abs(static_cast<double>(r.direct_sum) - r.integral_value);
    r.r_bound = perron_error_bound(k, g, x, T, r.sigma0);
    return r;
}

struct MomentResult {
    double T = 0;
    double sigma = 0;
    double integral = 0;  // over t in [-T, T]
    double ratio = 0;     // integral / normaliser
    double discretization_estimate = 0;
};

inline constexpr double kMomentStep = 0.05;

namespace detail {

inline MomentResult symmetric_t_integral(const std::function<double(Complex)>& fn, double sigma, double T, double step,
                                         double normaliser) {
    LineQuadrature lq;
    lq.step = step;
    lq.conjugate_symmetric = true;
    const LineIntegral li = vertical_line_integral([&](Complex s) { return Complex(fn(s), 0.0); }, sigma, T, lq);
    const double two_pi = 2.0 * std::numbers::pi;
    MomentResult m;
    m.T = T;
    m.sigma = sigma;
    m.integral = two_pi * li.value.real();
    m.discretization_estimate = two_pi * li.discretization_estimate;
    m.ratio = m.integral / normaliser;
    return m;
}

}  // namespace detail

// int_{-T}^{T} |L(sigma + it, chi)|^2 dt and its ratio to T log T.
inline MomentResult second_moment_L(const QuadraticCharacter& chi, double sigma, double T, double step = kMomentStep,
                                    const EvalBudget& budget = {}) {
    if (sigma < 0.5) throw RegionError("second_moment_L requires sigma >= 1/2");
    if (!(T > 1.0)) throw DomainError("second_moment_L requires T > 1");
    return detail::symmetric_t_integral([&](Complex s) { return std::norm(dirichlet_L(s, chi, budget)); }, sigma, T,
                                        step, T * std::log(T));
}

// int_{-T}^{T} |L(sigma + it, chi)| / |sigma + it| dt and its ratio to (log T)^{3/2}.
inline MomentResult l_over_s_integral(const QuadraticCharacter& chi, double sigma, double T, double step = kMomentStep,
                                      const EvalBudget& budget = {}) {
    if (sigma < 0.5) throw RegionError("l_over_s_integral requires sigma >= 1/2");
    if (!(T > 1.0)) throw DomainError("l_over_s_integral requires T > 1");
    return detail::symmetric_t_integral([&](Complex s) { return std::abs(dirichlet_L(s, chi, budget)) / std::abs(s); },
                                        sigma, T, step, std::pow(std::log(T), 1.5));
}

struct TailDecayRow {
    std::uint64_t y;
    Complex H;
};

struct TailDecaySeries {
    Complex s;
    std::vector<TailDecayRow> rows;
    double fitted_slope = 0;
    double predicted_slope = 0;  // 1/(2k) - sigma
};

// |H_y(s)| (or |H~_y(s)|) over y for each s, with the slope of log|H| in log y.
inline std::vector<TailDecaySeries> tail_decay_experiment(KFreeParams k, const ModifiedCharacter& g,
                                                          std::span<const Complex> s_list,
                                                          std::span<const std::uint64_t> y_list,
                                                          const EvalBudget& budget = {}) {
    if (y_list.size() < 2) throw DomainError("tail_decay_experiment needs at least two y values");
    std::vector<TailFunction> tails;
    for (std::uint64_t y : y_list)
        tails.emplace_back(TailFunctionSpec{k.k(), g, y, k.even() ? TailVariant::even : TailVariant::odd});

    std::vector<TailDecaySeries> out;
    for (Complex s : s_list) {
        TailDecaySeries series;
        series.s = s;
        series.predicted_slope = 1.0 / (2.0 * k.k()) - s.real();
        std::vector<double> lx, ly;
        for (std::size_t i = 0; i < tails.size(); ++i) {
            const Complex H = tails[i](s, budget);
            series.rows.push_back({y_list[i], H});
            lx.push_back(std::log(static_cast<double>(y_list[i])));
            ly.push_back(std::log(std::abs(H)));
        }
        series.fitted_slope = least_squares(lx, ly).slope;
        out.push_back(std::move(series));
    }
    return out;
}

// sum_{n > y, n in supp h} n^{-sigma}, evaluated to n <= n_max: the
// triangle-inequality majorant of |H_y(sigma + it)| (exact as n_max grows).
inline double tail_majorant(const CoefficientSequence& core, std::uint64_t y, double sigma) {
    double s = 0;
    core.for_each_nonzero([&](std::uint64_t n, std::int64_t v) {
        if (n > y) s += static_cast<double>(std::abs(v)) * std::pow(static_cast<double>(n), -sigma);
    });
    return s;
}

}  // namespace kfree
