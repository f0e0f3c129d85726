// report.hpp
// Experiment configuration, CSV/JSON persistence, and the command dispatcher
// behind the kfree CLI. Every run yields one RunRecord, written as JSON next
// to the CSV files it produced.
//
// Exit codes: 0 success, 1 validation/configuration error, 2 computation error
// (region, pole, capacity, or a failed exact identity).

#pragma once

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "analytic.hpp"
#include "characters.hpp"
#include "coefficients.hpp"
#include "errors.hpp"
#include "experiments.hpp"
#include "sieve.hpp"

namespace kfree {

inline constexpr const char* kVersion = "0.3.0";
inline constexpr const char* kOutputDirEnv = "KFREE_OUTPUT_DIR";

// Locale-independent shortest round-trip decimal.
inline std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

// Accepts plain or scientific notation ("1e6", "2.5E3") for integer inputs.
inline std::uint64_t parse_count(const std::string& text, const std::string& what) {
    double v = 0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || res.ptr != last)
        throw ConfigError(what + ": cannot parse '" + text + "' as a number");
    if (v < 0 || v != std::floor(v) || v > 1e18) throw ConfigError(what + ": '" + text + "' is not a non-negative integer");
    return static_cast<std::uint64_t>(v);
}

inline double parse_real(const std::string& text, const std::string& what) {
    double v = 0;
    auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size() || !std::isfinite(v))
        throw ConfigError(what + ": cannot parse '" + text + "' as a real number");
    return v;
}

// "0.6+10i", "2", "0.5-3i"
inline Complex parse_complex(const std::string& text) {
    static const std::regex re(R"(^\s*([-+]?[0-9.]+(?:[eE][-+]?[0-9]+)?)\s*(?:([-+])\s*([0-9.]+(?:[eE][-+]?[0-9]+)?)\s*i)?\s*$)");
    std::smatch m;
    if (!std::regex_match(text, m, re)) throw ConfigError("cannot parse complex point '" + text + "' (expected e.g. 0.6+10i)");
    const double re_part = parse_real(m[1].str(), "s");
    double im_part = 0;
    if (m[2].matched) {
        im_part = parse_real(m[3].str(), "s");
        if (m[2].str() == "-") im_part = -im_part;
    }
    return {re_part, im_part};
}

inline std::string format_complex(Complex s) {
    std::string out = format_double(s.real());
    out += s.imag() < 0 ? "-" : "+";
    out += format_double(std::abs(s.imag())) + "i";
    return out;
}

// "d=-3" or "table=path/to/values.json" (JSON list of the q values chi(0..q-1)).
inline QuadraticCharacter parse_character(const std::string& spec) {
    if (spec.rfind("d=", 0) == 0) {
        const std::string body = spec.substr(2);
        std::int64_t d = 0;
        auto res = std::from_chars(body.data(), body.data() + body.size(), d);
        if (res.ec != std::errc() || res.ptr != body.data() + body.size())
            throw ConfigError("--character d=<int>: cannot parse '" + body + "'");
        return character_from_discriminant(d);
    }
    if (spec.rfind("table=", 0) == 0) {
        const std::string path = spec.substr(6);
        std::ifstream in(path);
        if (!in) throw ConfigError("--character table=: cannot open '" + path + "'");
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError("--character table=: '" + path + "' is not valid JSON: " + e.what());
        }
        if (!j.is_array()) throw ConfigError("--character table=: expected a JSON list of q values");
        std::vector<int> values;
        for (const auto& v : j) {
            if (!v.is_number_integer()) throw ConfigError("--character table=: entries must be integers");
            values.push_back(v.get<int>());
        }
        const std::uint64_t q = values.size();
        return character_from_table(q, std::move(values));
    }
    throw ConfigError("--character must be d=<int> or table=<path>, got '" + spec + "'");
}

inline const std::vector<std::string>& known_commands() {
    static const std::vector<std::string> c = {"sieve-stats", "dump-coeffs", "verify-identity", "sums", "fit",
                                               "ab-split",    "perron-check", "tail-decay",     "moments", "report"};
    return c;
}

struct ExperimentConfig {
    std::string command;
    int k = 2;
    std::string character = "d=-3";
    int sign = 1;
    std::optional<std::uint64_t> n;       // sieve-stats, dump-coeffs, verify-identity
    std::optional<std::uint64_t> x_max;   // sums, fit, report
    std::optional<double> x;              // ab-split (integer part), perron-check
    std::optional<std::uint64_t> y;       // ab-split
    std::optional<double> T;              // perron-check
    std::optional<double> sigma0;         // perron-check
    std::optional<double> sigma;          // moments
    double beta = 0.5 + 0.05;
    double epsilon_slack = 0.05;
    double abs_err = 1e-10;
    double max_t = 1e3;
    double window_fraction = 0.5;
    std::string sequence = "f";           // dump-coeffs
    std::vector<std::string> s_list;      // tail-decay
    std::vector<std::uint64_t> y_list;    // tail-decay
    std::vector<double> t_list;           // moments
    std::optional<std::string> out;
    std::optional<std::string> output_dir;

    std::uint64_t n_or(std::uint64_t d) const { return n.value_or(d); }
    std::uint64_t x_max_or(std::uint64_t d) const { return x_max.value_or(d); }

    EvalBudget budget() const {
        EvalBudget b;
        b.target_abs_error = abs_err;
        b.max_t = max_t;
        return b;
    }

    void validate() const {
        if (std::find(known_commands().begin(), known_commands().end(), command) == known_commands().end())
            throw ConfigError("unknown command '" + command + "'");
        if (k < 2) throw ConfigError("--k must be at least 2");
        if (sign != 1 && sign != -1) throw ConfigError("--sign must be +1 or -1");
        if (!(abs_err >= 1e-12)) throw ConfigError("--abs-err must be at least 1e-12");
        if (!(max_t > 0)) throw ConfigError("--max-t must be positive");
        if (!(window_fraction > 0 && window_fraction <= 1)) throw ConfigError("--window must lie in (0, 1]");
        if (n && *n == 0) throw ConfigError("--n must be at least 1");
        if (x_max && *x_max < 100) throw ConfigError("--x-max must be at least 100");
        if (command == "perron-check") {
            if (!x) throw ConfigError("perron-check needs --x (a half-integer such as 100.5)");
            if (!T) throw ConfigError("perron-check needs --t");
            if (*x <= 1) throw ConfigError("--x must exceed 1");
            if (*T <= 0) throw ConfigError("--t must be positive");
            if (sigma0 && *sigma0 <= 1) throw ConfigError("--sigma0 must exceed 1");
        }
        if (command == "ab-split") {
            if (!x) throw ConfigError("ab-split needs --x");
            if (*x < 2) throw ConfigError("--x must be at least 2");
            if (y && static_cast<double>(*y) >= std::floor(*x)) throw ConfigError("ab-split requires y < x");
        }
        if (command == "tail-decay" && y_list.size() == 1) throw ConfigError("--y-list needs at least two values");
        if (command == "moments" && sigma && *sigma < 0.5) throw ConfigError("--sigma must be at least 1/2");
        for (const auto& s : s_list) parse_complex(s);
    }

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["command"] = command;
        j["k"] = k;
        j["character"] = character;
        j["sign"] = sign;
        if (n) j["n"] = *n;
        if (x_max) j["x_max"] = *x_max;
        if (x) j["x"] = *x;
        if (y) j["y"] = *y;
        if (T) j["T"] = *T;
        if (sigma0) j["sigma0"] = *sigma0;
        if (sigma) j["sigma"] = *sigma;
        j["beta"] = beta;
        j["epsilon_slack"] = epsilon_slack;
        j["abs_err"] = abs_err;
        j["max_t"] = max_t;
        j["window_fraction"] = window_fraction;
        j["sequence"] = sequence;
        if (!s_list.empty()) j["s"] = s_list;
        if (!y_list.empty()) j["y_list"] = y_list;
        if (!t_list.empty()) j["t_list"] = t_list;
        if (out) j["out"] = *out;
        if (output_dir) j["output_dir"] = *output_dir;
        return j;
    }

    // Keys mirror to_json(); numeric counts may be given as strings in
    // scientific notation ("1e6").
    static ExperimentConfig from_json(const nlohmann::json& j) {
        ExperimentConfig c;
        auto count = [&](const char* key) -> std::optional<std::uint64_t> {
            if (!j.contains(key)) return std::nullopt;
            const auto& v = j.at(key);
            if (v.is_string()) return parse_count(v.get<std::string>(), key);
            if (v.is_number()) return parse_count(format_double(v.get<double>()), key);
            throw ConfigError(std::string("config key '") + key + "' must be a number");
        };
        auto real = [&](const char* key) -> std::optional<double> {
            if (!j.contains(key)) return std::nullopt;
            const auto& v = j.at(key);
            if (v.is_string()) return parse_real(v.get<std::string>(), key);
            if (v.is_number()) return v.get<double>();
            throw ConfigError(std::string("config key '") + key + "' must be a number");
        };
        try {
            if (j.contains("command")) c.command = j.at("command").get<std::string>();
            if (j.contains("k")) c.k = j.at("k").get<int>();
            if (j.contains("character")) c.character = j.at("character").get<std::string>();
            if (j.contains("sign")) c.sign = j.at("sign").get<int>();
            c.n = count("n");
            c.x_max = count("x_max");
            c.x = real("x");
            c.y = count("y");
            c.T = real("T");
            c.sigma0 = real("sigma0");
            c.sigma = real("sigma");
            if (auto v = real("beta")) c.beta = *v;
            if (auto v = real("epsilon_slack")) c.epsilon_slack = *v;
            if (auto v = real("abs_err")) c.abs_err = *v;
            if (auto v = real("max_t")) c.max_t = *v;
            if (auto v = real("window_fraction")) c.window_fraction = *v;
            if (j.contains("sequence")) c.sequence = j.at("sequence").get<std::string>();
            if (j.contains("s")) c.s_list = j.at("s").get<std::vector<std::string>>();
            if (j.contains("y_list"))
                for (const auto& v : j.at("y_list")) c.y_list.push_back(v.is_string() ? parse_count(v.get<std::string>(), "y_list") : v.get<std::uint64_t>());
            if (j.contains("t_list")) c.t_list = j.at("t_list").get<std::vector<double>>();
            if (j.contains("out")) c.out = j.at("out").get<std::string>();
            if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(std::string("malformed config: ") + e.what());
        }
        return c;
    }
};

struct RunRecord {
    nlohmann::json config;
    std::string version = kVersion;
    double wall_time_s = 0;
    std::vector<std::string> outputs;
    nlohmann::json summary = nlohmann::json::object();
    std::vector<std::string> messages;  // human-readable lines for stdout
    int exit_code = 0;
    std::string error;
    std::string record_path;

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["config"] = config;
        j["version"] = version;
        j["wall_time_s"] = wall_time_s;
        j["outputs"] = outputs;
        j["summary"] = summary;
        j["exit_code"] = exit_code;
        j["status"] = exit_code == 0 ? "ok" : "error";
        if (!error.empty()) j["error"] = error;
        return j;
    }
};

// A CSV file with a header row and one line per record.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header) : path_(path) {
        if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
        out_.open(path, std::ios::binary | std::ios::trunc);
        if (!out_) throw ConfigError("cannot open '" + path.string() + "' for writing");
        row(header);
    }

    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ',';
            out_ << cells[i];
        }
        out_ << '\n';
    }

    const std::filesystem::path& path() const noexcept { return path_; }

private:
    std::filesystem::path path_;
    std::ofstream out_;
};

namespace detail {

struct RunContext {
    const ExperimentConfig& cfg;
    RunRecord& record;
    std::filesystem::path dir;

    // The --out path when given, else <dir>/<stem>.csv.
    std::filesystem::path csv_path(const std::string& stem, const std::string& suffix = "") const {
        std::filesystem::path base = cfg.out ? std::filesystem::path(*cfg.out) : dir / (stem + ".csv");
        if (suffix.empty()) return base;
        return base.parent_path() / (base.stem().string() + suffix + base.extension().string());
    }

    ModifiedCharacter character() const { return ModifiedCharacter(parse_character(cfg.character), cfg.sign); }

    void wrote(const std::filesystem::path& p) { record.outputs.push_back(p.string()); }
};

inline CoefficientSequence named_sequence(const std::string& which, KFreeParams k, const ModifiedCharacter& g,
                                          std::uint64_t n) {
    if (which == "nu") return nu_values(k, n);
    if (which == "psi") return psi_values(k, g.base(), n);
    if (which == "h") return h_coefficients(k, QCoreSet(g.base().modulus(), n), n, g.bad_prime_sign());
    if (which == "htilde") return htilde_coefficients(k, g.base(), QCoreSet(g.base().modulus(), n), n, g.bad_prime_sign());
    if (which == "core") return QCoreSet(g.base().modulus(), n).indicator(g.bad_prime_sign());
    if (which == "chi") return periodic_character_sequence(g.base(), n);
    const SieveTable table = build_sieve(n);
    if (which == "f") return f_values(k, g, table, n);
    if (which == "g") return modified_values(g, table, n);
    if (which == "mu") return mobius_values(table, n);
    if (which == "kfree") return kfree_indicator(table, k, n);
    throw ConfigError("unknown --sequence '" + which + "' (f, g, mu, kfree, chi, nu, psi, h, htilde, core)");
}

inline void write_series_csv(RunContext& ctx, const CheckpointSeries& s) {
    CsvWriter w(ctx.csv_path("sums"), {"x", "partial_sum", "running_max"});
    for (std::size_t i = 0; i < s.checkpoints.size(); ++i)
        w.row({std::to_string(s.checkpoints[i]), std::to_string(s.partial_sum[i]), std::to_string(s.running_max[i])});
    ctx.wrote(w.path());
}

inline nlohmann::json fit_json(const ExponentFit& f, int k) {
    return {{"slope", f.slope},
            {"intercept", f.intercept},
            {"r_squared", f.r_squared},
            {"window", {f.window_lo, f.window_hi}},
            {"points", f.points},
            {"conjectured_exponent", 1.0 / (2.0 * k)},
            {"proved_exponent", 1.0 / (k + 1.0)}};
}

inline void cmd_sieve_stats(RunContext& ctx) {
    const std::uint64_t n = ctx.cfg.n_or(1'000'000);
    const KFreeParams k(ctx.cfg.k);
    const SieveTable table = build_sieve(n);
    const CoefficientSequence mu = mobius_values(table, n);
    const CoefficientSequence kf = kfree_indicator(table, k, n);
    CsvWriter w(ctx.csv_path("sieve_stats"), {"x", "prime_count", "mertens", "kfree_count"});
    const auto mv = mu.dense_values();
    const auto kv = kf.dense_values();
    std::int64_t mertens = 0, kfree = 0;
    const auto grid = checkpoint_grid(n, 1);
    std::size_t gi = 0;
    for (std::uint64_t x = 1; x <= n; ++x) {
        mertens += mv[x];
        kfree += kv[x];
        if (gi < grid.size() && grid[gi] == x) {
            w.row({std::to_string(x), std::to_string(table.prime_count(x)), std::to_string(mertens), std::to_string(kfree)});
            ++gi;
        }
    }
    ctx.wrote(w.path());
    ctx.record.summary = {{"n", n}, {"prime_count", table.prime_count(n)}, {"mertens", mertens}, {"kfree_count", kfree}};
    ctx.record.messages.push_back("pi(" + std::to_string(n) + ") = " + std::to_string(table.prime_count(n)) +
                                  ", k-free count = " + std::to_string(kfree));
}

inline void cmd_dump_coeffs(RunContext& ctx) {
    const std::uint64_t n = ctx.cfg.n_or(1000);
    const CoefficientSequence seq = named_sequence(ctx.cfg.sequence, KFreeParams(ctx.cfg.k), ctx.character(), n);
    CsvWriter w(ctx.csv_path("coeffs_" + ctx.cfg.sequence), {"n", "value"});
    if (seq.is_sparse()) {
        for (const Term& t : seq.terms()) w.row({std::to_string(t.n), std::to_string(t.value)});
    } else {
        const auto v = seq.dense_values();
        for (std::uint64_t i = 1; i <= n; ++i) w.row({std::to_string(i), std::to_string(v[i])});
    }
    ctx.wrote(w.path());
    ctx.record.summary = {{"sequence", ctx.cfg.sequence}, {"n", n}, {"storage", seq.is_sparse() ? "sparse" : "dense"},
                          {"support_size", seq.support_size()}};
    ctx.record.messages.push_back("wrote " + std::to_string(seq.is_sparse() ? seq.support_size() : n) + " rows of " +
                                  ctx.cfg.sequence);
}

inline void cmd_verify_identity(RunContext& ctx) {
    const std::uint64_t n = ctx.cfg.n_or(100'000);
    const FactorizationReport r = verify_factorization(KFreeParams(ctx.cfg.k), ctx.character(), n);
    ctx.record.summary = {{"identity", r.identity}, {"modulus", r.modulus}, {"checked_to", r.checked_to}, {"holds", r.holds()}};
    if (r.holds()) {
        ctx.record.messages.push_back("identity holds to " + std::to_string(n));
        return;
    }
    ctx.record.summary["mismatch"] = {{"n", r.mismatch->n}, {"lhs", r.mismatch->lhs}, {"rhs", r.mismatch->rhs}};
    throw ComputationError(r.identity + " fails at n = " + std::to_string(r.mismatch->n) + ": lhs " +
                           std::to_string(r.mismatch->lhs) + ", rhs " + std::to_string(r.mismatch->rhs));
}

inline CheckpointSeries run_sums(RunContext& ctx) {
    const std::uint64_t x_max = ctx.cfg.x_max_or(1'000'000);
    const CheckpointSeries s = partial_sum_series(KFreeParams(ctx.cfg.k), ctx.character(), x_max);
    write_series_csv(ctx, s);
    ctx.record.summary["x_max"] = x_max;
    ctx.record.summary["partial_sum"] = s.partial_sum.back();
    ctx.record.summary["running_max"] = s.running_max.back();
    ctx.record.summary["checkpoints"] = s.checkpoints.size();
    return s;
}

inline void cmd_sums(RunContext& ctx) {
    const CheckpointSeries s = run_sums(ctx);
    ctx.record.messages.push_back("S(" + std::to_string(s.checkpoints.back()) + ") = " + std::to_string(s.partial_sum.back()) +
                                  ", running max " + std::to_string(s.running_max.back()));
}

inline void cmd_fit(RunContext& ctx) {
    const CheckpointSeries s = run_sums(ctx);
    const ExponentFit f = fit_exponent(s, ctx.cfg.window_fraction);
    ctx.record.summary["fit"] = fit_json(f, ctx.cfg.k);
    ctx.record.messages.push_back("fitted exponent " + format_double(f.slope) + " (r^2 " + format_double(f.r_squared) +
                                  "); reference 1/(2k) = " + format_double(1.0 / (2.0 * ctx.cfg.k)) +
                                  ", 1/(k+1) = " + format_double(1.0 / (ctx.cfg.k + 1.0)));
}

inline void cmd_ab_split(RunContext& ctx) {
    const auto x = static_cast<std::uint64_t>(std::floor(*ctx.cfg.x));
    const ProofSplitConfig split = ProofSplitConfig::make(ctx.cfg.k, x, ctx.cfg.beta, ctx.cfg.epsilon_slack, ctx.cfg.y);
    const ModifiedCharacter g = ctx.character();
    const ABSplit ab = ab_split_sums(split, g);
    const std::int64_t direct = direct_partial_sum(KFreeParams(ctx.cfg.k), g, x);
    ctx.record.summary = {{"x", x}, {"y", split.y}, {"T", split.T}, {"A", ab.A}, {"B", ab.B}, {"direct_sum", direct}, {"exact", ab.total() == direct}};
    if (ab.total() != direct)
        throw ComputationError("A + B = " + std::to_string(ab.total()) + " differs from the direct sum " + std::to_string(direct));
    ctx.record.messages.push_back("A = " + std::to_string(ab.A) + ", B = " + std::to_string(ab.B) + ", A + B = direct sum " +
                                  std::to_string(direct) + " (y = " + std::to_string(split.y) + ")");
}

inline void cmd_perron_check(RunContext& ctx) {
    PerronOptions opts;
    opts.sigma0 = ctx.cfg.sigma0;
    opts.budget.target_abs_error = std::max(ctx.cfg.abs_err, 1e-9);
    const PerronCheckResult r = perron_check(KFreeParams(ctx.cfg.k), ctx.character(), *ctx.cfg.x, *ctx.cfg.T, opts);
    ctx.record.summary = {{"x", r.x},
                          {"T", r.T},
                          {"sigma0", r.sigma0},
                          {"direct_sum", r.direct_sum},
                          {"integral_value", r.integral_value},
                          {"residual", r.residual},
                          {"r_bound", r.r_bound},
                          {"quadrature_estimate", r.quadrature_estimate},
                          {"step", r.step},
                          {"evaluations", r.evaluations},
                          {"pass", r.pass()}};
    ctx.record.messages.push_back(std::string(r.pass() ? "PASS" : "FAIL") + " residual=" + format_double(r.residual) +
                                  " bound=" + format_double(r.r_bound) + " quadrature=" + format_double(r.quadrature_estimate) +
                                  " direct=" + std::to_string(r.direct_sum) + " integral=" + format_double(r.integral_value));
    if (!r.pass()) throw ComputationError("Perron residual exceeds the error bound");
}

inline void cmd_tail_decay(RunContext& ctx) {
    std::vector<Complex> s_list;
    for (const auto& s : ctx.cfg.s_list) s_list.push_back(parse_complex(s));
    if (s_list.empty()) s_list.push_back(Complex(ctx.cfg.k % 2 == 0 ? 0.6 : 0.5, 10.0));
    std::vector<std::uint64_t> ys = ctx.cfg.y_list;
    if (ys.empty()) ys = {100, 1000, 10000, 100000};
    const auto out = tail_decay_experiment(KFreeParams(ctx.cfg.k), ctx.character(), s_list, ys, ctx.cfg.budget());
    nlohmann::json arr = nlohmann::json::array();
    for (std::size_t i = 0; i < out.size(); ++i) {
        CsvWriter w(ctx.csv_path("tail", out.size() > 1 ? "_s" + std::to_string(i) : ""), {"y", "abs_H", "re_H", "im_H"});
        for (const auto& row : out[i].rows)
            w.row({std::to_string(row.y), format_double(std::abs(row.H)), format_double(row.H.real()), format_double(row.H.imag())});
        ctx.wrote(w.path());
        arr.push_back({{"s", format_complex(out[i].s)}, {"fitted_slope", out[i].fitted_slope}, {"predicted_slope", out[i].predicted_slope}});
        ctx.record.messages.push_back("s = " + format_complex(out[i].s) + ": slope " + format_double(out[i].fitted_slope) +
                                      " (predicted " + format_double(out[i].predicted_slope) + " + eps)");
    }
    ctx.record.summary["series"] = arr;
}

inline void cmd_moments(RunContext& ctx) {
    const QuadraticCharacter chi = parse_character(ctx.cfg.character);
    const double sigma = ctx.cfg.sigma.value_or(0.5);
    std::vector<double> ts = ctx.cfg.t_list;
    if (ts.empty()) ts = {50, 100, 200, 400};
    const EvalBudget b = ctx.cfg.budget();
    CsvWriter second(ctx.csv_path("moments"), {"T", "integral", "ratio"});
    CsvWriter lover(ctx.csv_path("moments", "_l_over_s"), {"T", "integral", "ratio"});
    nlohmann::json rows = nlohmann::json::array();
    for (double T : ts) {
        const MomentResult m2 = second_moment_L(chi, sigma, T, kMomentStep, b);
        const MomentResult m1 = l_over_s_integral(chi, sigma, T, kMomentStep, b);
        second.row({format_double(T), format_double(m2.integral), format_double(m2.ratio)});
        lover.row({format_double(T), format_double(m1.integral), format_double(m1.ratio)});
        rows.push_back({{"T", T}, {"second_moment_ratio", m2.ratio}, {"l_over_s_ratio", m1.ratio}});
        ctx.record.messages.push_back("T = " + format_double(T) + ": |L|^2 ratio " + format_double(m2.ratio) +
                                      ", |L|/|s| ratio " + format_double(m1.ratio));
    }
    ctx.wrote(second.path());
    ctx.wrote(lover.path());
    ctx.record.summary["sigma"] = sigma;
    ctx.record.summary["rows"] = rows;
}

// A compact bundle: identity, growth fit, A/B split and tail decay.
inline void cmd_report(RunContext& ctx) {
    const KFreeParams k(ctx.cfg.k);
    const ModifiedCharacter g = ctx.character();
    const std::uint64_t n = ctx.cfg.n_or(100'000);
    const FactorizationReport fr = verify_factorization(k, g, n);

    const CheckpointSeries s = run_sums(ctx);
    const ExponentFit fit = fit_exponent(s, ctx.cfg.window_fraction);

    const std::uint64_t x = std::min<std::uint64_t>(s.checkpoints.back(), 100'000);
    const ProofSplitConfig split = ProofSplitConfig::make(k.k(), x, ctx.cfg.beta, ctx.cfg.epsilon_slack);
    const ABSplit ab = ab_split_sums(split, g);
    const std::int64_t direct = direct_partial_sum(k, g, x);

    const std::vector<Complex> s_list = {Complex(k.even() ? 0.6 : 0.5, 10.0)};
    const std::vector<std::uint64_t> ys = {100, 1000, 10000, 100000};
    const auto tails = tail_decay_experiment(k, g, s_list, ys, ctx.cfg.budget());

    ctx.record.summary["identity"] = {{"identity", fr.identity}, {"checked_to", n}, {"holds", fr.holds()}};
    ctx.record.summary["fit"] = fit_json(fit, k.k());
    ctx.record.summary["ab_split"] = {{"x", x}, {"y", split.y}, {"A", ab.A}, {"B", ab.B}, {"direct_sum", direct}, {"exact", ab.total() == direct}};
    ctx.record.summary["tail"] = {{"s", format_complex(tails[0].s)}, {"fitted_slope", tails[0].fitted_slope}, {"predicted_slope", tails[0].predicted_slope}};

    const std::filesystem::path md = ctx.csv_path("sums").parent_path() / "report.md";
    std::ofstream out(md, std::ios::binary | std::ios::trunc);
    out << "# kfree report (k = " << k.k() << ", character " << g.base().label() << ")\n\n";
    out << "- " << fr.identity << ": " << (fr.holds() ? "holds" : "FAILS") << " for n <= " << n << "\n";
    out << "- running max at x = " << s.checkpoints.back() << ": " << s.running_max.back() << "\n";
    out << "- fitted exponent " << format_double(fit.slope) << " over [" << fit.window_lo << ", " << fit.window_hi
        << "]; references 1/(2k) = " << format_double(1.0 / (2.0 * k.k())) << ", 1/(k+1) = " << format_double(1.0 / (k.k() + 1.0)) << "\n";
    out << "- A + B split at x = " << x << ", y = " << split.y << ": " << (ab.total() == direct ? "exact" : "MISMATCH") << "\n";
    out << "- tail slope at s = " << format_complex(tails[0].s) << ": " << format_double(tails[0].fitted_slope)
        << " (predicted " << format_double(tails[0].predicted_slope) << " + eps)\n";
    ctx.wrote(md);
    ctx.record.messages.push_back("report written to " + md.string());
    if (!fr.holds() || ab.total() != direct) throw ComputationError("an exact identity failed; see the run record");
}

inline std::filesystem::path record_path_for(const ExperimentConfig& cfg, const std::filesystem::path& dir) {
    if (cfg.out) {
        std::filesystem::path p(*cfg.out);
        return p.parent_path() / (p.stem().string() + ".run.json");
    }
    return dir / (cfg.command + ".run.json");
}

}  // namespace detail

inline std::filesystem::path default_output_dir(const ExperimentConfig& cfg) {
    if (cfg.output_dir) return *cfg.output_dir;
    if (const char* env = std::getenv(kOutputDirEnv); env && *env) return env;
    return ".";
}

// Validates, dispatches, and writes the RunRecord JSON. Never throws for
// input or computation errors; they land in the record's exit code.
inline RunRecord run(const ExperimentConfig& cfg) {
    RunRecord record;
    record.config = cfg.to_json();
    const auto start = std::chrono::steady_clock::now();
    const std::filesystem::path dir = default_output_dir(cfg);
    try {
        cfg.validate();
        std::filesystem::create_directories(dir);
        detail::RunContext ctx{cfg, record, dir};
        const std::string& c = cfg.command;
        if (c == "sieve-stats") detail::cmd_sieve_stats(ctx);
        else if (c == "dump-coeffs") detail::cmd_dump_coeffs(ctx);
        else if (c == "verify-identity") detail::cmd_verify_identity(ctx);
        else if (c == "sums") detail::cmd_sums(ctx);
        else if (c == "fit") detail::cmd_fit(ctx);
        else if (c == "ab-split") detail::cmd_ab_split(ctx);
        else if (c == "perron-check") detail::cmd_perron_check(ctx);
        else if (c == "tail-decay") detail::cmd_tail_decay(ctx);
        else if (c == "moments") detail::cmd_moments(ctx);
        else if (c == "report") detail::cmd_report(ctx);
    } catch (const InputError& e) {
        record.exit_code = 1;
        record.error = e.what();
    } catch (const ComputationError& e) {
        record.exit_code = 2;
        record.error = e.what();
    } catch (const std::filesystem::filesystem_error& e) {
        record.exit_code = 1;
        record.error = e.what();
    }
    record.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    const std::filesystem::path rp = detail::record_path_for(cfg, dir);
    std::error_code ec;
    if (rp.has_parent_path()) std::filesystem::create_directories(rp.parent_path(), ec);
    std::ofstream out(rp, std::ios::binary | std::ios::trunc);
    if (out) {
        out << record.to_json().dump(2) << '\n';
        record.record_path = rp.string();
    }
    return record;
}

}  // namespace kfree
