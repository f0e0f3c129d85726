// kfree command-line front end.
//
//   kfree <command> [--config run.json] [flags]
//
// Flags override keys from --config. Counts such as --x-max and --t accept
// scientific notation. Exit codes: 0 ok, 1 invalid input, 2 computation error.

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "kfree/report.hpp"

int main(int argc, char** argv) {
    CLI::App app{"k-free multiplicative function experiments"};
    app.set_help_flag("-h,--help", "Print help");

    std::string command, config_path, character, sequence, out, output_dir;
    std::string n, x_max, y, T;
    double x = 0, sigma0 = 0, sigma = 0, beta = 0, epsilon_slack = 0, abs_err = 0, max_t = 0, window = 0;
    int k = 0, sign = 0;
    std::vector<std::string> s_list, y_list;
    std::vector<double> t_list;

    std::string commands;
    for (const auto& c : kfree::known_commands()) commands += (commands.empty() ? "" : ", ") + c;
    app.add_option("command", command, "One of: " + commands)->required();
    app.add_option("--config", config_path, "JSON config file; flags take precedence");
    app.add_option("--k", k, "k >= 2 (k-free parameter)");
    app.add_option("--character", character, "d=<discriminant> or table=<path to JSON list>");
    app.add_option("--sign", sign, "value of g at primes dividing q (+1 or -1)");
    app.add_option("--n", n, "coefficient limit N");
    app.add_option("--x-max", x_max, "largest x for partial sums");
    app.add_option("--x", x, "x for perron-check (half-integer) or ab-split");
    app.add_option("--y", y, "split point y for ab-split");
    app.add_option("--t", T, "height T of the Perron segment");
    app.add_option("--sigma0", sigma0, "abscissa of the Perron line (default 1 + 1/log x)");
    app.add_option("--sigma", sigma, "real part for moments (default 1/2)");
    app.add_option("--beta", beta, "beta >= 1/2 + epsilon for the default y");
    app.add_option("--epsilon-slack", epsilon_slack, "epsilon slack");
    app.add_option("--abs-err", abs_err, "target absolute error of zeta / L evaluations");
    app.add_option("--max-t", max_t, "largest |t| accepted by the analytic engine");
    app.add_option("--window", window, "fraction of checkpoints used by the exponent fit");
    app.add_option("--sequence", sequence, "dump-coeffs: f, g, mu, kfree, chi, nu, psi, h, htilde, core");
    app.add_option("--s", s_list, "tail-decay points, e.g. 0.6+10i (repeatable)");
    app.add_option("--y-list", y_list, "tail-decay truncation points")->delimiter(',');
    app.add_option("--t-list", t_list, "moment heights T")->delimiter(',');
    app.add_option("--out", out, "CSV output path");
    app.add_option("--output-dir", output_dir, "directory for outputs (default $KFREE_OUTPUT_DIR or .)");

    CLI11_PARSE(app, argc, argv);

    kfree::ExperimentConfig cfg;
    try {
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) throw kfree::ConfigError("cannot open config '" + config_path + "'");
            nlohmann::json j;
            try {
                in >> j;
            } catch (const nlohmann::json::exception& e) {
                throw kfree::ConfigError("config '" + config_path + "' is not valid JSON: " + e.what());
            }
            cfg = kfree::ExperimentConfig::from_json(j);
        }
        cfg.command = command;
        auto given = [&](const char* flag) { return app.count(flag) > 0; };
        if (given("--k")) cfg.k = k;
        if (given("--character")) cfg.character = character;
        if (given("--sign")) cfg.sign = sign;
        if (given("--n")) cfg.n = kfree::parse_count(n, "--n");
        if (given("--x-max")) cfg.x_max = kfree::parse_count(x_max, "--x-max");
        if (given("--x")) cfg.x = x;
        if (given("--y")) cfg.y = kfree::parse_count(y, "--y");
        if (given("--t")) cfg.T = kfree::parse_real(T, "--t");
        if (given("--sigma0")) cfg.sigma0 = sigma0;
        if (given("--sigma")) cfg.sigma = sigma;
        if (given("--beta")) cfg.beta = beta;
        if (given("--epsilon-slack")) cfg.epsilon_slack = epsilon_slack;
        if (given("--abs-err")) cfg.abs_err = abs_err;
        if (given("--max-t")) cfg.max_t = max_t;
        if (given("--window")) cfg.window_fraction = window;
        if (given("--sequence")) cfg.sequence = sequence;
        if (given("--s")) cfg.s_list = s_list;
        if (given("--y-list")) {
            cfg.y_list.clear();
            for (const auto& v : y_list) cfg.y_list.push_back(kfree::parse_count(v, "--y-list"));
        }
        if (given("--t-list")) cfg.t_list = t_list;
        if (given("--out")) cfg.out = out;
        if (given("--output-dir")) cfg.output_dir = output_dir;
    } catch (const kfree::InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }

    const kfree::RunRecord record = kfree::run(cfg);
    for (const auto& line : record.messages) std::cout << line << '\n';
    for (const auto& path : record.outputs) std::cout << "wrote " << path << '\n';
    if (!record.record_path.empty()) std::cout << "run record " << record.record_path << '\n';
    if (record.exit_code != 0) std::cerr << "error: " << record.error << '\n';
    return record.exit_code;
}
