#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include "kfree/report.hpp"

using namespace kfree;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
    const fs::path d = fs::temp_directory_path() / ("kfree_test_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string first_line(const fs::path& p) {
    std::ifstream in(p);
    std::string line;
    std::getline(in, line);
    return line;
}

ExperimentConfig config(const std::string& command, const fs::path& dir) {
    ExperimentConfig c;
    c.command = command;
    c.output_dir = dir.string();
    return c;
}

struct CliResult {
    int status;
    std::string output;
};

CliResult run_cli(const std::string& args) {
    const std::string cmd = std::string(KFREE_CLI_PATH) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    std::string out;
    char buf[512];
    while (fgets(buf, sizeof buf, pipe)) out += buf;
    const int raw = pclose(pipe);
    return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, out};
}

}  // namespace

TEST(Parse, Counts) {
    EXPECT_EQ(parse_count("1e6", "x"), 1'000'000u);
    EXPECT_EQ(parse_count("250", "x"), 250u);
    EXPECT_EQ(parse_count("2.5E3", "x"), 2500u);
    EXPECT_THROW(parse_count("1.5", "x"), ConfigError);
    EXPECT_THROW(parse_count("-3", "x"), ConfigError);
    EXPECT_THROW(parse_count("ten", "x"), ConfigError);
}

TEST(Parse, ComplexPoints) {
    EXPECT_EQ(parse_complex("0.6+10i"), Complex(0.6, 10));
    EXPECT_EQ(parse_complex("0.5-3i"), Complex(0.5, -3));
    EXPECT_EQ(parse_complex("2"), Complex(2, 0));
    EXPECT_THROW(parse_complex("i"), ConfigError);
    EXPECT_EQ(format_complex(Complex(0.6, -10)), "0.6-10i");
}

TEST(Parse, Characters) {
    EXPECT_EQ(parse_character("d=-3").modulus(), 3u);
    EXPECT_THROW(parse_character("d=9"), ValidationError);
    EXPECT_THROW(parse_character("q=3"), ConfigError);
    const fs::path dir = fresh_dir("table");
    {
        std::ofstream(dir / "chi.json") << "[0, 1, 0, -1]";
        std::ofstream(dir / "bad.json") << "[0, 1, 1, 1, -1]";
    }
    EXPECT_EQ(parse_character("table=" + (dir / "chi.json").string()).modulus(), 4u);
    EXPECT_THROW(parse_character("table=" + (dir / "bad.json").string()), ValidationError);
    EXPECT_THROW(parse_character("table=" + (dir / "missing.json").string()), ConfigError);
}

TEST(Config, ValidationMessages) {
    ExperimentConfig c;
    c.command = "perron-check";
    try {
        c.validate();
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("--x"), std::string::npos);
    }
    c.command = "nonsense";
    EXPECT_THROW(c.validate(), ConfigError);
    c.command = "ab-split";
    c.x = 100;
    c.y = 100;
    EXPECT_THROW(c.validate(), ConfigError);
    c.y = 99;
    EXPECT_NO_THROW(c.validate());
}

TEST(Config, JsonRoundTrip) {
    const nlohmann::json j = {{"command", "sums"}, {"k", 3}, {"x_max", "1e5"}, {"s", {"0.5+10i"}}, {"y_list", {100, "1e3"}}};
    const ExperimentConfig c = ExperimentConfig::from_json(j);
    EXPECT_EQ(c.k, 3);
    EXPECT_EQ(*c.x_max, 100'000u);
    EXPECT_EQ(c.y_list, (std::vector<std::uint64_t>{100, 1000}));
    const ExperimentConfig d = ExperimentConfig::from_json(c.to_json());
    EXPECT_EQ(d.to_json(), c.to_json());
    EXPECT_THROW(ExperimentConfig::from_json({{"k", "two"}}), ConfigError);
}

TEST(Run, ExitCodes) {
    const fs::path dir = fresh_dir("exit");
    ExperimentConfig ok = config("verify-identity", dir);
    ok.n = 10'000;
    const RunRecord r0 = run(ok);
    EXPECT_EQ(r0.exit_code, 0) << r0.error;
    EXPECT_EQ(r0.messages.at(0), "identity holds to 10000");

    ExperimentConfig bad = config("verify-identity", dir);
    bad.character = "d=9";
    EXPECT_EQ(run(bad).exit_code, 1);

    ExperimentConfig too_big = config("sieve-stats", dir);
    too_big.n = kMaxSieveLimit + 1;
    const RunRecord r2 = run(too_big);
    EXPECT_EQ(r2.exit_code, 2);
    EXPECT_FALSE(r2.error.empty());

    ExperimentConfig region = config("moments", dir);
    region.t_list = {5000};
    EXPECT_EQ(run(region).exit_code, 2);
}

TEST(Run, WritesRecordAndCsvHeaders) {
    const fs::path dir = fresh_dir("csv");
    ExperimentConfig c = config("sums", dir);
    c.x_max = 10'000;
    const RunRecord r = run(c);
    ASSERT_EQ(r.exit_code, 0) << r.error;
    EXPECT_EQ(first_line(dir / "sums.csv"), "x,partial_sum,running_max");
    const auto rec = nlohmann::json::parse(slurp(dir / "sums.run.json"));
    EXPECT_EQ(rec["status"], "ok");
    EXPECT_EQ(rec["version"], kVersion);
    EXPECT_EQ(rec["config"]["x_max"], 10'000);
    EXPECT_EQ(rec["outputs"].size(), 1u);

    ExperimentConfig t = config("tail-decay", dir);
    t.y_list = {100, 1000};
    ASSERT_EQ(run(t).exit_code, 0);
    EXPECT_EQ(first_line(dir / "tail.csv"), "y,abs_H,re_H,im_H");

    ExperimentConfig s = config("sieve-stats", dir);
    s.n = 1000;
    ASSERT_EQ(run(s).exit_code, 0);
    EXPECT_EQ(first_line(dir / "sieve_stats.csv"), "x,prime_count,mertens,kfree_count");

    ExperimentConfig dc = config("dump-coeffs", dir);
    dc.sequence = "h";
    dc.n = 200;
    ASSERT_EQ(run(dc).exit_code, 0);
    EXPECT_EQ(first_line(dir / "coeffs_h.csv"), "n,value");
}

TEST(Run, FailedRunStillWritesRecord) {
    const fs::path dir = fresh_dir("fail");
    ExperimentConfig c = config("verify-identity", dir);
    c.character = "d=6";
    const RunRecord r = run(c);
    EXPECT_EQ(r.exit_code, 1);
    const auto rec = nlohmann::json::parse(slurp(dir / "verify-identity.run.json"));
    EXPECT_EQ(rec["status"], "error");
    EXPECT_NE(rec["error"].get<std::string>().find("0 or 1 mod 4"), std::string::npos);
}

TEST(Run, Deterministic) {
    const fs::path a = fresh_dir("det_a");
    const fs::path b = fresh_dir("det_b");
    for (const fs::path& d : {a, b}) {
        ExperimentConfig t = config("tail-decay", d);
        t.k = 3;
        t.y_list = {100, 1000, 10000};
        ASSERT_EQ(run(t).exit_code, 0);
        ExperimentConfig m = config("moments", d);
        m.t_list = {20, 40};
        ASSERT_EQ(run(m).exit_code, 0);
    }
    EXPECT_EQ(slurp(a / "tail.csv"), slurp(b / "tail.csv"));
    EXPECT_EQ(slurp(a / "moments.csv"), slurp(b / "moments.csv"));
    EXPECT_EQ(slurp(a / "moments_l_over_s.csv"), slurp(b / "moments_l_over_s.csv"));
}

TEST(Cli, VerifyIdentity) {
    const fs::path dir = fresh_dir("cli_verify");
    const CliResult r = run_cli("verify-identity --k 2 --character d=-3 --n 1e5 --output-dir " + dir.string());
    EXPECT_EQ(r.status, 0) << r.output;
    EXPECT_NE(r.output.find("identity holds to 100000"), std::string::npos) << r.output;
    EXPECT_TRUE(fs::exists(dir / "verify-identity.run.json"));
}

TEST(Cli, SumsWritesCsv) {
    const fs::path dir = fresh_dir("cli_sums");
    const fs::path out = dir / "s.csv";
    const CliResult r = run_cli("sums --k 2 --character d=-3 --x-max 1e6 --out " + out.string());
    EXPECT_EQ(r.status, 0) << r.output;
    EXPECT_EQ(first_line(out), "x,partial_sum,running_max");
    EXPECT_TRUE(fs::exists(dir / "s.run.json"));
}

TEST(Cli, ConfigFileAndFlagPrecedence) {
    const fs::path dir = fresh_dir("cli_config");
    {
        std::ofstream(dir / "run.json") << R"({"k": 3, "character": "d=-4", "n": 5000})";
    }
    const CliResult r = run_cli("verify-identity --config " + (dir / "run.json").string() + " --n 2000 --output-dir " +
                                dir.string());
    EXPECT_EQ(r.status, 0) << r.output;
    EXPECT_NE(r.output.find("identity holds to 2000"), std::string::npos) << r.output;
    const auto rec = nlohmann::json::parse(slurp(dir / "verify-identity.run.json"));
    EXPECT_EQ(rec["config"]["k"], 3);
    EXPECT_EQ(rec["config"]["character"], "d=-4");
}

TEST(Cli, ErrorsMapToExitCodes) {
    const fs::path dir = fresh_dir("cli_err");
    EXPECT_EQ(run_cli("verify-identity --character d=5 --k 1 --output-dir " + dir.string()).status, 1);
    EXPECT_EQ(run_cli("perron-check --k 2 --output-dir " + dir.string()).status, 1);
    EXPECT_EQ(run_cli("sieve-stats --n 3e8 --output-dir " + dir.string()).status, 2);
}

TEST(Cli, PerronCheckPrintsPassLine) {
    const fs::path dir = fresh_dir("cli_perron");
    const CliResult r = run_cli("perron-check --k 2 --character d=-3 --x 10.5 --t 300 --output-dir " + dir.string());
    EXPECT_EQ(r.status, 0) << r.output;
    EXPECT_EQ(r.output.rfind("PASS residual=", 0), 0u) << r.output;
    EXPECT_NE(r.output.find("bound="), std::string::npos);
}
