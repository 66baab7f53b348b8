// SPDX-License-Identifier: Apache-2.0
#include "liqgame/analysis.hpp"
#include "liqgame/cli.hpp"
#include "liqgame/problem_io.hpp"

#include "json.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace liqgame;

namespace {

const std::string kConfigs = LIQGAME_CONFIG_DIR;

std::string out_path(const std::string& name) {
    const auto dir = std::filesystem::path(LIQGAME_TEST_OUT) / "cli_out";
    std::filesystem::create_directories(dir);
    return (dir / name).string();
}

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    std::stringstream s;
    s << f.rdbuf();
    return s.str();
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream s(text);
    for (std::string line; std::getline(s, line);) out.push_back(line);
    return out;
}

}  // namespace

TEST(Cli, EquilibriumFigureThreeCenter) {
    const auto csv = out_path("fig3.csv");
    const auto r = run({"equilibrium", "--config", kConfigs + "/fig1.json", "--grid", "400", "--out", csv});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = lines(slurp(csv));
    ASSERT_EQ(rows.size(), 402u);
    EXPECT_EQ(rows[0], "t,X_1,X_2,rate_1,rate_2");
    EXPECT_EQ(rows[1].substr(0, 11), "0,1.12,2.06");
    EXPECT_EQ(rows.back().substr(0, 6), "2,0,0,");
    const auto side = nlohmann::json::parse(slurp(out_path("fig3.json")));
    EXPECT_EQ(side["method"], "closed_form.equal_alpha_finite");
    EXPECT_LE(side["residual"]["relative"].get<double>(), 1e-9);
    EXPECT_EQ(side["evaluation"].size(), 2u);
    EXPECT_TRUE(side["spectral"].contains("theta_hat"));
}

TEST(Cli, EquilibriumZeroPositions) {
    const auto csv = out_path("zero.csv");
    ASSERT_EQ(run({"equilibrium", "--config", kConfigs + "/zero_positions.json", "--grid", "16", "--out", csv}).code, 0);
    const auto rows = lines(slurp(csv));
    for (std::size_t k = 1; k < rows.size(); ++k) {
        EXPECT_EQ(rows[k].substr(rows[k].find(',')), ",0,0,0,0");
    }
}

TEST(Cli, EquilibriumInfiniteHorizon) {
    const auto csv = out_path("inf.csv");
    const auto r = run({"equilibrium", "--config", kConfigs + "/fig6_provision.json", "--grid", "100", "--t-end", "30",
                        "--out", csv});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = lines(slurp(csv));
    EXPECT_EQ(rows.back().substr(0, 3), "30,");
    const auto side = nlohmann::json::parse(slurp(out_path("inf.json")));
    EXPECT_EQ(side["method"], "closed_form.equal_alpha_infinite");
    EXPECT_FALSE(side["terms"][1].is_null());
}

TEST(Cli, ByteIdenticalReruns) {
    const auto a = out_path("rerun_a.csv");
    const auto b = out_path("rerun_b.csv");
    for (const auto* path : {&a, &b}) {
        ASSERT_EQ(run({"equilibrium", "--config", kConfigs + "/heterogeneous_drift.json", "--out", *path}).code, 0);
    }
    EXPECT_EQ(slurp(a), slurp(b));
    EXPECT_EQ(slurp(out_path("rerun_a.json")), slurp(out_path("rerun_b.json")));
}

TEST(Cli, CsvRoundTripMatchesSidecar) {
    for (const char* name : {"fig1", "heterogeneous_drift"}) {
        const auto csv = out_path(std::string("rt_") + name + ".csv");
        ASSERT_EQ(run({"equilibrium", "--config", kConfigs + "/" + name + ".json", "--out", csv}).code, 0);
        const auto side = nlohmann::json::parse(slurp(out_path(std::string("rt_") + name + ".json")));
        const auto problem = load_problem(kConfigs + "/" + name + ".json");
        const auto grids = cli::read_strategy_csv(csv, true);
        const std::vector<Strategy> profile(grids.begin(), grids.end());
        for (std::size_t i = 0; i < problem.n(); ++i) {
            const auto e = mean_variance(profile, problem, i);
            const auto& ref = side["grid_evaluation"][i];
            EXPECT_NEAR(e.expected_revenue, ref["expected_revenue"].get<double>(), 1e-9);
            EXPECT_NEAR(e.variance, ref["variance"].get<double>(), 1e-9);
            EXPECT_NEAR(e.mean_variance_value, side["evaluation"][i]["mean_variance_value"].get<double>(), 1e-6);
        }
    }
}

TEST(Cli, ExitCodesForBadInput) {
    EXPECT_EQ(run({"equilibrium", "--config", "/nonexistent.json", "--out", out_path("x.csv")}).code, 1);
    const auto bad = out_path("bad.json");
    std::ofstream(bad) << R"({"market": {"lambda": 0, "gamma": 1, "sigma": 1}, "agents": [{"x0": 1, "alpha": 1}],
                             "horizon": {"type": "finite", "T": 1}})";
    const auto r = run({"equilibrium", "--config", bad, "--out", out_path("x.csv")});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("lambda"), std::string::npos);
    EXPECT_EQ(run({"frobnicate"}).code, 1);
    EXPECT_EQ(run({"classify", "--alpha-sigma2", "1", "--lambda", "-1", "--gamma", "0"}).code, 1);
    // A solver failure: the oracle has no infinite-horizon form.
    EXPECT_EQ(run({"oracle-check", "--config", kConfigs + "/fig6_provision.json"}).code, 2);
}

TEST(Cli, ScanFigureOne) {
    const auto r = run({"scan", "--config", kConfigs + "/fig1.json", "--param", "alpha_sigma2", "--from", "0", "--to", "3",
                        "--points", "61", "--probe", "1"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = lines(r.out);
    ASSERT_EQ(rows.size(), 62u);
    EXPECT_EQ(rows[0], "param,probe_value,status");
    std::vector<double> v;
    for (std::size_t k = 1; k < rows.size(); ++k) {
        const auto c1 = rows[k].find(',');
        const auto c2 = rows[k].find(',', c1 + 1);
        EXPECT_EQ(rows[k].substr(c2 + 1), "ok");
        v.push_back(std::stod(rows[k].substr(c1 + 1, c2 - c1 - 1)));
    }
    EXPECT_TRUE(is_non_monotone(v));
}

TEST(Cli, ScanFigureFiveGamma) {
    const auto r = run({"scan", "--config", kConfigs + "/fig5.json", "--param", "gamma", "--from", "0", "--to", "3",
                        "--points", "31"});
    ASSERT_EQ(r.code, 0) << r.err;
    std::vector<double> v;
    const auto rows = lines(r.out);
    for (std::size_t k = 1; k < rows.size(); ++k) {
        const auto c1 = rows[k].find(',');
        v.push_back(std::stod(rows[k].substr(c1 + 1)));
    }
    EXPECT_TRUE(is_non_monotone(v));
}

TEST(Cli, ScanSinglePointAndBadParameter) {
    const auto r = run({"scan", "--config", kConfigs + "/fig1.json", "--param", "lambda", "--from", "0.5", "--points", "1"});
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(lines(r.out).size(), 2u);
    EXPECT_EQ(run({"scan", "--config", kConfigs + "/fig1.json", "--param", "beta", "--from", "0"}).code, 1);
}

TEST(Cli, OracleCheckExitCodes) {
    EXPECT_EQ(run({"oracle-check", "--config", kConfigs + "/fig1.json", "--grid", "200", "--tol", "1e-2"}).code, 0);
    EXPECT_EQ(run({"oracle-check", "--config", kConfigs + "/fig1.json", "--grid", "50", "--tol", "1e-12"}).code, 4);
    EXPECT_EQ(run({"oracle-check", "--config", kConfigs + "/single_agent.json", "--grid", "400", "--tol", "1e-4"}).code, 0);
    EXPECT_EQ(run({"oracle-check", "--config", kConfigs + "/fig1.json", "--max-iter", "2"}).code, 3);
    EXPECT_EQ(run({"oracle-check", "--config", kConfigs + "/heterogeneous_drift.json", "--grid", "200"}).code, 0);
}

TEST(Cli, Classify) {
    EXPECT_NE(run({"classify", "--alpha-sigma2", "0.33", "--lambda", "0.16", "--gamma", "0.16"}).out.find("LiquidityProvision"),
              std::string::npos);
    EXPECT_NE(run({"classify", "--alpha-sigma2", "0.33", "--lambda", "0.15", "--gamma", "0.16"}).out.find("Predatory"),
              std::string::npos);
    const auto r = run({"classify", "--alpha-sigma2", "2", "--lambda", "1", "--gamma", "1"});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("Inactive"), std::string::npos);
}

TEST(Cli, MonteCarloSeededOutputIsIdentical) {
    const std::vector<std::string> args{"montecarlo", "--config", kConfigs + "/fig1.json", "--paths", "1000", "--seed", "42"};
    const auto a = run(args);
    const auto b = run(args);
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
    const auto j = nlohmann::json::parse(a.out);
    EXPECT_EQ(j["seed"], 42);
}

TEST(Cli, FormatDoubleRoundTrips) {
    for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23}) EXPECT_EQ(std::stod(cli::format_double(v)), v);
    EXPECT_EQ(cli::format_double(2.0), "2");
}
