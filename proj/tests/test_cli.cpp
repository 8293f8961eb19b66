#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "insider/serialization.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = insider::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("insider_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string write(const std::string& name, const json& doc) {
        const auto path = (dir_ / name).string();
        std::ofstream(path) << doc.dump();
        return path;
    }
    std::string path(const std::string& name) const { return (dir_ / name).string(); }
    static std::string slurp(const std::string& p) {
        std::ifstream in(p);
        return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    }

    static json unit_market() { return {{"breakpoints", {0, 1}}, {"r", {0}}, {"b", {0}}, {"sigma", {1}}}; }
    static json merton_market() { return {{"breakpoints", {0, 1}}, {"r", {0.01}}, {"b", {0.05}}, {"sigma", {0.2}}}; }
    json band_config() const {
        return {{"market", unit_market()}, {"info", {{"kind", "interval"}, {"c1", -1}, {"c2", 1}}}};
    }

    fs::path dir_;
};

std::string first_line(const std::string& text) { return text.substr(0, text.find('\n')); }

}  // namespace

TEST_F(CliTest, SelftestPasses) {
    for (const auto& args : {std::vector<std::string>{"--selftest"}, std::vector<std::string>{"selftest"}}) {
        const auto r = run(args);
        EXPECT_EQ(r.code, 0) << r.out;
        EXPECT_EQ(r.out.find("FAIL"), std::string::npos) << r.out;
    }
}

TEST_F(CliTest, ValueVerdicts) {
    auto r = run({"value", "--config", write("band.json", band_config())});
    ASSERT_EQ(r.code, 0) << r.err;
    auto doc = json::parse(r.out);
    EXPECT_EQ(doc["verdict"], "finite");
    EXPECT_EQ(doc["eps"], 1e-3);
    EXPECT_EQ(doc["eps_sweep"].size(), 3u);

    json exact{{"market", unit_market()}, {"info", {{"kind", "exact_terminal"}}}};
    r = run({"value", "--config", write("exact.json", exact), "--eps", "1e-2"});
    ASSERT_EQ(r.code, 0) << r.err;
    doc = json::parse(r.out);
    EXPECT_EQ(doc["verdict"], "infinite (diverges as ε→0)");
    EXPECT_NEAR(doc["VG"].get<double>(), 0.5 * std::log(100.0), 1e-6);

    json none{{"market", merton_market()}, {"info", {{"kind", "interval"}, {"p1", 0}, {"p2", "inf"}}}};
    r = run({"value", "--config", write("none.json", none), "--format", "csv"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(first_line(r.out),
              "horizon,eps,VF,VG,value_of_information,quadrature_error,truncation_bound,K_hat,last_octave_ratio,"
              "converged,verdict");
    std::istringstream rows(r.out);
    std::string line;
    std::getline(rows, line);
    while (std::getline(rows, line)) EXPECT_NE(line.find(",0.029999999999999999,0.029999999999999999,0,"), std::string::npos) << line;
}

TEST_F(CliTest, LemmaCheckGoldenHeaderAndDeterminism) {
    const auto cfg = write("band.json", band_config());
    const auto out1 = path("lemma1.csv"), out2 = path("lemma2.csv");
    ASSERT_EQ(run({"lemma-check", "--config", cfg, "--out", out1}).code, 0);
    ASSERT_EQ(run({"lemma-check", "--config", cfg, "--out", out2}).code, 0);
    const auto a = slurp(out1);
    EXPECT_EQ(first_line(a), "t,integralI_left,integralI_mid,integralI_right,EalphaSq,bound_product,err_estimate,converged");
    EXPECT_EQ(a, slurp(out2));
    EXPECT_EQ(std::count(a.begin(), a.end(), '\n'), 22);
    const auto summary = json::parse(slurp(out1 + ".summary.json"));
    EXPECT_EQ(summary["verdict"], "bounded");
    EXPECT_NEAR(summary["sup_integral"].get<double>(), 3.612789142, 1e-8);

    const auto r = run({"lemma-check", "--config", cfg, "--tgrid", "linear:0:0.5:3", "--format", "json"});
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(json::parse(r.out)["rows"].size(), 3u);
    EXPECT_TRUE(json::parse(r.err).contains("sup_integral"));
}

TEST_F(CliTest, BoundScanGoldenHeader) {
    const auto r = run({"bound-scan", "--config", write("band.json", band_config()), "--tgrid", "geometric-to-1:6"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(first_line(r.out), "t,EalphaSq,bound_product,running_sup,err_estimate,converged");
    EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 8);
}

TEST_F(CliTest, MonteCarloRuns) {
    json classical{{"market", merton_market()},
                   {"info", {{"kind", "interval"}, {"p1", 0}, {"p2", "inf"}}},
                   {"mc", {{"strategy", "classical"}, {"steps", 4}}}};
    const auto cfg = write("classical.json", classical);
    const auto r = run({"mc", "--config", cfg, "--paths", "50000", "--seed", "3"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto doc = json::parse(r.out);
    EXPECT_LE(std::abs(doc["z_score"].get<double>()), 3.0);
    EXPECT_EQ(doc["paths"], 50000);
    EXPECT_EQ(r.out, run({"mc", "--config", cfg, "--paths", "50000", "--seed", "3"}).out);
    EXPECT_NE(r.out, run({"mc", "--config", cfg, "--paths", "50000", "--seed", "4"}).out);

    json riskless = classical;
    riskless["mc"] = {{"strategy", "riskless"}, {"steps", 3}, {"paths", 100}, {"path_csv", path("paths.csv")}};
    riskless["initial_wealth"] = 2.0;
    const auto rr = run({"mc", "--config", write("riskless.json", riskless), "--format", "csv"});
    ASSERT_EQ(rr.code, 0) << rr.err;
    const auto paths = slurp(path("paths.csv"));
    EXPECT_EQ(first_line(paths), "path_index,realized_L,terminal_log_wealth");
    EXPECT_EQ(std::count(paths.begin(), paths.end(), '\n'), 101);
    EXPECT_NE(rr.out.find("riskless,1,100,0,"), std::string::npos) << rr.out;
}

TEST_F(CliTest, InsiderMonteCarloUsesCutoff) {
    auto cfg = band_config();
    cfg["mc"] = {{"strategy", "insider-interval"}, {"grid", "power:0.9:200:0.25"}, {"paths", 4000}};
    const auto r = run({"mc", "--config", write("insider.json", cfg)});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto doc = json::parse(r.out);
    EXPECT_EQ(doc["target_kind"], "VG");
    EXPECT_EQ(doc["horizon"], 0.9);
    EXPECT_LE(std::abs(doc["z_score"].get<double>()), 3.5);
}

TEST_F(CliTest, OracleAndMartingaleOutputs) {
    auto cfg = band_config();
    cfg["t"] = {0.3, 0.6};
    cfg["paths"] = 20000;
    const auto file = write("band.json", cfg);
    auto r = run({"drift-oracle", "--config", file});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(first_line(r.out), "t,mc_EalphaSq,standard_error,quadrature_EalphaSq,quadrature_error,z_score");
    EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 3);
    r = run({"martingale-scan", "--config", file, "--tgrid", "linear:0:0.9:4"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(first_line(r.out), "t,mean_cond_prob,standard_error");
    EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 5);
}

TEST_F(CliTest, ConfigErrorsExitWithTwo) {
    auto expect_config_error = [](const Result& r) {
        EXPECT_EQ(r.code, 2);
        const auto doc = json::parse(r.err);
        EXPECT_EQ(doc["error"]["exit_code"], 2);
        EXPECT_FALSE(doc["error"]["message"].get<std::string>().empty());
    };
    auto cfg = band_config();
    cfg["extra"] = true;
    expect_config_error(run({"value", "--config", write("extra.json", cfg)}));
    cfg = band_config();
    cfg["market"]["sigma"] = {-1};
    expect_config_error(run({"value", "--config", write("neg.json", cfg)}));
    cfg = band_config();
    cfg["mc"] = {{"strategy", "insider-interval"}, {"turbo", 1}};
    expect_config_error(run({"mc", "--config", write("mc.json", cfg)}));
    expect_config_error(run({"value"}));
    expect_config_error(run({"value", "--config", path("missing.json")}));
    std::ofstream(path("broken.json")) << "{not json";
    expect_config_error(run({"value", "--config", path("broken.json")}));
    expect_config_error(run({"lemma-check", "--config", write("band.json", band_config()), "--tgrid", "zigzag:3"}));
    expect_config_error(run({"value", "--config", write("band2.json", band_config()), "--format", "xml"}));
    expect_config_error(run({"frobnicate"}));
    json exact{{"market", unit_market()}, {"info", {{"kind", "exact_terminal"}}}};
    expect_config_error(run({"lemma-check", "--config", write("exact.json", exact)}));
}

TEST_F(CliTest, HelpExitsCleanly) {
    const auto r = run({"--help"});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("lemma-check"), std::string::npos);
}
