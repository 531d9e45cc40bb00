#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace {

std::string cli() { return DEGELL_CLI_PATH; }

int run(const std::string& args) {
    const int status = std::system((cli() + " " + args + " > /dev/null 2>&1").c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
    std::ifstream is(path);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

std::string tmp_path(const std::string& name) { return testing::TempDir() + "degell_" + name; }

}  // namespace

TEST(CliClassify, EmitsTheRegimeReport) {
    const std::string out = tmp_path("classify.json");
    ASSERT_EQ(run("classify --N 3 --theta 0.75 --m 1.2 --out " + out), 0);
    const auto j = nlohmann::json::parse(slurp(out));
    EXPECT_EQ(j["region"], "CurveThm1");
    EXPECT_EQ(j["solution_notion"], "distributional");
    EXPECT_EQ(j["solution_space"][0]["kind"], "W1p");
    EXPECT_DOUBLE_EQ(j["solution_space"][0]["exponent"], 1.0);

    ASSERT_EQ(run("classify --N 3 --theta 0.75 --m 2 --out " + out), 0);
    EXPECT_EQ(nlohmann::json::parse(slurp(out))["region"], "A");

    ASSERT_EQ(run("classify --N 3 --theta 0.2 --m 1.1 --out " + out), 0);
    EXPECT_EQ(nlohmann::json::parse(slurp(out))["region"], "Uncovered");
}

TEST(CliClassify, InvalidInputExitsTwo) {
    EXPECT_EQ(run("classify --N 2 --theta 0.5 --m 1.5"), 2);
    EXPECT_EQ(run("classify --N 3 --theta 1.5 --m 1.5"), 2);
    EXPECT_EQ(run("nonsense"), 2);
}

TEST(CliSolve, ZeroSourceGivesZeroColumns) {
    const std::string out = tmp_path("zero.csv");
    ASSERT_EQ(run("solve --N 3 --theta 0.5 --gamma 0 --amp 0 --M 16 --grading 1 --out " + out), 0);
    std::ifstream is(out);
    std::string header;
    std::getline(is, header);
    EXPECT_EQ(header, "r,u,w,flux");
    std::string line;
    int rows = 0;
    while (std::getline(is, line)) {
        EXPECT_NE(line.find(",0,0,"), std::string::npos) << line;
        ++rows;
    }
    EXPECT_EQ(rows, 17);
}

TEST(CliSolve, ByteIdenticalReruns) {
    const std::string a = tmp_path("det_a.csv"), b = tmp_path("det_b.csv");
    const std::string flags =
        "solve --N 3 --theta 0.75 --gamma 2.5 --mode annulus --rmin 0.01 --M 128 --grading 3 "
        "--method picard ";
    ASSERT_EQ(run(flags + "--out " + a), 0);
    ASSERT_EQ(run(flags + "--out " + b), 0);
    const std::string ca = slurp(a), cb = slurp(b);
    ASSERT_FALSE(ca.empty());
    EXPECT_EQ(ca, cb);
}

TEST(CliSolve, NonConvergenceExitsThreeWithPartialOutput) {
    const std::string out = tmp_path("partial.csv");
    std::remove(out.c_str());
    EXPECT_EQ(run("solve --N 3 --theta 0.75 --gamma 2.5 --mode annulus --rmin 0.01 --M 64 "
                  "--grading 3 --method picard --max-iter 1 --out " +
                  out),
              3);
    EXPECT_FALSE(slurp(out).empty());  // partial result still written
}

TEST(CliSolve, ReportCarriesTheContractKeys) {
    const std::string rep = tmp_path("report.json");
    ASSERT_EQ(run("solve --N 3 --theta 0.75 --gamma 1 --M 64 --grading 2 --method oracle "
                  "--out /dev/null --report " +
                  rep),
              0);
    const auto j = nlohmann::json::parse(slurp(rep));
    for (const char* key : {"spec", "mesh", "iterations", "final_update", "residual_norm", "norms"})
        EXPECT_TRUE(j.contains(key)) << key;
    EXPECT_DOUBLE_EQ(j["spec"]["theta"], 0.75);
    EXPECT_EQ(j["mesh"]["cells"], 64);
    EXPECT_TRUE(j["norms"].contains("W11"));
}

TEST(CliSequence, DiagnosticsTableShape) {
    const std::string out = tmp_path("seq.csv");
    ASSERT_EQ(run("sequence --N 3 --theta 0.75 --gamma 2.4 --amp 1e-3 --M 64 --grading 3 "
                  "--schedule 1,4,16 --out " +
                  out),
              0);
    std::ifstream is(out);
    std::string header;
    std::getline(is, header);
    EXPECT_EQ(header, "n,iterations,converged,final_update,W11,L_N_over_Nm1,dW11,dflux");
    int rows = 0;
    std::string line;
    while (std::getline(is, line)) ++rows;
    EXPECT_EQ(rows, 3);
}

TEST(CliSequence, WorkerCountDoesNotChangeTheBytes) {
    const std::string a = tmp_path("wk1.csv"), b = tmp_path("wk2.csv");
    const std::string flags =
        "sequence --N 3 --theta 0.75 --gamma 2.4 --amp 1e-3 --M 64 --grading 3 "
        "--schedule 1,4,16,64 --out ";
    ASSERT_EQ(WEXITSTATUS(std::system(
                  ("DEGELL_WORKERS=1 " + cli() + " " + flags + a + " > /dev/null").c_str())),
              0);
    ASSERT_EQ(WEXITSTATUS(std::system(
                  ("DEGELL_WORKERS=2 " + cli() + " " + flags + b + " > /dev/null").c_str())),
              0);
    const std::string ca = slurp(a);
    ASSERT_FALSE(ca.empty());
    EXPECT_EQ(ca, slurp(b));
}

TEST(CliEstimates, LedgerAndStrictMode) {
    const std::string out = tmp_path("ledger.csv");
    ASSERT_EQ(run("estimates --N 3 --theta 0.75 --gamma 2.4 --amp 1e-3 --M 64 --grading 3 "
                  "--schedule 1,4,16 --ids TK1,BAR --m 1.2 --bar-samples 5000 --strict --out " +
                  out),
              0);
    const std::string ledger = slurp(out);
    EXPECT_NE(ledger.find("estimate,k,p,rho,n,lhs,rhs,allowance,passed"), std::string::npos);
    EXPECT_NE(ledger.find("TK1,"), std::string::npos);
    EXPECT_NE(ledger.find("BAR,"), std::string::npos);
    EXPECT_EQ(ledger.find("false"), std::string::npos);
}

TEST(CliEstimates, EmptyOrUnknownIdsExitTwo) {
    EXPECT_EQ(run("estimates --N 3 --theta 0.5 --gamma 1 --M 64 --ids '' "), 2);
    EXPECT_EQ(run("estimates --N 3 --theta 0.5 --gamma 1 --M 64 --ids NOPE"), 2);
    EXPECT_EQ(run("estimates --N 3 --theta 0.5 --gamma 1 --M 64"), 2);  // --ids required
}

TEST(CliExponents, RegularCaseReportsNoBlowup) {
    const std::string out = tmp_path("exp.json");
    ASSERT_EQ(run("exponents --N 3 --theta 0.75 --gamma 1 --M 256 --grading 3 "
                  "--window 0.05 0.5 --q-range 1 2 --refinements 64,128,256 --out " +
                  out),
              0);
    const auto j = nlohmann::json::parse(slurp(out));
    EXPECT_TRUE(j["q_star"]["no_blowup"].get<bool>());
    EXPECT_DOUBLE_EQ(j["q_star"]["value"], 2.0);
    EXPECT_DOUBLE_EQ(j["predicted"], 4.0);  // (2-gamma)/(1-theta) = 1/0.25
}

TEST(CliPhaseDiagram, GridCsv) {
    const std::string out = tmp_path("phase.csv");
    ASSERT_EQ(run("phase-diagram --N 3 --grid 11 --m-min 1 --m-max 2 --out " + out), 0);
    std::ifstream is(out);
    std::string header;
    std::getline(is, header);
    EXPECT_EQ(header, "theta,m,region");
    int rows = 0;
    bool saw_a = false, saw_d = false;
    std::string line;
    while (std::getline(is, line)) {
        ++rows;
        saw_a |= line.find(",A") != std::string::npos;
        saw_d |= line.find(",D") != std::string::npos;
    }
    EXPECT_EQ(rows, 121);
    EXPECT_TRUE(saw_a);
    EXPECT_TRUE(saw_d);
}

TEST(CliConfig, FileProvidesDefaultsFlagsOverride) {
    const std::string cfg = tmp_path("run.cfg");
    {
        std::ofstream os(cfg);
        os << "[classify]\nN=3\ntheta=0.75\nm=1.2\n";
    }
    const std::string out = tmp_path("cfg_out.json");
    ASSERT_EQ(run("--config " + cfg + " classify --out " + out), 0);
    EXPECT_EQ(nlohmann::json::parse(slurp(out))["region"], "CurveThm1");
    // A flag on the command line wins over the config value.
    ASSERT_EQ(run("--config " + cfg + " classify --m 2 --out " + out), 0);
    EXPECT_EQ(nlohmann::json::parse(slurp(out))["region"], "A");
}
