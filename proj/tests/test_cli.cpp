#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "bclab/experiment.hpp"

using namespace bclab;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code = -1;
    std::string out;
};

std::string env_str(const char* name) {
    const char* v = std::getenv(name);
    return v ? v : "";
}

std::string data_dir() {
    const std::string d = env_str("BCLAB_DATA");
    return d.empty() ? BCLAB_DEFAULT_DATA : d;
}

Result run_cli(const std::string& args) {
    const std::string cmd = env_str("BCLAB_CLI") + " " + args + " 2>/dev/null";
    Result r;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return r;
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        if (env_str("BCLAB_CLI").empty()) GTEST_SKIP() << "BCLAB_CLI not set";
        dir_ = fs::temp_directory_path() / ("bclab_cli_" + std::to_string(::getpid()) + "_" +
                                            ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::create_directories(dir_);
    }
    void TearDown() override {
        std::error_code ec;
        fs::remove_all(dir_, ec);
    }
    fs::path write(const std::string& name, const std::string& text) {
        const fs::path p = dir_ / name;
        std::ofstream(p) << text;
        return p;
    }
    fs::path dir_;
};

const char* kL4Below =
    "[run]\nsuite = curvature\nseed = 7\n[space]\nkind = lp\np = 4\nn = 2\n[params]\nS = 2.5\n[settings]\ntrials = 5000\n";

const Json* find_check(const Json& report, const std::string& name) {
    for (const auto& c : report["checks"])
        if (c["check"] == name) return &c;
    return nullptr;
}

}  // namespace

TEST_F(Cli, BadConfigsExitTwo) {
    EXPECT_EQ(run_cli("run --config " + write("nospace.ini", "[run]\nsuite = curvature\n").string()).code, 2);
    EXPECT_EQ(run_cli("run --config " + write("badp.ini", "[space]\nkind = lp\np = 1\nn = 2\n").string()).code, 2);
    EXPECT_EQ(run_cli("run --config " + (dir_ / "missing.ini").string()).code, 2);
    EXPECT_EQ(run_cli("run").code, 2);
}

TEST_F(Cli, UnknownSuiteExitsTwo) {
    EXPECT_EQ(run_cli("run --suite bogus --config " + write("a.ini", kL4Below).string()).code, 2);
}

TEST_F(Cli, ViolationExitsOneWithWitness) {
    const auto out = dir_ / "r.json";
    const auto r = run_cli("run --config " + write("a.ini", kL4Below).string() + " --out " + out.string());
    EXPECT_EQ(r.code, 1);
    const auto report = Json::parse(slurp(out));
    const Json* s = find_check(report, "s_concavity");
    ASSERT_NE(s, nullptr);
    EXPECT_EQ((*s)["verdict"], "violation");
    EXPECT_LT((*s)["residual"].get<double>(), kViolationThreshold);
    EXPECT_TRUE(s->contains("witness"));
    for (const auto& c : report["checks"])
        for (const char* field : {"check", "verdict", "residual", "seed"}) EXPECT_TRUE(c.contains(field)) << field;
}

TEST_F(Cli, DeclaredConstantsPass) {
    const auto r = run_cli("run --config " + data_dir() + "/lp4.ini");
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(Json::parse(r.out)["summary"]["violation"], 0);
}

TEST_F(Cli, ReplayReproducesResiduals) {
    const auto out = dir_ / "r.json";
    run_cli("run --config " + write("a.ini", kL4Below).string() + " --out " + out.string());
    const auto rep = run_cli("replay --witness " + out.string());
    EXPECT_EQ(rep.code, 1);
    const auto arr = Json::parse(rep.out);
    ASSERT_FALSE(arr.empty());
    for (const auto& o : arr) EXPECT_LE(o["difference"].get<double>(), 1e-12) << o["check"];
}

TEST_F(Cli, PerturbedWitnessStaysClose) {
    const auto out = dir_ / "r.json";
    run_cli("run --config " + write("a.ini", kL4Below).string() + " --out " + out.string());
    const auto report = Json::parse(slurp(out));
    Json w = (*find_check(report, "s_concavity"))["witness"];
    const double recorded = w["residual"].get<double>();
    for (auto& pt : w["points"])
        for (auto& c : pt) c = c.get<double>() + 1e-12;
    const auto path = write("w.json", w.dump());
    const auto arr = Json::parse(run_cli("replay --witness " + path.string()).out);
    ASSERT_EQ(arr.size(), 1u);
    EXPECT_NEAR(arr[0]["residual"].get<double>(), recorded, 1e-9);
}

TEST_F(Cli, ReportsIdenticalApartFromTiming) {
    const auto cfg = write("a.ini", kL4Below);
    const auto a = dir_ / "a.json", b = dir_ / "b.json";
    run_cli("run --config " + cfg.string() + " --out " + a.string());
    run_cli("run --config " + cfg.string() + " --out " + b.string());
    auto ja = Json::parse(slurp(a)), jb = Json::parse(slurp(b));
    EXPECT_TRUE(ja.contains("timing"));
    EXPECT_EQ(strip_timing(ja).dump(2), strip_timing(jb).dump(2));
}

TEST_F(Cli, SeedOverrideChangesSeeds) {
    const auto cfg = write("a.ini", kL4Below);
    const auto a = Json::parse(run_cli("run --config " + cfg.string()).out);
    const auto b = Json::parse(run_cli("run --seed 8 --config " + cfg.string()).out);
    EXPECT_EQ(b["seed"], 8);
    EXPECT_NE(a["checks"][0]["seed"], b["checks"][0]["seed"]);
}
