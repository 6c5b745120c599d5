#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace {

namespace fs = std::filesystem;

class Cli : public ::testing::Test {
protected:
    void SetUp() override
    {
        dir_ = fs::temp_directory_path() /
               ("lasso_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    int run(const std::string& args) const
    {
        const std::string cmd = std::string("LS_LOG=quiet \"") + LASSO_CLI_PATH + "\" " + args + " > \"" +
                                (dir_ / "stdout.txt").string() + "\" 2> \"" + (dir_ / "stderr.txt").string() + "\"";
        const int status = std::system(cmd.c_str());
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    std::string slurp(const std::string& name) const
    {
        std::ifstream in(dir_ / name, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    fs::path dir_;
};

TEST_F(Cli, GenSolveAnalyzePipeline)
{
    ASSERT_EQ(run("gen --family uniform --m 20 --n 40 --seed 3 --out " + path("p.json")), 0);
    ASSERT_EQ(run("solve --in " + path("p.json") + " --method fista --tol 1e-12 --trace " + path("t.csv") +
                  " --out " + path("x.json")),
              0);
    EXPECT_NE(slurp("stdout.txt").find("converged"), std::string::npos);
    EXPECT_EQ(slurp("t.csv").substr(0, 4), "iter");
    ASSERT_EQ(run("analyze --in " + path("p.json") + " --at-iterate " + path("x.json") + " --tau 0.9 --out " +
                  path("s.json")),
              0);
    EXPECT_NE(slurp("s.json").find("\"regime\""), std::string::npos);
    ASSERT_EQ(run("analyze --in " + path("p.json") + " --at-iterate " + path("x.json") + " --dump-operator " +
                  path("op.json")),
              0);
    EXPECT_NE(slurp("op.json").find("R_aug"), std::string::npos);
}

TEST_F(Cli, GenIsByteIdenticalOnRepeat)
{
    fs::create_directories(dir_ / "a");
    fs::create_directories(dir_ / "b");
    ASSERT_EQ(run("gen --family cs --m 16 --n 32 --k 3 --seed 5 --out " + path("a/p.json")), 0);
    ASSERT_EQ(run("gen --family cs --m 16 --n 32 --k 3 --seed 5 --out " + path("b/p.json")), 0);
    EXPECT_EQ(slurp("a/p.json"), slurp("b/p.json"));
    EXPECT_EQ(slurp("a/p.x_true.json"), slurp("b/p.x_true.json"));
    EXPECT_FALSE(slurp("a/p.x_true.json").empty());
}

TEST_F(Cli, IterationLimitExitsThree)
{
    ASSERT_EQ(run("gen --family uniform --m 20 --n 40 --seed 1 --out " + path("p.json")), 0);
    EXPECT_EQ(run("solve --in " + path("p.json") + " --method ista --max-iter 1"), 3);
}

TEST_F(Cli, BadInputExitsTwo)
{
    EXPECT_EQ(run("solve --in " + path("missing.json") + " --method ista"), 2);
    EXPECT_EQ(run("solve --in " + path("missing.json") + " --method newton"), 2);
    EXPECT_EQ(run("gen --family uniform --m 0 --out " + path("p.json")), 2);
    EXPECT_EQ(run("frobnicate"), 2);
    ASSERT_EQ(run("gen --family uniform --m 4 --n 6 --out " + path("p.json")), 0);
    EXPECT_EQ(run("analyze --in " + path("p.json") + " --flags 1,0,2,0,0,0"), 2);
    EXPECT_EQ(run("analyze --in " + path("p.json") + " --flags 1,0"), 2);
}

TEST_F(Cli, VerifyEquivalenceSucceeds)
{
    EXPECT_EQ(run("verify --suite equivalence --seeds 2"), 0);
    EXPECT_NE(slurp("stdout.txt").find("PASS"), std::string::npos);
}

TEST_F(Cli, ReportWritesTracesAndSummary)
{
    ASSERT_EQ(run("report --example 2 --scale desk --seed 1 --out " + path("rep")), 0);
    for (const char* f : {"rep/report.json", "rep/ista.csv", "rep/fista.csv", "rep/hybrid.csv"}) {
        EXPECT_TRUE(fs::exists(dir_ / f)) << f;
    }
    EXPECT_NE(slurp("rep/report.json").find("hybrid_saving"), std::string::npos);
}

} // namespace
