#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "homopart/cli.hpp"
#include "homopart/io.hpp"
#include "homopart/manifest.hpp"

using namespace homopart;
namespace fs = std::filesystem;

namespace {
struct Result {
  int code;
  std::string out, err;
};

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("homopart_cli_" + std::string(
                                            ::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  Result run(std::vector<std::string> args) {
    args.insert(args.begin(), {"--out", dir_.string()});
    std::ostringstream out, err;
    const int code = cli_dispatch(args, out, err);
    return {code, out.str(), err.str()};
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  nlohmann::json manifest(const std::string& command) const {
    return nlohmann::json::parse(read_file(dir_ / (command + ".manifest.json")));
  }

  fs::path dir_;
};
}  // namespace

TEST_F(CliTest, GenerateHomogenizeAudit) {
  auto gen = run({"--seed", "3", "gen", "--family", "planted-boxes", "--n", "24", "--r", "2"});
  ASSERT_EQ(gen.code, 0) << gen.err;
  EXPECT_TRUE(fs::exists(path("instance.khg")));
  EXPECT_TRUE(fs::exists(path("instance.links")));
  auto hom = run({"--seed", "3", "homogenize", "--in", path("instance.khg")});
  ASSERT_EQ(hom.code, 0) << hom.err;
  EXPECT_NE(hom.out.find("pass"), std::string::npos);
  auto aud = run({"audit", "--in", path("instance.khg"), "--part", path("instance.part")});
  EXPECT_EQ(aud.code, 0) << aud.err;
  auto audit = io::read_audit(read_file(path("instance.audit")));
  EXPECT_TRUE(audit.pass);
  EXPECT_EQ(audit.kind, "unweighted");
  auto m = manifest("audit");
  EXPECT_EQ(m["command"], "audit");
  EXPECT_TRUE(m["inputs"].contains("instance.khg"));
  EXPECT_NE(read_file(path("instance.audit")).find("# manifest " + m["digest"].get<std::string>()), std::string::npos);
}

TEST_F(CliTest, ArtifactsAreReproducible) {
  ASSERT_EQ(run({"--seed", "9", "gen", "--family", "product", "--n", "12"}).code, 0);
  const std::string first = read_file(path("instance.khg"));
  const std::string digest = manifest("gen")["digest"];
  ASSERT_EQ(run({"--seed", "9", "--threads", "3", "gen", "--family", "product", "--n", "12"}).code, 0);
  EXPECT_EQ(read_file(path("instance.khg")), first);
  EXPECT_EQ(manifest("gen")["digest"], digest);
}

TEST_F(CliTest, CoverageFailureExitsOne) {
  ASSERT_EQ(run({"gen", "--family", "uniform-random", "--n", "12"}).code, 0);
  auto hom = run({"homogenize", "--in", path("instance.khg"), "--oracle", "greedy", "--r", "2", "--max-anchors", "2"});
  EXPECT_EQ(hom.code, 1);
  EXPECT_NE(hom.err.find("uncovered mass"), std::string::npos);
  EXPECT_EQ(manifest("homogenize")["results"]["coverage"], "failed");
}

TEST_F(CliTest, UsageErrorsExitTwo) {
  EXPECT_EQ(run({"gen", "--bogus"}).code, 2);
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"--mode", "fast", "gen"}).code, 2);
  EXPECT_EQ(run({"gen", "--family", "nope"}).code, 2);
  EXPECT_EQ(run({"audit", "--in", path("absent.khg"), "--part", path("absent.part")}).code, 2);
  {
    std::ofstream f(path("bad.khg"));
    f << "khg 3 2 2 2\n0 9 1\n";
  }
  {
    std::ofstream f(path("p.part"));
    f << "part 3\n1 1\n1 1\n1 1\n";
  }
  auto bad = run({"audit", "--in", path("bad.khg"), "--part", path("p.part")});
  EXPECT_EQ(bad.code, 2);
  EXPECT_NE(bad.err.find("at byte 14"), std::string::npos) << bad.err;
}

TEST_F(CliTest, FailingAuditExitsOne) {
  {
    std::ofstream f(path("half.khg"));
    f << "khg 3 2 2 2\n0 0 0\n1 1 0\n0 1 1\n1 0 1\n";
  }
  {
    std::ofstream f(path("p.part"));
    f << "part 3\n1 1\n1 1\n1 1\n";
  }
  EXPECT_EQ(run({"--eps", "0.1", "audit", "--in", path("half.khg"), "--part", path("p.part")}).code, 1);
}

TEST_F(CliTest, GowersPipeline) {
  auto build = run({"--mode", "toy", "gowers", "build", "--n", "24"});
  ASSERT_EQ(build.code, 0) << build.err;
  auto meta = nlohmann::json::parse(read_file(path("gowers.json")));
  EXPECT_EQ(meta["m"], (std::vector<int>{1, 2, 4, 8}));
  ASSERT_EQ(run({"gowers", "links"}).code, 0);
  EXPECT_TRUE(fs::exists(path("gowers.certs")));
  auto sample = run({"gowers", "sample", "--boxes", "20"});
  EXPECT_EQ(sample.code, 0) << sample.err;
  EXPECT_EQ(io::read_khg(read_file(path("sample.khg"))).k(), 3u);
  auto cascade = run({"gowers", "cascade"});
  ASSERT_EQ(cascade.code, 0) << cascade.err;
  auto c = nlohmann::json::parse(read_file(path("cascade.json")));
  EXPECT_TRUE(c.contains("manifest"));
  EXPECT_TRUE(fs::exists(path("gowers-build.manifest.json")));
}

TEST_F(CliTest, PaperModeGowersIsInfeasible) {
  auto r = run({"--mode", "paper", "--eps", "0.1", "gowers", "build", "--n", "24"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("toy"), std::string::npos);
}

TEST_F(CliTest, Vc) {
  {
    std::ofstream f(path("m.khg"));
    f << "khg 3 3 3 3\n0 0 0\n1 1 1\n2 2 2\n";
  }
  auto r = run({"vc", "--in", path("m.khg")});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("VC-dimension 1"), std::string::npos) << r.out;
}
