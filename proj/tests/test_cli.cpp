#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "cli.hpp"
#include "lidaraug/io.hpp"

namespace fs = std::filesystem;

namespace lidaraug {
namespace {

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("lidaraug_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    write_text(dir_ / "small.cfg",
               "source_channels = 16\nsource_points_per_channel = 300\n"
               "target_channels = 8\ntarget_points_per_channel = 150\n");
  }
  void TearDown() override { fs::remove_all(dir_); }

  int run(std::vector<std::string> args) {
    args.insert(args.begin(), "lidaraug");
    out_.str("");
    err_.str("");
    return cli::dispatch(args, out_, err_);
  }

  static void write_text(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

  static std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
  }

  static std::map<std::string, std::string> tree(const fs::path& root) {
    std::map<std::string, std::string> files;
    for (const auto& e : fs::recursive_directory_iterator(root)) {
      if (e.is_regular_file()) files[fs::relative(e.path(), root).string()] = slurp(e.path());
    }
    return files;
  }

  std::string synth(const std::string& name, const std::string& seed) {
    const auto out = (dir_ / name).string();
    EXPECT_EQ(run({"synth", "--config", (dir_ / "small.cfg").string(), "--seed", seed, "--out", out,
                   "--n-source", "2", "--n-labeled", "1", "--n-unlabeled", "2"}),
              cli::kOk)
        << err_.str();
    return out;
  }

  fs::path dir_;
  std::ostringstream out_;
  std::ostringstream err_;
};

TEST_F(Cli, SynthIsReproducible) {
  const auto a = tree(synth("a", "5"));
  const auto b = tree(synth("b", "5"));
  const auto c = tree(synth("c", "6"));
  EXPECT_EQ(a.size(), 2u + 2u + 2u + 2u + 1u);  // clouds, label files, config
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
}

TEST_F(Cli, MatchNeverAddsPoints) {
  const auto m = synth("m", "1");
  const auto input = fs::path(m) / "source" / "000000.bin";
  const auto out = (dir_ / "matched.bin").string();
  ASSERT_EQ(run({"match", "--config", (dir_ / "small.cfg").string(), "--in", input.string(), "--out", out}),
            cli::kOk)
      << err_.str();
  EXPECT_LE(read_cloud(out).size(), read_cloud(input).size());

  write_text(dir_ / "same.cfg", "source_channels = 8\nsource_points_per_channel = 150\n"
                                "target_channels = 8\ntarget_points_per_channel = 150\n"
                                "source_vfov_min_deg = -30\nsource_vfov_max_deg = 10\n");
  ASSERT_EQ(run({"match", "--config", (dir_ / "same.cfg").string(), "--in", input.string(), "--out", out}),
            cli::kOk);
  EXPECT_LE(read_cloud(out).size(), read_cloud(input).size());
}

TEST_F(Cli, MixAndAdvProduceScenes) {
  const auto m = fs::path(synth("m", "2"));
  const auto cfg = (dir_ / "small.cfg").string();
  const auto mixed = (dir_ / "mixed.bin").string();
  ASSERT_EQ(run({"mix", "--config", cfg, "--source", (m / "source" / "000000.bin").string(), "--target",
                 (m / "target_labeled" / "000000.bin").string(), "--out", mixed}),
            cli::kOk)
      << err_.str();
  EXPECT_TRUE(fs::exists(dir_ / "mixed.txt"));

  const auto adv = (dir_ / "adv.bin").string();
  ASSERT_EQ(run({"adv", "--config", cfg, "--in", (m / "target_unlabeled" / "000000.bin").string(), "--labels",
                 (m / "target_labeled" / "000000.txt").string(), "--out", adv}),
            cli::kOk)
      << err_.str();
  EXPECT_NE(out_.str().find("selected="), std::string::npos);
}

TEST_F(Cli, PipelineWritesReports) {
  const auto m = synth("m", "3");
  const auto out = dir_ / "run";
  ASSERT_EQ(run({"pipeline", "--manifest", m, "--out", out.string()}), cli::kOk) << err_.str();
  const std::string log = slurp(out / "report.log");
  EXPECT_EQ(out_.str(), log);
  EXPECT_NE(log.find("stage=targetmix"), std::string::npos);
  EXPECT_NE(log.find("stage=advmix"), std::string::npos);
  EXPECT_FALSE(slurp(out / "summary.json").empty());
}

TEST_F(Cli, GradcheckWithinTolerance) {
  ASSERT_EQ(run({"gradcheck", "--seed", "4"}), cli::kOk) << err_.str();
  const std::string text = out_.str();
  const auto pos = text.find("max_relative_error=");
  ASSERT_NE(pos, std::string::npos);
  EXPECT_LT(std::stod(text.substr(pos + 19)), 1e-5);
}

TEST_F(Cli, ExitCodes) {
  EXPECT_EQ(run({"frobnicate"}), cli::kValidationError);
  EXPECT_EQ(run({"match"}), cli::kValidationError);  // missing --in
  write_text(dir_ / "bad.cfg", "p_tm = 2\n");
  EXPECT_EQ(run({"gradcheck", "--config", (dir_ / "bad.cfg").string()}), cli::kValidationError);
  EXPECT_NE(err_.str().find("p_tm"), std::string::npos);

  EXPECT_EQ(run({"match", "--in", (dir_ / "missing.bin").string(), "--out", (dir_ / "x.bin").string()}),
            cli::kIoError);
  std::ofstream(dir_ / "trunc.bin", std::ios::binary) << std::string(17, 'x');
  EXPECT_EQ(run({"match", "--in", (dir_ / "trunc.bin").string(), "--out", (dir_ / "x.bin").string()}),
            cli::kIoError);
  EXPECT_EQ(run({"--help"}), cli::kOk);
}

}  // namespace
}  // namespace lidaraug
