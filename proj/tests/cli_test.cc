#include "cli.h"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

namespace baltor::cli {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result Call(std::vector<std::string> args) {
  std::ostringstream out, err;
  Result r;
  r.code = Run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string Slurp(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

void WriteText(const fs::path& path, const std::string& text) {
  std::ofstream(path) << text;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("baltor_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string Path(const std::string& name) const { return (dir_ / name).string(); }

  void Synth(const std::string& name, int folds, int queries = 40) {
    const auto r = Call({"synth", "--queries", std::to_string(queries), "--items", "6", "--dim",
                         "3", "--grades", "3", "--noise", "0.5", "--seed", "4", "--folds",
                         std::to_string(folds), "--out", Path(name)});
    ASSERT_EQ(r.code, kExitOk) << r.err;
  }

  fs::path dir_;
};

TEST_F(CliTest, MissingDataFile) {
  const auto r = Call({"train", "--data", Path("nope")});
  EXPECT_EQ(r.code, kExitMissingInput);
  EXPECT_NE(r.err.find("nope"), std::string::npos);
}

TEST_F(CliTest, TrainWritesFiniteModel) {
  Synth("d", 1);
  const auto r = Call({"train", "--data", Path("d"), "--out", Path("model.txt")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const std::string model = Slurp(Path("model.txt"));
  EXPECT_NE(model.find("scorer=builtin"), std::string::npos);
  EXPECT_NE(model.find("weights="), std::string::npos);
  EXPECT_NE(model.find("theta="), std::string::npos);
  EXPECT_NE(model.find("loss_trace="), std::string::npos);
  EXPECT_EQ(model.find("nan"), std::string::npos);
  EXPECT_EQ(model.find("inf"), std::string::npos);
}

TEST_F(CliTest, CalibrateWritesOnePolicyPerMethodAndCoverage) {
  Synth("d", 1);
  ASSERT_EQ(Call({"train", "--data", Path("d"), "--out", Path("model.txt")}).code, kExitOk);
  const auto r = Call({"calibrate", "--data", Path("d"), "--model-file", Path("model.txt"),
                       "--baselines", "balto,entropy", "--out", Path("pol.txt")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const std::string text = Slurp(Path("pol.txt"));
  std::size_t records = 0;
  for (std::size_t p = text.find("[policy]"); p != std::string::npos; p = text.find("[policy]", p + 1))
    ++records;
  EXPECT_EQ(records, 14u);
}

TEST_F(CliTest, FullCoveragePolicyAcceptsEverything) {
  Synth("d", 1);
  ASSERT_EQ(Call({"train", "--data", Path("d"), "--out", Path("model.txt")}).code, kExitOk);
  // Evaluating on the calibration split itself must cover every pair.
  fs::create_directories(Path("self"));
  fs::copy_file(Path("d/vali.txt"), Path("self/vali.txt"));
  fs::copy_file(Path("d/vali.txt"), Path("self/test.txt"));
  ASSERT_EQ(Call({"calibrate", "--data", Path("self"), "--model-file", Path("model.txt"), "--grid",
                  "1.0", "--out", Path("pol.txt")})
                .code,
            kExitOk);
  const auto r = Call({"sweep", "--data", Path("self"), "--model-file", Path("model.txt"),
                       "--policies", Path("pol.txt"), "--baselines", "balto"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("baltor,self,1,1,"), std::string::npos) << r.out;
}

TEST_F(CliTest, UnlabeledCalibrationIsAccepted) {
  Synth("d", 1);
  ASSERT_EQ(Call({"train", "--data", Path("d"), "--out", Path("model.txt")}).code, kExitOk);
  std::istringstream in(Slurp(Path("d/vali.txt")));
  std::string line, stripped;
  while (std::getline(in, line)) stripped += line.substr(line.find(' ') + 1) + "\n";
  fs::create_directories(Path("u"));
  WriteText(Path("u/vali.txt"), stripped);
  const auto r = Call({"calibrate", "--data", Path("u"), "--model-file", Path("model.txt")});
  EXPECT_EQ(r.code, kExitOk) << r.err;

  // The same file cannot serve as a test split.
  fs::copy_file(Path("u/vali.txt"), Path("u/test.txt"));
  ASSERT_EQ(Call({"calibrate", "--data", Path("u"), "--model-file", Path("model.txt"), "--out",
                  Path("pol.txt")})
                .code,
            kExitOk);
  const auto s = Call({"sweep", "--data", Path("u"), "--model-file", Path("model.txt"),
                       "--policies", Path("pol.txt")});
  EXPECT_EQ(s.code, kExitSchemaMismatch);
}

TEST_F(CliTest, EmptyCalibration) {
  Synth("d", 1);
  ASSERT_EQ(Call({"train", "--data", Path("d"), "--out", Path("model.txt")}).code, kExitOk);
  fs::create_directories(Path("e"));
  WriteText(Path("e/vali.txt"), "1 qid:1 1:0.5\n0 qid:2 1:0.1\n");
  const auto r = Call({"calibrate", "--data", Path("e"), "--model-file", Path("model.txt")});
  EXPECT_EQ(r.code, kExitEmptyCalibration);
}

TEST_F(CliTest, SchemaMismatch) {
  Synth("d", 1);
  ASSERT_EQ(Call({"train", "--data", Path("d"), "--out", Path("model.txt")}).code, kExitOk);
  fs::create_directories(Path("wide"));
  WriteText(Path("wide/vali.txt"), "1 qid:1 9:0.5\n0 qid:1 9:0.1\n");
  EXPECT_EQ(Call({"calibrate", "--data", Path("wide"), "--model-file", Path("model.txt")}).code,
            kExitSchemaMismatch);
  WriteText(Path("bad.txt"), "1 qid:1 x:0.5\n");
  EXPECT_EQ(Call({"train", "--data", Path("bad.txt")}).code, kExitSchemaMismatch);
}

TEST_F(CliTest, SweepIsByteIdentical) {
  Synth("d", 1);
  for (const char* mode : {"det", "rand"}) {
    const std::vector<std::string> args{"sweep", "--data", Path("d"), "--mode", mode, "--seed", "3",
                                        "--epochs", "5"};
    const auto a = Call(args);
    const auto b = Call(args);
    ASSERT_EQ(a.code, kExitOk) << a.err;
    EXPECT_EQ(a.out, b.out);
    EXPECT_NE(a.out.find("cov_gap"), std::string::npos);
    EXPECT_NE(a.out.find("# theta_resolved."), std::string::npos);
  }
}

TEST_F(CliTest, SweepOverFiveFolds) {
  Synth("folds", 5, 50);
  const auto r = Call({"sweep", "--data", Path("folds"), "--epochs", "3", "--out", Path("r.csv")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const std::string csv = Slurp(Path("r.csv"));
  EXPECT_TRUE(fs::exists(Path("r.json")));
  std::size_t fold_rows = 0, mean_rows = 0, std_rows = 0;
  std::istringstream in(csv);
  std::string line;
  while (std::getline(in, line)) {
    if (line.find(",Fold") != std::string::npos) ++fold_rows;
    if (line.find(",mean,") != std::string::npos) ++mean_rows;
    if (line.find(",std,") != std::string::npos) ++std_rows;
  }
  EXPECT_EQ(fold_rows, 5u * 21u);
  EXPECT_EQ(mean_rows, 21u);
  EXPECT_EQ(std_rows, 21u);
}

TEST_F(CliTest, ExternalScorerPassThrough) {
  Synth("d", 1);
  fs::create_directories(Path("scores"));
  for (const char* split : {"train", "vali", "test"}) {
    std::istringstream in(Slurp(Path(std::string("d/") + split + ".txt")));
    std::string line, scores;
    int k = 0;
    while (std::getline(in, line)) scores += std::to_string((k++ % 7) * 0.25) + "\n";
    WriteText(Path(std::string("scores/") + split + ".scores"), scores);
  }
  const auto t = Call({"train", "--data", Path("d"), "--scorer", "external:" + Path("scores"),
                       "--out", Path("model.txt")});
  ASSERT_EQ(t.code, kExitOk) << t.err;
  const std::string model = Slurp(Path("model.txt"));
  EXPECT_NE(model.find("scorer=external"), std::string::npos);
  EXPECT_NE(model.find("pass-through"), std::string::npos);
  const auto s = Call({"sweep", "--data", Path("d"), "--scorer", "external:" + Path("scores")});
  EXPECT_EQ(s.code, kExitOk) << s.err;

  WriteText(Path("scores/vali.scores"), "0.1\n");
  EXPECT_EQ(Call({"calibrate", "--data", Path("d"), "--model-file", Path("model.txt")}).code,
            kExitSchemaMismatch);
}

TEST_F(CliTest, OracleExitCodes) {
  EXPECT_EQ(Call({"oracle", "--states", "5"}).code, kExitOracleSize);
  const auto empty = Call({"oracle", "--worlds", "0"});
  EXPECT_EQ(empty.code, kExitOk);
  const auto a = Call({"oracle", "--worlds", "20", "--states", "3", "--seed", "9"});
  const auto b = Call({"oracle", "--worlds", "20", "--states", "3", "--seed", "9"});
  EXPECT_EQ(a.code, kExitOk) << a.out;
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.out.find("# summary"), std::string::npos);
}

}  // namespace
}  // namespace baltor::cli
