// Copyright (c) the jpegspace authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Runs the built jpegspace binary and checks exit codes and output.

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "jpegspace/image_io.h"
#include "test_util.h"

namespace jpegspace {
namespace {

namespace fs = std::filesystem;
using testing_util::FixturePath;

struct RunResult {
  int status = -1;
  std::string output;  // stdout and stderr
};

RunResult RunCli(const std::string& args) {
  const std::string cmd = std::string(JPEGSPACE_CLI) + " " + args + " 2>&1";
  RunResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) return r;
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof(buf), pipe)) > 0) r.output.append(buf, n);
  const int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("jpegspace_cli_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string Path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

TEST_F(CliTest, HelpAndUsageErrors) {
  EXPECT_EQ(RunCli("--help").status, 0);
  EXPECT_EQ(RunCli("").status, 2);
  EXPECT_EQ(RunCli("no-such-command").status, 2);
  EXPECT_EQ(RunCli("encode " + FixturePath("photo.pgm")).status, 2);  // no --out
  EXPECT_EQ(RunCli("encode " + FixturePath("photo.pgm") + " --out " + Path("a.jpg") +
                " --quality 0")
                .status,
            2);
  EXPECT_EQ(RunCli("encode " + FixturePath("photo.pgm") + " --out " + Path("a.jpg") +
                " --subsample 422")
                .status,
            2);
}

TEST_F(CliTest, ConstantImageAtQualityHundredIsLossless) {
  Image img(16, 24, 1);
  for (auto& s : img.samples) s = 77;
  WritePnm(Path("flat.pgm"), img);
  const RunResult enc =
      RunCli("encode " + Path("flat.pgm") + " --quality 100 --out " + Path("flat.jpg"));
  ASSERT_EQ(enc.status, 0) << enc.output;
  const RunResult dec = RunCli("decode " + Path("flat.jpg") + " --out " + Path("back.pgm") +
                            " --reference " + Path("flat.pgm"));
  ASSERT_EQ(dec.status, 0) << dec.output;
  EXPECT_NE(dec.output.find("psnr_db inf"), std::string::npos) << dec.output;
}

TEST_F(CliTest, LowerQualityGivesSmallerFile) {
  for (const char* fixture : {"photo.pgm", "photo.ppm"}) {
    ASSERT_EQ(RunCli("encode " + FixturePath(fixture) + " --quality 10 --out " +
                  Path("q10.jpg"))
                  .status,
              0);
    ASSERT_EQ(RunCli("encode " + FixturePath(fixture) + " --quality 90 --out " +
                  Path("q90.jpg"))
                  .status,
              0);
    EXPECT_LT(fs::file_size(Path("q10.jpg")), fs::file_size(Path("q90.jpg"))) << fixture;
  }
}

TEST_F(CliTest, SidecarContainerRoundTrips) {
  ASSERT_EQ(RunCli("encode " + FixturePath("photo.ppm") + " --subsample 420 --out " +
                Path("c.jscf"))
                .status,
            0);
  ASSERT_EQ(RunCli("encode " + FixturePath("photo.ppm") + " --subsample 420 --out " +
                Path("c.jpg"))
                .status,
            0);
  ASSERT_EQ(RunCli("decode " + Path("c.jscf") + " --out " + Path("a.ppm")).status, 0);
  ASSERT_EQ(RunCli("decode " + Path("c.jpg") + " --out " + Path("b.ppm")).status, 0);
  EXPECT_EQ(ReadPnm(Path("a.ppm")).samples, ReadPnm(Path("b.ppm")).samples);
}

TEST_F(CliTest, TruncatedAndMissingFilesExitThree) {
  ASSERT_EQ(RunCli("encode " + FixturePath("photo.ppm") + " --out " + Path("t.jpg")).status, 0);
  const auto full = ReadFileBytes(Path("t.jpg"));
  WriteFileBytes(Path("cut.jpg"),
                 std::vector<uint8_t>(full.begin(), full.begin() + full.size() / 2));
  const RunResult r = RunCli("decode " + Path("cut.jpg") + " --out " + Path("x.ppm"));
  EXPECT_EQ(r.status, 3);
  EXPECT_NE(r.output.find("truncated stream"), std::string::npos) << r.output;
  EXPECT_EQ(RunCli("decode " + Path("missing.jpg") + " --out " + Path("x.ppm")).status, 3);
}

TEST_F(CliTest, VerifyPassesAndFaultInjectionFails) {
  const RunResult ok = RunCli("verify --seed 3");
  EXPECT_EQ(ok.status, 0) << ok.output;
  EXPECT_NE(ok.output.find("xi_equivalence"), std::string::npos);
  const RunResult bad = RunCli("verify --inject-fault");
  EXPECT_EQ(bad.status, 1) << bad.output;
  EXPECT_NE(bad.output.find("FAIL"), std::string::npos) << bad.output;
  EXPECT_NE(bad.output.find("xi_equivalence"), std::string::npos) << bad.output;
}

std::vector<std::string> Lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

TEST_F(CliTest, ReluSweepCsv) {
  const RunResult r = RunCli("relu-sweep --blocks 500 --seed 4 --format csv");
  ASSERT_EQ(r.status, 0) << r.output;
  const auto lines = Lines(r.output);
  ASSERT_EQ(lines.size(), 16u) << r.output;
  EXPECT_EQ(lines[0].rfind("# jpegspace-csv v1 relu-sweep", 0), 0u) << lines[0];
  EXPECT_EQ(lines[1], "m,rmse_asm,rmse_naive");
  EXPECT_EQ(lines[2].rfind("1,", 0), 0u);
  EXPECT_EQ(lines[15].rfind("14,", 0), 0u);
  // Same seed, same bytes.
  EXPECT_EQ(RunCli("relu-sweep --blocks 500 --seed 4 --format csv").output, r.output);
}

TEST_F(CliTest, EntropyWorkedExample) {
  const RunResult r = RunCli("entropy");
  ASSERT_EQ(r.status, 0) << r.output;
  std::map<std::string, std::string> fields;
  for (const std::string& line : Lines(r.output)) {
    std::istringstream in(line);
    std::string key, value;
    in >> key >> value;
    fields[key] = value;
  }
  EXPECT_NEAR(std::stod(fields["entropy_bits"]), 1.74, 0.005);
  EXPECT_NEAR(std::stod(fields["average_length"]), 1.85, 1e-12);
  EXPECT_EQ(fields["code_A"], "0");
  EXPECT_EQ(fields["code_D"].size(), 3u);
  EXPECT_EQ(fields["decoded"], "ABD");
}

TEST_F(CliTest, BenchHasStableShape) {
  const RunResult a = RunCli("bench --reps 1 --sizes 16 --format csv");
  const RunResult b = RunCli("bench --reps 1 --sizes 16 --format csv");
  ASSERT_EQ(a.status, 0) << a.output;
  const auto la = Lines(a.output), lb = Lines(b.output);
  ASSERT_EQ(la.size(), lb.size());
  EXPECT_EQ(la[0].rfind("# jpegspace-csv v1 bench", 0), 0u) << la[0];
  for (size_t i = 1; i < la.size(); ++i) {
    EXPECT_EQ(la[i].substr(0, la[i].find(',')), lb[i].substr(0, lb[i].find(',')));
  }
}

TEST_F(CliTest, MapExportsTensorSidecar) {
  const RunResult r =
      RunCli("map --kind compress --quality 50 --sizes 16 --out " + Path("j.jstn"));
  ASSERT_EQ(r.status, 0) << r.output;
  const auto bytes = ReadFileBytes(Path("j.jstn"));
  ASSERT_GE(bytes.size(), 4u);
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "JSTN");
}

}  // namespace
}  // namespace jpegspace
