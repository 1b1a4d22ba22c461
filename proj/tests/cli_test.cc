// Copyright 2026 The cacp Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "cacp/image.h"

namespace {

namespace fs = std::filesystem;

const std::string kCli = CACP_CLI_PATH;
const std::string kData = CACP_TEST_DATA_DIR;

int RunCli(const std::string& args) {
  const std::string cmd = kCli + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("cacp_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string Write(const std::string& name, const std::string& text) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << text;
    return p.string();
  }

  fs::path dir_;
};

TEST_F(CliTest, SimulateWritesReport) {
  const std::string out = (dir_ / "report.json").string();
  ASSERT_EQ(RunCli("simulate " + kData + "/occlusion.json --out " + out), 0);
  const std::string text = Slurp(out);
  EXPECT_NE(text.find("\"iou_fused\""), std::string::npos);
  EXPECT_EQ(text.find("wall_time_s"), std::string::npos);
  const std::string again = (dir_ / "again.json").string();
  ASSERT_EQ(RunCli("simulate " + kData + "/occlusion.json --out " + again), 0);
  EXPECT_EQ(Slurp(again), text);
}

TEST_F(CliTest, SweepIsReproducible) {
  const std::string cfg = Write("cfg.json", R"({"random_scenario": {}, "seeds": [0, 1]})");
  const std::string a = (dir_ / "a.csv").string(), b = (dir_ / "b.csv").string();
  ASSERT_EQ(RunCli("sweep " + cfg + " --axis sigma_xy --values 0,1 --out " + a), 0);
  ASSERT_EQ(RunCli("sweep " + cfg + " --axis sigma_xy --values 0,1 --threads 2 --out " + b), 0);
  const std::string csv = Slurp(a);
  EXPECT_EQ(csv, Slurp(b));
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);
}

TEST_F(CliTest, OptimizePrintsPlan) {
  const std::string out = (dir_ / "plan.csv").string();
  ASSERT_EQ(RunCli("optimize " + kData + "/occlusion.json --out " + out), 0);
  EXPECT_EQ(Slurp(out).rfind("helper_id,rho,delay_s,reachable,hops\n1,", 0), 0u);
}

TEST_F(CliTest, AlignAndCodec) {
  cacp::Image img(24, 16, 3, 90.0);
  for (size_t i = 0; i < img.samples().size(); ++i) img.samples()[i] = (i * 37) % 256;
  const std::string src = (dir_ / "src.ppm").string();
  const std::string ref = (dir_ / "ref.ppm").string();
  cacp::WritePnm(src, img);
  cacp::WritePnm(ref, cacp::Image(24, 16, 3, 140.0));
  const std::string out = (dir_ / "out.ppm").string();
  ASSERT_EQ(RunCli("align " + src + " " + ref + " --beta 0.5 --radius 0.2 --out " + out +
                " --dump-spectra " + (dir_ / "spec_").string()),
            0);
  EXPECT_TRUE(cacp::ReadPnm(out).SameShape(img));
  EXPECT_EQ(fs::file_size(dir_ / "spec_src.f64"), 32u * 16u * 3u * 16u);

  const std::string metrics = (dir_ / "codec.csv").string();
  const std::string decoded = (dir_ / "dec.ppm").string();
  const std::string bits = (dir_ / "frame.bin").string();
  ASSERT_EQ(RunCli("codec " + src + " --rho 0.5 --decoded " + decoded + " --bitstream " + bits +
                " --out " + metrics),
            0);
  EXPECT_EQ(Slurp(metrics).rfind("rho,rate_bits,mse,psnr_db,rd_loss\n0.5,", 0), 0u);
  EXPECT_TRUE(cacp::ReadPnm(decoded).SameShape(img));
  EXPECT_GT(fs::file_size(bits), 28u);
}

TEST_F(CliTest, UsageAndConfigErrorsExitTwo) {
  EXPECT_EQ(RunCli(""), 2);
  EXPECT_EQ(RunCli("frobnicate"), 2);
  EXPECT_EQ(RunCli("simulate /no/such/config.json"), 2);
  EXPECT_EQ(RunCli("simulate " + Write("bad.json", R"({"scenario": 3})")), 2);
  EXPECT_EQ(RunCli("simulate " + Write("gamma.json",
                                    R"({"random_scenario": {}, "delay_model": {"gamma": -1}})")),
            2);
  const std::string ok = Write("ok.json", R"({"random_scenario": {}})");
  EXPECT_EQ(RunCli("sweep " + ok + " --axis nope --values 1"), 2);
  EXPECT_EQ(RunCli("sweep " + ok + " --axis beta --values 0.5,x"), 2);
  EXPECT_EQ(RunCli("codec " + ok + " --rho 2"), 2);
}

TEST_F(CliTest, RuntimeErrorsExitThree) {
  // A readable file that is not an image.
  const std::string junk = Write("junk.ppm", "not an image");
  EXPECT_EQ(RunCli("codec " + junk + " --rho 0.5"), 3);
  cacp::WritePnm((dir_ / "a.pgm").string(), cacp::Image(8, 8, 1, 1.0));
  cacp::WritePnm((dir_ / "b.pgm").string(), cacp::Image(16, 8, 1, 1.0));
  EXPECT_EQ(RunCli("align " + (dir_ / "a.pgm").string() + " " + (dir_ / "b.pgm").string() +
                " --out " + (dir_ / "c.pgm").string()),
            3);
}

}  // namespace
