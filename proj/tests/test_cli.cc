#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

const std::string kTool = CTRECT_CLI;
const std::string kFixture = std::string(CTRECT_DATA) + "/noiseless_frame.json";

int run(const std::string& args) { return std::system((kTool + " " + args).c_str()); }

nlohmann::json load(const fs::path& p) {
  std::ifstream in(p);
  return nlohmann::json::parse(in);
}

fs::path work_dir() {
  const fs::path dir = fs::temp_directory_path() / "ctrect_cli_test";
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST(Cli, SolveRecoversFixtureLambda) {
  const fs::path out = work_dir() / "model.json";
  ASSERT_EQ(run("solve " + kFixture + " -o " + out.string()), 0);
  const nlohmann::json model = load(out);
  const double lambda_gt = load(kFixture).at("ground_truth").at("lambda").get<double>();
  EXPECT_EQ(model.at("format_version"), 1);
  EXPECT_NEAR(model.at("best").at("lambda").get<double>(), lambda_gt, 1e-9);
  EXPECT_FALSE(model.at("candidates").empty());
}

TEST(Cli, EvalOfSolvedModelIsZero) {
  const fs::path model = work_dir() / "model_eval.json";
  const fs::path report = work_dir() / "eval.json";
  ASSERT_EQ(run("solve " + kFixture + " -o " + model.string()), 0);
  ASSERT_EQ(run("eval " + model.string() + " " + kFixture + " > " + report.string()), 0);
  const nlohmann::json r = load(report);
  EXPECT_LT(r.at("warp_error_px").get<double>(), 1e-6);
  EXPECT_LT(r.at("transfer_error_px").get<double>(), 1e-6);
  EXPECT_LT(r.at("lambda_error").get<double>(), 1e-9);
}

TEST(Cli, SynthIsDeterministic) {
  const fs::path a = work_dir() / "a.json", b = work_dir() / "b.json";
  ASSERT_EQ(run("synth --seed 17 --frames 1 --lambda -3 -o " + a.string()), 0);
  ASSERT_EQ(run("synth --seed 17 --frames 1 --lambda -3 -o " + b.string()), 0);
  EXPECT_EQ(load(a), load(b));
  EXPECT_EQ(load(a), load(kFixture));
}

TEST(Cli, ErrorsAreReportedAsJson) {
  const fs::path bad = work_dir() / "bad.json";
  std::ofstream(bad) << R"({"format_version": 1, "records": []})";
  const fs::path err = work_dir() / "err.json";
  const int rc = run("--error-json solve " + bad.string() + " 2> " + err.string());
  EXPECT_NE(rc, 0);
  const nlohmann::json e = load(err);
  EXPECT_TRUE(e.contains("error"));
}
