#include <gtest/gtest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <string>

#include "emoeeg/pipeline.hpp"
#include "emoeeg/run_config.hpp"
#include "test_util.hpp"

using namespace emoeeg;
namespace fs = std::filesystem;

namespace {

struct RunResult {
  int status;
  std::string output;
};

RunResult run_cli(const std::string& args, const TempDir& dir) {
  const auto log = dir / "cli.log";
  const std::string cmd = std::string(EMOEEG_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
  const int raw = std::system(cmd.c_str());
  return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, read_text(log)};
}

}  // namespace

TEST(RunConfig, SetAndEcho) {
  RunConfig c;
  c.set("dataset", " data.eegb ");
  c.set("folds", "5");
  c.set("bands", "alpha, mu:8:13");
  c.set("classifiers", "svm");
  c.set("schemes", "valence,quadrant");
  c.set("svm_kernel", "linear");
  c.set("jobs", "4");
  EXPECT_EQ(c.dataset, "data.eegb");
  EXPECT_EQ(c.folds, 5u);
  ASSERT_EQ(c.bands.size(), 2u);
  EXPECT_EQ(c.bands[1], (spectral::BandDef{"mu", 8.0, 13.0}));
  EXPECT_EQ(c.schemes[1], LabelScheme::quadrant);
  EXPECT_EQ(c.train.svm_kernel, KernelType::linear);
  const auto text = c.to_text();
  EXPECT_NE(text.find("bands = alpha,mu:8:13\n"), std::string::npos) << text;
  EXPECT_NE(text.find("schemes = valence-binary,quadrant-4\n"), std::string::npos) << text;
  EXPECT_EQ(text.find("jobs"), std::string::npos);
  EXPECT_EQ(text.find("output_dir"), std::string::npos);
}

TEST(RunConfig, EchoRoundTrips) {
  RunConfig a;
  a.set("dataset", "x.csv");
  a.set("seed", "17");
  a.set("mlp_lr", "0.0005");
  a.set("regions", "left,central");
  TempDir dir;
  write_text(dir / "c.txt", a.to_text());
  RunConfig b;
  b.load_file(dir / "c.txt");
  EXPECT_EQ(a.to_text(), b.to_text());
}

TEST(RunConfig, Errors) {
  RunConfig c;
  try {
    c.set("fold", "3");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::invalid_config);
    EXPECT_NE(std::string(e.what()).find("'fold'"), std::string::npos);
  }
  EXPECT_THROW(c.set("folds", "three"), Error);
  EXPECT_THROW(c.set("stratify", "maybe"), Error);
  EXPECT_THROW(c.set("regions", "temporal"), Error);
  EXPECT_THROW(c.set("bands", "mu:13:8"), Error);
  EXPECT_THROW(c.validate(), Error);  // no dataset

  TempDir dir;
  write_text(dir / "bad.txt", "# comment\nfolds = 3\nnot a pair\n");
  try {
    c.load_file(dir / "bad.txt");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find(":3:"), std::string::npos) << e.what();
  }
}

TEST(RunConfig, Defaults) {
  const RunConfig c;
  EXPECT_EQ(c.folds, 10u);
  EXPECT_EQ(c.welch.segment_len, 256u);
  EXPECT_EQ(c.welch.overlap, 128u);
  EXPECT_EQ(c.classifiers.size(), 3u);
  EXPECT_EQ(c.train.knn_k, 5u);
  EXPECT_EQ(c.train.mlp_epochs, 200u);
}

TEST(Cli, SynthIsByteIdentical) {
  TempDir dir;
  const std::string args = "synth --trials 4 --samples 256 --seed 5 --out ";
  ASSERT_EQ(run_cli(args + (dir / "a.eegb").string(), dir).status, 0);
  ASSERT_EQ(run_cli(args + (dir / "b.eegb").string(), dir).status, 0);
  EXPECT_EQ(read_bytes(dir / "a.eegb"), read_bytes(dir / "b.eegb"));
}

TEST(Cli, ValidateReportsGeometryAndTruncation) {
  TempDir dir;
  const auto path = dir / "d.eegb";
  ASSERT_EQ(run_cli("synth --trials 2 --samples 8064 --out " + path.string(), dir).status, 0);
  auto ok = run_cli("validate " + path.string(), dir);
  EXPECT_EQ(ok.status, 0);
  EXPECT_NE(ok.output.find("8064"), std::string::npos) << ok.output;

  fs::resize_file(path, fs::file_size(path) - 100);
  const auto bad = run_cli("validate " + path.string(), dir);
  EXPECT_NE(bad.status, 0);
  EXPECT_NE(bad.output.find("payload length mismatch"), std::string::npos) << bad.output;
}

TEST(Cli, ConvertAndFeatures) {
  TempDir dir;
  ASSERT_EQ(run_cli("synth --trials 4 --samples 512 --out " + (dir / "d.eegb").string(), dir).status, 0);
  ASSERT_EQ(run_cli("convert " + (dir / "d.eegb").string() + " " + (dir / "d.csv").string(), dir).status, 0);
  EXPECT_TRUE(load_dataset(dir / "d.csv", Format::csv) == load_dataset(dir / "d.eegb", Format::eegb));

  const auto r = run_cli("features " + (dir / "d.csv").string() + " --region left --bands alpha --scheme arousal --out " +
                             (dir / "f.csv").string(),
                         dir);
  ASSERT_EQ(r.status, 0) << r.output;
  const auto text = read_text(dir / "f.csv");
  EXPECT_TRUE(text.starts_with("trial,Fp1_alpha,AF3_alpha,F7_alpha,FC5_alpha,T7_alpha,label\n")) << text;
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 5);
}

TEST(Cli, GridWritesReportsAndReplaysFromConfig) {
  TempDir dir;
  const auto data = dir / "d.eegb";
  ASSERT_EQ(run_cli("synth --trials 24 --samples 1024 --seed 2 --out " + data.string(), dir).status, 0);
  const std::string common = " --folds 3 --classifiers knn,svm --set mlp_epochs=3";
  const auto r1 = run_cli("grid --dataset " + data.string() + common + " --out " + (dir / "run1").string(), dir);
  ASSERT_EQ(r1.status, 0) << r1.output;
  for (const char* f : {"report.json", "report.txt", "report.csv", "config.txt"})
    EXPECT_TRUE(fs::exists(dir / "run1" / f)) << f;
  EXPECT_NE(r1.output.find("KNN"), std::string::npos) << r1.output;

  const auto r2 = run_cli("grid --config " + (dir / "run1" / "config.txt").string() + " --out " + (dir / "run2").string(),
                          dir);
  ASSERT_EQ(r2.status, 0) << r2.output;
  EXPECT_EQ(read_text(dir / "run1" / "report.json"), read_text(dir / "run2" / "report.json"));
  EXPECT_EQ(read_text(dir / "run1" / "config.txt"), read_text(dir / "run2" / "config.txt"));
}

TEST(Cli, FlagsOverrideConfigFile) {
  TempDir dir;
  const auto data = dir / "d.eegb";
  ASSERT_EQ(run_cli("synth --trials 12 --samples 512 --out " + data.string(), dir).status, 0);
  write_text(dir / "c.txt", "dataset = " + data.string() + "\nfolds = 4\nclassifiers = knn\nseed = 3\n");
  ASSERT_EQ(run_cli("grid -c " + (dir / "c.txt").string() + " --folds 2 --out " + (dir / "o").string(), dir).status, 0);
  const auto cfg = read_text(dir / "o" / "config.txt");
  EXPECT_NE(cfg.find("folds = 2\n"), std::string::npos) << cfg;
  EXPECT_NE(cfg.find("seed = 3\n"), std::string::npos) << cfg;
  EXPECT_NE(cfg.find("classifiers = knn\n"), std::string::npos) << cfg;
}

TEST(Cli, Failures) {
  TempDir dir;
  EXPECT_NE(run_cli("frobnicate", dir).status, 0);
  EXPECT_NE(run_cli("validate " + (dir / "missing.eegb").string(), dir).status, 0);
  const auto r = run_cli("grid --dataset x.eegb --set nonsense=1", dir);
  EXPECT_NE(r.status, 0);
  EXPECT_NE(r.output.find("nonsense"), std::string::npos) << r.output;
}
