// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.
// Comparison against published tables is informational only.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "emoeeg/emoeeg.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace emoeeg;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(bool pass, const std::string& name, const std::string& detail) {
  std::printf("%s  %-22s %s\n", pass ? "PASS" : "FAIL", name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

void info(const std::string& name, const std::string& detail) {
  std::printf("INFO  %-22s %s\n", name.c_str(), detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string(EMOEEG_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
  const int raw = std::system(cmd.c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

void spectral_oracle() {
  const auto t0 = Clock::now();
  const auto w = spectral::hann_window(256);
  double worst = 0.0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto x = oracle::white_noise(256, 1.0, 1000 + s);
    const auto got = spectral::periodogram(x, w, 128.0);
    worst = std::max(worst, oracle::max_relative_error(got.power, oracle::naive_periodogram(x, w, 128.0)));
  }
  const double secs = seconds_since(t0);
  report(worst < 1e-9 && secs < 5.0, "spectral-oracle",
         "max rel err " + fmt("%.3e", worst) + " (< 1e-9), " + fmt("%.2f", secs) + " s (< 5 s)");
}

void parseval() {
  const auto x = oracle::white_noise(8064, 1.0, 8064);
  const double total = spectral::welch_psd(x, spectral::WelchParams{}).total_power();
  report(total >= 0.95 && total <= 1.05, "parseval", "sum P*df = " + fmt("%.4f", total) + " in [0.95, 1.05]");
}

void sine_concentration() {
  const auto x = oracle::sine(8064, std::sqrt(2.0), 10.0, 128.0);
  const auto psd = spectral::welch_psd(x, spectral::WelchParams{});
  const double total = psd.total_power();
  const double alpha = spectral::band_power(psd, spectral::band_by_name("alpha"));
  double parts = spectral::band_power(psd, {"below-theta", 0.0, 4.0}) + psd.power.back() * psd.df();
  for (const auto& b : spectral::canonical_bands()) parts += spectral::band_power(psd, b);
  const double residual = std::abs(parts - total);
  report(alpha / total >= 0.95 && residual <= 1e-12, "sine-concentration",
         "alpha/total " + fmt("%.4f", alpha / total) + " (>= 0.95), partition residual " + fmt("%.1e", residual) +
             " (<= 1e-12)");
}

void knn_oracle() {
  SplitMix64 rng(510);
  std::size_t mismatches = 0, queries = 0;
  for (int inst = 0; inst < 50; ++inst) {
    const std::size_t n = 1 + rng.below(1000);
    const std::size_t d = 1 + rng.below(8);
    const bool integer = inst % 2 == 1;  // integer grids force distance ties
    Matrix train(n, d), q(20, d);
    std::vector<int> y;
    for (double& v : train.data()) v = integer ? double(rng.below(4)) : rng.gaussian();
    for (double& v : q.data()) v = integer ? double(rng.below(4)) : rng.gaussian();
    for (std::size_t i = 0; i < n; ++i) y.push_back(static_cast<int>(rng.below(4)));
    const std::size_t k = 1 + rng.below(std::min<std::size_t>(n, 15));
    const auto got = knn_predict(knn_fit(train, y, k), q);
    const auto ref = oracle::brute_force_knn(train, y, k, q);
    for (std::size_t i = 0; i < got.size(); ++i) mismatches += got[i] != ref[i];
    queries += got.size();
  }
  report(mismatches == 0, "knn-oracle",
         std::to_string(mismatches) + " mismatches over 50 instances / " + std::to_string(queries) + " queries");
}

void svm_fixtures() {
  struct Fixture {
    std::string name;
    Matrix x;
    std::vector<int> y;
    TrainConfig cfg;
  };
  std::vector<Fixture> fixtures;
  {
    SplitMix64 rng(511);
    Fixture f{"blobs", Matrix(60, 2), {}, {}};
    for (std::size_t i = 0; i < 60; ++i) {
      const int s = i % 2 ? 1 : -1;
      f.x(i, 0) = 2.0 * s + 0.5 * rng.gaussian();
      f.x(i, 1) = 2.0 * s + 0.5 * rng.gaussian();
      f.y.push_back(s);
    }
    fixtures.push_back(f);
    f.name = "blobs-linear";
    f.cfg.svm_kernel = KernelType::linear;
    fixtures.push_back(f);
  }
  {
    Fixture f{"rbf-xor", Matrix(4, 2, {0, 0, 1, 1, 0, 1, 1, 0}), {-1, -1, 1, 1}, {}};
    f.cfg.svm_gamma = 1.0;
    f.cfg.svm_c = 10.0;
    fixtures.push_back(f);
  }
  bool ok = true;
  std::string detail;
  for (const auto& f : fixtures) {
    const auto m = svm_train(f.x, f.y, f.cfg);
    double sum = 0.0;
    bool box = true;
    for (std::size_t i = 0; i < m.alpha.size(); ++i) {
      box = box && m.alpha[i] >= 0.0 && m.alpha[i] <= m.c;
      sum += m.alpha[i] * m.sv_labels[i];
    }
    const auto pred = svm_predict(m, f.x);
    std::size_t hit = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) hit += pred[i] == f.y[i];
    const double acc = 100.0 * hit / pred.size();
    ok = ok && box && std::abs(sum) <= 1e-8 && acc == 100.0;
    detail += f.name + ": |sum a*y| " + fmt("%.1e", std::abs(sum)) + (box ? " box ok" : " box VIOLATED") + " acc " +
              fmt("%.0f%%", acc) + "; ";
  }
  report(ok, "svm-feasibility", detail);
}

void mlp_gradient() {
  SplitMix64 rng(512);
  double worst = 0.0;
  for (int point = 0; point < 20; ++point) {
    const std::size_t d = 1 + rng.below(6), classes = 2 + rng.below(3), hidden = 1 + rng.below(12);
    Matrix x(6, d);
    std::vector<int> y;
    for (double& v : x.data()) v = rng.gaussian();
    for (std::size_t i = 0; i < 6; ++i) y.push_back(static_cast<int>(i % classes));
    TrainConfig cfg;
    cfg.seed = 100 + point;
    cfg.mlp_hidden = hidden;
    MlpModel m = mlp_init(d, classes, cfg);
    for (double& p : m.params) p += 0.1 * rng.gaussian();
    const auto analytic = mlp_loss_gradient(m, x, y).gradient;
    const auto numeric = oracle::central_difference(
        [&](const std::vector<double>& p) {
          MlpModel probe = m;
          probe.params = p;
          return mlp_loss(probe, x, y);
        },
        m.params, 1e-5);
    for (std::size_t i = 0; i < analytic.size(); ++i) {
      const double denom = std::max({std::abs(analytic[i]), std::abs(numeric[i]), 1e-6});
      worst = std::max(worst, std::abs(analytic[i] - numeric[i]) / denom);
    }
  }
  report(worst < 1e-4, "mlp-gradient", "max rel err " + fmt("%.3e", worst) + " over 20 points (< 1e-4)");
}

void end_to_end_and_determinism(const TempDir& dir) {
  const auto data = dir / "synthetic.eegb";
  if (run_cli("synth --trials 160 --seed 7 --out " + data.string(), dir / "synth.log") != 0) {
    report(false, "end-to-end", "synth failed: " + read_text(dir / "synth.log"));
    report(false, "determinism", "not run");
    return;
  }
  const auto t0 = Clock::now();
  const int rc1 = run_cli("grid --dataset " + data.string() + " --out " + (dir / "run1").string(), dir / "run1.log");
  const double secs = seconds_since(t0);
  if (rc1 != 0) {
    report(false, "end-to-end", "grid failed: " + read_text(dir / "run1.log"));
    report(false, "determinism", "not run");
    return;
  }
  const auto doc = nlohmann::json::parse(read_text(dir / "run1" / "report.json"));
  bool ok = secs < 60.0;
  std::string detail;
  for (const auto& rep : doc.at("reports")) {
    for (const auto& [clf, summary] : rep.at("summary").items()) {
      const double best = summary.at("top_regions").at(0).at("score").get<double>();
      ok = ok && best >= 95.0;
      detail += rep.at("scheme").get<std::string>() + "/" + clf + " " + fmt("%.2f", best) + "; ";
    }
  }
  report(ok, "end-to-end", "best cells " + detail + fmt("%.1f", secs) + " s (< 60 s)");

  const int rc2 = run_cli("grid --dataset " + data.string() + " --out " + (dir / "run2").string(), dir / "run2.log");
  const bool same = rc2 == 0 && read_bytes(dir / "run1" / "report.json") == read_bytes(dir / "run2" / "report.json");
  report(same, "determinism", same ? "report.json byte-identical across two runs" : "report.json differs");
}

void leakage_guard() {
  SynthSpec s;
  s.n_trials = 40;
  s.n_samples = 1024;
  s.seed = 515;
  const auto ds = synth_dataset(s);
  const auto fm = build_features(ds, region_by_name("central").channels,
                                 std::vector<spectral::BandDef>{spectral::band_by_name("beta")}, {});
  const auto labels = make_labels(ds.ratings(), LabelScheme::arousal_binary);
  const auto plan = kfold_split(40, 10, labels.labels, 0, true);
  std::size_t checked = 0, differing = 0;
  for (auto kind : {ClassifierKind::knn, ClassifierKind::svm, ClassifierKind::mlp}) {
    ClassifierSpec spec{kind, {}};
    for (std::size_t f = 0; f < plan.k(); ++f) {
      Matrix perturbed = fm.values;
      std::vector<int> y = labels.labels;
      for (std::size_t i : plan.folds[f]) {
        for (std::size_t c = 0; c < perturbed.cols(); ++c) perturbed(i, c) = -1e6 * (c + 1);
        y[i] = 1 - y[i];
      }
      const auto a = train_fold(fm.values, labels.labels, spec, plan.train_indices(f));
      const auto b = train_fold(perturbed, y, spec, plan.train_indices(f));
      ++checked;
      differing += !(a.model == b.model && a.standardizer == b.standardizer);
    }
  }
  report(differing == 0, "leakage-guard",
         std::to_string(differing) + " of " + std::to_string(checked) + " fold models changed");
}

void published_comparison(const TempDir& dir) {
  const std::string tables = std::string(EMOEEG_DATA_DIR) + "/published_tables.json";
  const auto synth = dir / "synthetic.eegb";
  const auto out = dir / "compare-synth";
  if (run_cli("grid --dataset " + synth.string() + " --classifiers knn --compare " + tables + " --out " +
                  out.string(),
              dir / "compare.log") == 0 &&
      fs::exists(out / "compare.txt")) {
    info("published-comparison", "compare mode ran on synthetic data; deltas in compare.txt (no tolerance)");
  } else {
    info("published-comparison", "compare mode did not run: " + read_text(dir / "compare.log"));
  }
  const char* deap = std::getenv("EMOEEG_DEAP_PATH");
  if (!deap || !*deap) {
    info("published-comparison", "EMOEEG_DEAP_PATH not set; DEAP grid skipped");
    return;
  }
  const auto deap_out = dir / "compare-deap";
  if (run_cli(std::string("grid --dataset ") + deap + " --trim-baseline 384 --compare " + tables + " --out " +
                  deap_out.string(),
              dir / "deap.log") == 0) {
    std::printf("%s", read_text(deap_out / "compare.txt").c_str());
    info("published-comparison", "DEAP deltas printed above (no tolerance)");
  } else {
    info("published-comparison", "DEAP grid failed: " + read_text(dir / "deap.log"));
  }
}

}  // namespace

int main() {
  TempDir dir;
  const auto guarded = [](const char* name, auto&& fn) {
    try {
      fn();
    } catch (const std::exception& e) {
      report(false, name, std::string("threw: ") + e.what());
    }
  };
  guarded("spectral-oracle", spectral_oracle);
  guarded("parseval", parseval);
  guarded("sine-concentration", sine_concentration);
  guarded("knn-oracle", knn_oracle);
  guarded("svm-feasibility", svm_fixtures);
  guarded("mlp-gradient", mlp_gradient);
  guarded("end-to-end", [&] { end_to_end_and_determinism(dir); });
  guarded("leakage-guard", leakage_guard);
  guarded("published-comparison", [&] { published_comparison(dir); });
  std::printf("%d failure(s)\n", failures);
  return failures == 0 ? 0 : 1;
}
