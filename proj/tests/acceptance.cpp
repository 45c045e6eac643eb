// Copyright 2026 The FairSkin Desk Authors.
// SPDX-License-Identifier: Apache-2.0

// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero if any fails. Criteria 7, 8 and 10 train 15 pipelines on the
// default profile; set FAIRSKIN_ACCEPTANCE_OUT to keep the run directories.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "fairskin/classifier/model.hpp"
#include "fairskin/data/decoder.hpp"
#include "fairskin/diffusion/objective.hpp"
#include "fairskin/harness/compare.hpp"
#include "fairskin/harness/pipeline.hpp"
#include "fairskin/numerics/grad_check.hpp"
#include "fairskin/resampling/sampler.hpp"

namespace fairskin {
namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

int failures = 0;

void Report(int number, const std::string& name, const std::function<Outcome()>& check) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = check();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("%s criterion %d (%s): %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", number, name.c_str(), o.detail.c_str(),
              secs);
  std::fflush(stdout);
  if (!o.pass) ++failures;
}

std::string Fmt(const char* fmt, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, fmt, a);
  return buf;
}

Matrix Gaussian(Eigen::Index rows, Eigen::Index cols, Rng& rng, double scale = 1.0) {
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = scale * rng.Normal();
  return m;
}

std::vector<int> Ints(std::size_t n, int lo, int hi, Rng& rng) {
  std::vector<int> v(n);
  for (int& x : v) x = lo + static_cast<int>(rng.Below(static_cast<std::uint64_t>(hi - lo + 1)));
  return v;
}

std::string ReadFile(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome FidVarianceArithmetic() {
  const double a = FidVariance(std::vector<double>{80.96, 87.01, 126.22});
  const double b = FidVariance(std::vector<double>{80.86, 88.95, 116.34});
  return {std::abs(a - 603.74) <= 0.01 && std::abs(b - 345.74) <= 0.01, Fmt("%.4f", a) + ", " + Fmt("%.4f", b)};
}

/// Worst gradient error of one objective on a random small denoiser.
double DenoiserGradError(std::uint64_t seed, bool dm_term, bool r_term) {
  Rng rng(seed);
  DenoiserConfig net;
  net.image_dim = 16;
  net.time_dim = 4;
  net.class_dim = 3;
  net.hidden = 8;
  DenoiserModel m = DenoiserModel::Initialize(net, rng.Split("init"));
  m.theta += 0.1 * Gaussian(m.theta.size(), 1, rng).col(0);
  const NoiseSchedule s = MakeSchedule(ScheduleKind::kScaledLinear, 100);
  m.precond = GaussianPreconditioner::Fit(AlphaBarTable(s), Gaussian(40, 16, rng, 0.5));
  const Matrix x0 = Gaussian(4, 16, rng, 0.5);
  const NoiseDraw draw = DrawNoise(4, 16, s.steps(), rng);
  const Matrix x_t = NoisedBatch(s, x0, draw);
  const auto y = Ints(4, 0, kNumClasses - 1, rng);
  auto value = [&](const DenoiserModel& model, bool grad) {
    ObjectiveOptions both;
    both.gamma = 1.0;
    both.with_gradient = grad;
    ObjectiveOptions plain = both;
    plain.gamma = 0.0;
    const LossValue full = EvaluateLosses(model, x_t, draw.t, y, &draw.eps, {}, both);
    const LossValue dm = EvaluateLosses(model, x_t, draw.t, y, &draw.eps, {}, plain);
    // L_r alone is the difference of the gamma = 1 and gamma = 0 objectives.
    if (dm_term && !r_term) return dm;
    if (!dm_term) {
      LossValue r = full;
      r.total = full.loss_r;
      if (grad) r.grad = full.grad - dm.grad;
      return r;
    }
    return full;
  };
  const LossValue v = value(m, true);
  const auto f = [&](std::span<const double> p) {
    DenoiserModel probe = m;
    probe.theta = Eigen::Map<const Vector>(p.data(), static_cast<Eigen::Index>(p.size()));
    return value(probe, false).total;
  };
  const auto idx = SampleIndices(static_cast<std::size_t>(m.theta.size()), 120, rng);
  return GradCheck(f, std::span<const double>(m.theta.data(), m.theta.size()),
                   std::span<const double>(v.grad.data(), v.grad.size()), idx);
}

double ClassifierGradError(std::uint64_t seed) {
  Rng rng(seed);
  ClassifierModel m = ClassifierModel::Initialize(ClassifierConfig{16, 10, 8, kNumDiseases}, rng.Split("init"));
  m.theta += 0.1 * Gaussian(m.theta.size(), 1, rng).col(0);
  const Matrix x = Gaussian(8, 16, rng);
  const auto labels = Ints(8, 0, kNumDiseases - 1, rng);
  std::vector<double> w(8);
  for (double& v : w) v = rng.Uniform(0.2, 3.0);
  const CrossEntropyValue v = WeightedCrossEntropy(m, x, labels, w);
  const auto f = [&](std::span<const double> p) {
    ClassifierModel probe = m;
    probe.theta = Eigen::Map<const Vector>(p.data(), static_cast<Eigen::Index>(p.size()));
    return WeightedCrossEntropy(probe, x, labels, w).loss;
  };
  const auto idx = SampleIndices(static_cast<std::size_t>(m.theta.size()), 120, rng);
  return GradCheck(f, std::span<const double>(m.theta.data(), m.theta.size()),
                   std::span<const double>(v.grad.data(), v.grad.size()), idx);
}

Outcome GradientCorrectness() {
  double dm = 0, r = 0, ce = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    dm = std::max(dm, DenoiserGradError(seed, true, false));
    r = std::max(r, DenoiserGradError(100 + seed, false, true));
    ce = std::max(ce, ClassifierGradError(200 + seed));
  }
  return {dm < 1e-4 && r < 1e-4 && ce < 1e-4, "max rel err L_DM " + Fmt("%.2e", dm) + ", L_r " + Fmt("%.2e", r) +
                                                   ", CE " + Fmt("%.2e", ce) + " (5 instances x 120 params each)"};
}

Outcome ForwardMoments() {
  // x0 ~ N(1, 1) per pixel. The mean tolerance is 2% of the predicted standard
  // deviation; the variance tolerance is 2% of the predicted variance.
  const NoiseSchedule s = MakeSchedule(ScheduleKind::kScaledLinear, 100);
  const int n = 100000, dim = 4;
  Rng rng(2024);
  const Matrix x0 = (Gaussian(n, dim, rng).array() + 1.0).matrix();
  const Matrix eps = Gaussian(n, dim, rng);
  double worst_mean = 0, worst_var = 0;
  for (int t = 1; t <= s.steps(); ++t) {
    const double ab = s.alpha_bar(t);
    const double mean = std::sqrt(ab), var = (1.0 - ab) + ab;
    for (int j = 0; j < dim; ++j) {
      double m1 = 0, m2 = 0;
      for (int i = 0; i < n; ++i) {
        const double x = ForwardNoise(s, Vector::Constant(1, x0(i, j)), t, Vector::Constant(1, eps(i, j)))(0);
        m1 += x;
        m2 += x * x;
      }
      m1 /= n;
      const double v = m2 / n - m1 * m1;
      worst_mean = std::max(worst_mean, std::abs(m1 - mean) / std::sqrt(var));
      worst_var = std::max(worst_var, std::abs(v - var) / var);
    }
  }
  return {worst_mean < 0.02 && worst_var < 0.02,
          "worst mean dev " + Fmt("%.4f", worst_mean) + " sd, worst var dev " + Fmt("%.4f", worst_var) + " (T=100, 1e5 draws)"};
}

Outcome SamplerFidelity() {
  const ClassCountTable t = DefaultCountProfile();
  std::vector<Sample> corpus;
  for (int y = 0; y < kNumClasses; ++y)
    for (int i = 0; i < t.at(y); ++i) corpus.push_back(Sample{Image(1, 1), RaceOfClass(y), DiseaseOfClass(y), Origin::kReal});
  double worst = 0;
  std::string detail;
  for (auto scheme : {WeightScheme::kUniform, WeightScheme::kCbrs, WeightScheme::kSqrs}) {
    const ClassWeights w = ClassWeights::FromCounts(t, scheme);
    WeightedSampler sampler(corpus, w, Rng(99).Split(SchemeName(scheme)));
    std::array<double, kNumClasses> target{}, hits{};
    for (std::size_t i = 0; i < corpus.size(); ++i) target[static_cast<std::size_t>(corpus[i].label())] += sampler.Probability(i);
    const int draws = 1000000;
    for (int i = 0; i < draws; ++i) hits[static_cast<std::size_t>(corpus[sampler.Next()].label())] += 1.0 / draws;
    double l1 = 0, l1_equal = 0;
    for (int y = 0; y < kNumClasses; ++y) {
      l1 += std::abs(hits[y] - target[y]);
      l1_equal += std::abs(hits[y] - 1.0 / kNumClasses);
    }
    worst = std::max(worst, l1);
    detail += std::string(SchemeName(scheme)) + " L1 " + Fmt("%.4f", l1) + "; ";
    if (scheme == WeightScheme::kCbrs) {
      worst = std::max(worst, l1_equal);
      detail += "cbrs vs equal " + Fmt("%.4f", l1_equal) + "; ";
    }
  }
  return {worst < 0.01, detail};
}

Outcome MetricIdentities() {
  Rng rng(5);
  const Matrix f = Gaussian(500, 8, rng);
  const double self = FidBetween(f, f);
  Vector shift(2);
  shift << 3, 4;
  const double mean_shift = FrechetDistance(Vector::Zero(2), Matrix::Identity(2, 2), shift, Matrix::Identity(2, 2));
  const std::vector<int> pred = {0, 1, 2, 3, 4, 0, 1, 2, 3, 4, 0, 1, 2, 3, 4};
  const std::vector<int> race = {0, 0, 0, 0, 0, 1, 1, 1, 1, 1, 2, 2, 2, 2, 2};
  const double dp = DemographicParity(pred, race);
  const double is_uniform = InceptionStyleScore(Matrix::Constant(100, 5, 0.2)).mean;
  Matrix hot = Matrix::Zero(100, 5);
  for (int i = 0; i < 100; ++i) hot(i, i % 5) = 1.0;
  const double is_hot = InceptionStyleScore(hot).mean;
  const double essp = Essp(83.25, 0.0);
  const bool ok = self <= 1e-6 && std::abs(mean_shift - 25.0) <= 1e-8 && dp == 0.0 && std::abs(is_uniform - 1.0) < 1e-12 &&
                  std::abs(is_hot - 5.0) < 1e-12 && essp == 83.25;
  return {ok, "FID(P,P) " + Fmt("%.2e", self) + ", shift " + Fmt("%.10f", mean_shift) + ", DP " + Fmt("%g", dp) +
                  ", IS " + Fmt("%.6f", is_uniform) + "/" + Fmt("%.6f", is_hot) + ", ESSP " + Fmt("%g", essp)};
}

Outcome ClassDiversityExactness() {
  Matrix pair(2, 4);
  pair << 0, 0, 0, 0, 1, 1, 1, 1;
  const double hand = ClassDiversityTerm(pair, 0, 10);

  Rng rng(6);
  DenoiserConfig net;
  net.hidden = 16;
  const DenoiserModel m = DenoiserModel::Initialize(net, rng.Split("init"));
  const Matrix x = Gaussian(3, net.image_dim, rng);
  const std::vector<int> t = {7, 42, 90}, y = {0, 8, 14};
  const double fast = LossCbdm(m, x, t, y).loss_r;
  double naive = 0;
  for (Eigen::Index b = 0; b < x.rows(); ++b) {
    const Matrix xb = x.row(b);
    const std::vector<int> tb = {t[static_cast<std::size_t>(b)]};
    const Matrix own = PredictNoise(m, xb, tb, std::vector<int>{y[static_cast<std::size_t>(b)]});
    double acc = 0;
    for (int k = 0; k < kNumClasses; ++k) {
      const Matrix other = PredictNoise(m, xb, tb, std::vector<int>{k});
      double sq = 0;
      for (Eigen::Index j = 0; j < x.cols(); ++j) sq += (own(0, j) - other(0, j)) * (own(0, j) - other(0, j));
      acc += sq;
    }
    naive += static_cast<double>(tb[0]) / kNumClasses * acc;
  }
  naive *= 1.0 / static_cast<double>(x.rows());

  const Matrix outs = Gaussian(kNumClasses, 16, rng);
  const bool doubles = ClassDiversityTerm(outs, 3, 40) == 2.0 * ClassDiversityTerm(outs, 3, 20);
  return {hand == 20.0 && fast == naive && doubles,
          "hand " + Fmt("%.17g", hand) + ", |Y|=15 " + Fmt("%.17g", fast) + " vs naive " + Fmt("%.17g", naive) +
              (doubles ? ", L_r(2t) = 2 L_r(t)" : ", doubling broken")};
}

/// Shared pipeline runs for criteria 7, 8 and 10.
struct Runs {
  std::filesystem::path root;
  std::vector<RunRecord> vanilla, fairskin, none;
};

ExperimentConfig AcceptanceConfig(Method m, std::uint64_t seed, const std::filesystem::path& root) {
  ExperimentConfig c;
  c.method = m;
  c.seed = seed;
  c.dm_steps = 5000;
  c.aug_total = 1500;
  c.export_samples = false;
  c.out = root.string();
  return c;
}

Runs& AcceptanceRuns() {
  static Runs runs = [] {
    Runs r;
    const char* keep = std::getenv("FAIRSKIN_ACCEPTANCE_OUT");
    r.root = keep != nullptr && *keep != '\0' ? std::filesystem::path(keep)
                                              : std::filesystem::temp_directory_path() / "fairskin-acceptance";
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      r.none.push_back(RunExperiment(AcceptanceConfig(Method::kNone, seed, r.root)));
      r.vanilla.push_back(RunExperiment(AcceptanceConfig(Method::kVanilla, seed, r.root)));
      r.fairskin.push_back(RunExperiment(AcceptanceConfig(Method::kFairSkinC, seed, r.root)));
      const auto& v = r.vanilla.back().report;
      const auto& f = r.fairskin.back().report;
      std::printf("  seed %llu: vanilla fid_var %.3f dp %.3f essp %.3f acc %.2f | fairskin-c fid_var %.3f dp %.3f essp %.3f acc %.2f | none dp %.3f\n",
                  static_cast<unsigned long long>(seed), v.fid_variance.value_or(NAN), v.dp, v.essp, v.acc_overall,
                  f.fid_variance.value_or(NAN), f.dp, f.essp, f.acc_overall, r.none.back().report.dp);
      std::fflush(stdout);
    }
    return r;
  }();
  return runs;
}

double MedianOf(const std::vector<RunRecord>& runs, const std::function<double(const MetricsReport&)>& get) {
  std::vector<double> v;
  for (const auto& r : runs) v.push_back(get(r.report));
  return *Median(v);
}

Outcome DirectionalOrdering() {
  const Runs& r = AcceptanceRuns();
  auto fv = [](const MetricsReport& m) { return m.fid_variance.value_or(NAN); };
  auto dp = [](const MetricsReport& m) { return m.dp; };
  auto essp = [](const MetricsReport& m) { return m.essp; };
  auto acc = [](const MetricsReport& m) { return m.acc_overall; };
  const double fv_v = MedianOf(r.vanilla, fv), fv_f = MedianOf(r.fairskin, fv);
  const double dp_v = MedianOf(r.vanilla, dp), dp_f = MedianOf(r.fairskin, dp);
  const double es_v = MedianOf(r.vanilla, essp), es_f = MedianOf(r.fairskin, essp);
  const double ac_v = MedianOf(r.vanilla, acc), ac_f = MedianOf(r.fairskin, acc);
  const bool fv_ok = fv_f < fv_v, dp_ok = dp_f < dp_v, es_ok = es_f > es_v, ac_ok = std::abs(ac_f - ac_v) <= 3.0;
  auto mark = [](bool ok) { return ok ? "" : " (x)"; };
  return {fv_ok && dp_ok && es_ok && ac_ok,
          "medians vanilla -> fairskin-c: fid_variance " + Fmt("%.3f", fv_v) + " -> " + Fmt("%.3f", fv_f) + mark(fv_ok) +
              ", dp " + Fmt("%.3f", dp_v) + " -> " + Fmt("%.3f", dp_f) + mark(dp_ok) + ", essp " + Fmt("%.3f", es_v) +
              " -> " + Fmt("%.3f", es_f) + mark(es_ok) + ", acc " + Fmt("%.2f", ac_v) + " -> " + Fmt("%.2f", ac_f) +
              mark(ac_ok)};
}

Outcome NoAugmentationWorstFairness() {
  const Runs& r = AcceptanceRuns();
  int wins = 0;
  std::string detail;
  for (std::size_t i = 0; i < r.none.size(); ++i) {
    const bool w = r.none[i].report.dp >= r.fairskin[i].report.dp;
    wins += w ? 1 : 0;
    detail += Fmt("%.2f", r.none[i].report.dp) + (w ? ">=" : "<") + Fmt("%.2f", r.fairskin[i].report.dp) + " ";
  }
  return {wins >= 4, std::to_string(wins) + "/5 seeds (none dp vs fairskin-c dp: " + detail + ")"};
}

Outcome Determinism() {
  const auto root = std::filesystem::temp_directory_path() / "fairskin-acceptance-determinism";
  std::filesystem::remove_all(root);
  ExperimentConfig c = AcceptanceConfig(Method::kFairSkinC, 11, root / "a");
  c.dm_steps = 300;
  const RunRecord a = RunExperiment(c);
  c.out = (root / "b").string();
  const RunRecord b = RunExperiment(c);
  const std::string ja = ReadFile(a.directory / "report.json"), jb = ReadFile(b.directory / "report.json");
  std::filesystem::remove_all(root);
  return {!ja.empty() && ja == jb, "fairskin-c rerun, report.json " + std::to_string(ja.size()) + " bytes, " +
                                       (ja == jb ? "identical" : "different")};
}

double DecoderAgreement(const std::filesystem::path& ckpt, int height, int width) {
  const LoadedDenoiser dm = LoadDenoiser(ckpt);
  const OracleDecoder decoder(height, width);
  int agree = 0, total = 0;
  for (int y = 0; y < kNumClasses; ++y) {
    const auto samples =
        SampleAsSamples(dm.model, dm.schedule, y, 100, Rng(4242).Split("agreement/" + std::to_string(y)), height, width);
    for (const auto& s : samples) agree += decoder.DecodeLabel(s.image) == y ? 1 : 0;
    total += static_cast<int>(samples.size());
  }
  return static_cast<double>(agree) / total;
}

Outcome GeneratorConditionality() {
  const Runs& r = AcceptanceRuns();
  const RunRecord& f = r.fairskin.front();
  const double fs = DecoderAgreement(f.directory / "dm.ckpt", f.config.height, f.config.width);
  const RunRecord& v = r.vanilla.front();
  const double va = DecoderAgreement(v.directory / "dm.ckpt", v.config.height, v.config.width);
  return {fs >= 0.6, "fairskin-c seed 1 agreement " + Fmt("%.3f", fs) + " (vanilla " + Fmt("%.3f", va) +
                         "), 100 samples per class"};
}

}  // namespace
}  // namespace fairskin

int main() {
  using namespace fairskin;
  Report(1, "fid variance arithmetic", FidVarianceArithmetic);
  Report(2, "gradient correctness", GradientCorrectness);
  Report(3, "forward-process moments", ForwardMoments);
  Report(4, "sampler fidelity", SamplerFidelity);
  Report(5, "metric identities", MetricIdentities);
  Report(6, "L_r exactness", ClassDiversityExactness);
  Report(7, "directional ordering vanilla vs fairskin-c", DirectionalOrdering);
  Report(8, "no augmentation is least fair", NoAugmentationWorstFairness);
  Report(9, "determinism", Determinism);
  Report(10, "generator conditionality", GeneratorConditionality);
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
