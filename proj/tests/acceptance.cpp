// Acceptance gate: one PASS/FAIL line per criterion, non-zero exit if any
// criterion fails. Tolerances are fixed below.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "moqd/archive.hpp"
#include "moqd/cli.hpp"
#include "moqd/schedulers.hpp"
#include "support.hpp"

using namespace moqd;
using moqd::testing::Vec;

namespace {

constexpr double kOracleSigmas = 3.0;
constexpr std::size_t kOracleFronts = 100;
constexpr std::size_t kOracleSamples = 1000000;
constexpr std::size_t kHviPairs = 10000;
constexpr std::size_t kBisectionCases = 1000;
constexpr double kBisectionEpsilon = 1e-6;
constexpr double kClosedFormTolerance = 1e-3;
constexpr double kGapRelativeTolerance = 1e-4;
constexpr double kStaticDynamicGap = 0.20;
constexpr double kCmaTarget = 1e-8;
constexpr std::size_t kCmaBudget = 10000;
constexpr std::uint64_t kSeeds[] = {1, 2, 3, 4, 5};

struct Verdict {
  bool pass;
  std::string detail;
};

std::string fmt(const char* pattern, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

RunConfig desk(Algorithm algorithm, DomainKind kind, std::uint64_t seed) {
  RunConfig c;
  c.algorithm = algorithm;
  c.domain = DomainSpec::make(kind, 20, 2);
  c.iterations = 1000;
  c.emitters = 2;
  c.batch = 12;
  c.cells = 100;
  c.seed = seed;
  // Static MO-CMA-MAE restarts on cycles, the rest on convergence.
  c.restart = algorithm == Algorithm::mo_cma_mae ? RestartRule::cycle : RestartRule::basic;
  return c;
}

std::string key(const RunConfig& c) {
  std::ostringstream s;
  s << to_string(c.algorithm) << '/' << to_string(c.domain.kind) << '/' << c.domain.objectives() << "obj/a" << c.alpha
    << '/' << (c.size_limit ? "static" : "dynamic") << '/' << to_string(c.restart) << "/N" << c.iterations << "/s"
    << c.seed;
  return s.str();
}

// Runs are shared between criteria.
std::map<std::string, std::vector<IterationMetrics>>& run_cache() {
  static std::map<std::string, std::vector<IterationMetrics>> cache;
  return cache;
}

const std::vector<IterationMetrics>& metrics_of(const RunConfig& c) {
  auto& cache = run_cache();
  const std::string k = key(c);
  auto it = cache.find(k);
  if (it == cache.end()) it = cache.emplace(k, run(c).metrics).first;
  return it->second;
}

double mean_final(std::function<RunConfig(std::uint64_t)> make, double IterationMetrics::*field) {
  double acc = 0.0;
  for (auto seed : kSeeds) acc += metrics_of(make(seed)).back().*field;
  return acc / std::size(kSeeds);
}

std::size_t decreases(const std::vector<IterationMetrics>& m) {
  std::size_t n = 0;
  for (std::size_t i = 1; i < m.size(); ++i)
    if (m[i].moqd_score < m[i - 1].moqd_score) ++n;
  return n;
}

Verdict hypervolume_oracle() {
  std::mt19937_64 rng(1);
  double worst_z = 0.0;
  std::size_t misses = 0;
  for (std::size_t t = 0; t < kOracleFronts; ++t) {
    const std::size_t k = 2 + t % 2;
    const Vec ref(k, 0.0);
    const auto front = moqd::testing::random_front(k, 1 + (t / 2) % 20, rng);
    const auto mc = moqd::testing::monte_carlo_hypervolume(front, ref, kOracleSamples, rng);
    const double diff = std::abs(hypervolume(front, ref) - mc.value);
    const double z = mc.standard_error > 0.0 ? diff / mc.standard_error : (diff == 0.0 ? 0.0 : INFINITY);
    worst_z = std::max(worst_z, z);
    if (z > kOracleSigmas) ++misses;
  }
  return {misses == 0, fmt("%zu fronts, worst deviation %.2f SE, %zu beyond %.0f SE", kOracleFronts, worst_z, misses,
                           kOracleSigmas)};
}

Verdict hvi_contract() {
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<int> kind(0, 3);
  std::uniform_real_distribution<double> shrink(0.5, 1.0);
  std::size_t violations = 0;
  std::size_t positives = 0;
  for (std::size_t t = 0; t < kHviPairs; ++t) {
    const std::size_t k = 2 + t % 2;
    const Vec ref(k, 0.0);
    const auto front = moqd::testing::random_front(k, 1 + t % 20, rng);
    Vec p;
    switch (kind(rng)) {
      case 0: p = front[t % front.size()]; break;
      case 1:
        p = front[t % front.size()];
        for (double& v : p) v *= shrink(rng);
        break;
      default: p = moqd::testing::random_point(k, rng, 0.01, 100.0);
    }
    const double gain = hvi(p, front, ref);
    const bool covered = moqd::testing::oracle_covered(front, p);
    if (gain < 0.0 || (gain > 0.0) == covered) ++violations;
    if (gain > 0.0) ++positives;
  }
  return {violations == 0, fmt("%zu pairs (%zu non-dominated), %zu violations", kHviPairs, positives, violations)};
}

Verdict bisection_contract() {
  std::mt19937_64 rng(3);
  const double alphas[] = {0.05, 0.1, 0.5, 0.9};
  std::size_t violations = 0;
  for (std::size_t t = 0; t < kBisectionCases; ++t) {
    const std::size_t k = 2 + t % 2;
    const Vec ref(k, 0.0);
    const double alpha = alphas[t % 4];
    auto threshold = moqd::testing::random_front(k, 1 + t % 10, rng);
    for (auto& q : threshold)
      for (double& v : q) v *= 0.7;
    Vec f;
    double full = 0.0;
    do {
      f = moqd::testing::random_point(k, rng, 1.0, 100.0);
      full = hvi(f, threshold, ref);
    } while (!(full > 0.0));
    const double d = bisect_discount(f, threshold, alpha, kBisectionEpsilon, ref);
    const double got = hvi(discounted(f, d, ref), threshold, ref);
    if (!(got <= alpha * full && got >= alpha * full - kBisectionEpsilon)) ++violations;
  }
  double worst_closed = 0.0;
  for (double alpha : alphas) {
    const Vec f = moqd::testing::random_point(2, rng, 1.0, 100.0);
    const double d = bisect_discount(f, {}, alpha, kBisectionEpsilon, Vec{0.0, 0.0});
    worst_closed = std::max(worst_closed, std::abs(d - std::sqrt(alpha)));
  }
  return {violations == 0 && worst_closed <= kClosedFormTolerance,
          fmt("%zu cases, %zu outside the window; empty-front |d - sqrt(alpha)| <= %.2e", kBisectionCases, violations,
              worst_closed)};
}

Verdict gap_closure() {
  ArchiveOptions o;
  o.alpha = 0.1;
  o.epsilon = 1e-9;
  CvtArchive archive({{0.0, 0.0}}, Vec{0.0, 0.0}, o);
  const Vec f{10.0, 10.0};
  double worst = 0.0;
  for (int m = 1; m <= 20; ++m) {
    archive.try_insert(Eigen::VectorXd::Zero(1), f, Vec{0.0, 0.0});
    const double gap = hvi(f, archive.cell(0).threshold, archive.reference());
    const double expected = 100.0 * std::pow(0.9, m);
    worst = std::max(worst, std::abs(gap - expected) / expected);
  }
  return {worst <= kGapRelativeTolerance, fmt("worst relative error %.2e over m = 1..20", worst)};
}

Verdict directional() {
  auto cfg = [](Algorithm a) { return [a](std::uint64_t s) { return desk(a, DomainKind::sphere, s); }; };
  const double mae = mean_final(cfg(Algorithm::mo_cma_mae), &IterationMetrics::moqd_score);
  const double mome = mean_final(cfg(Algorithm::mome), &IterationMetrics::moqd_score);
  const double como = mean_final(cfg(Algorithm::emitter_como), &IterationMetrics::moqd_score);
  return {mae > mome && mae > como,
          fmt("mean final MOQD-score: MO-CMA-MAE %.1f, MOME %.1f, Emitter-COMO %.1f", mae, mome, como)};
}

Verdict alpha_ablation() {
  const double low = mean_final([](std::uint64_t s) { return desk(Algorithm::mo_cma_mae, DomainKind::sphere, s); },
                                &IterationMetrics::coverage);
  const double one = mean_final(
      [](std::uint64_t s) {
        RunConfig c = desk(Algorithm::mo_cma_mae, DomainKind::sphere, s);
        c.alpha = 1.0;
        return c;
      },
      &IterationMetrics::coverage);
  return {low > one, fmt("mean final coverage: alpha=0.1 %.3f, alpha=1 %.3f", low, one)};
}

RunConfig dynamic_desk(std::uint64_t s) {
  RunConfig c = desk(Algorithm::mo_cma_mae, DomainKind::sphere, s);
  c.size_limit.reset();
  c.restart = RestartRule::basic;
  return c;
}

Verdict static_vs_dynamic() {
  const double fixed = mean_final([](std::uint64_t s) { return desk(Algorithm::mo_cma_mae, DomainKind::sphere, s); },
                                  &IterationMetrics::moqd_score);
  const double dynamic = mean_final(dynamic_desk, &IterationMetrics::moqd_score);
  const double rel = std::abs(fixed - dynamic) / fixed;
  return {rel < kStaticDynamicGap,
          fmt("static %.1f, dynamic %.1f, difference %.1f%% of static", fixed, dynamic, 100.0 * rel)};
}

Verdict monotonicity(std::vector<std::string>& notes) {
  std::size_t runs = 0;
  std::size_t bad_runs = 0;
  for (auto alg : {Algorithm::mo_cma_mae, Algorithm::mome, Algorithm::emitter_como}) {
    for (auto kind : {DomainKind::sphere, DomainKind::rastrigin, DomainKind::arm}) {
      std::size_t bad = 0;
      std::size_t steps = 0;
      for (auto seed : kSeeds) {
        const std::size_t d = decreases(metrics_of(desk(alg, kind, seed)));
        ++runs;
        if (d > 0) ++bad_runs;
        if (d > 0) ++bad;
        steps += d;
      }
      notes.push_back(fmt("%s on %s: %zu/5 seeds with a decrease, %zu decreasing iterations", to_string(alg).c_str(),
                          to_string(kind).c_str(), bad, steps));
    }
  }
  std::size_t dynamic_steps = 0;
  for (auto seed : kSeeds) dynamic_steps += decreases(metrics_of(dynamic_desk(seed)));
  notes.push_back(fmt("MO-CMA-MAE dynamic on sphere: %zu decreasing iterations", dynamic_steps));
  return {bad_runs == 0, fmt("%zu/%zu runs non-decreasing", runs - bad_runs, runs)};
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Verdict determinism() {
  RunConfig c = desk(Algorithm::mo_cma_mae, DomainKind::sphere, 11);
  c.iterations = 200;
  const auto base = std::filesystem::temp_directory_path() / "moqd_acceptance_determinism";
  std::filesystem::remove_all(base);
  std::ostringstream log;
  const int a = cli::run_and_export(c, base / "a", log);
  const int b = cli::run_and_export(c, base / "b", log);
  const std::string ma = read_file(base / "a" / "metrics.csv");
  const bool same = a == 0 && b == 0 && !ma.empty() && ma == read_file(base / "b" / "metrics.csv");
  std::filesystem::remove_all(base);
  return {same, same ? "metrics.csv byte-identical across two runs" : "metrics.csv differs or a run failed"};
}

Verdict cma_self_test() {
  const std::size_t n = 20;
  const std::size_t lambda = 4 + static_cast<std::size_t>(3.0 * std::log(double(n)));
  CmaEs es(Eigen::VectorXd::Ones(n), 0.5);
  Rng rng(1);
  std::size_t evals = 0;
  double best = INFINITY;
  while (evals < kCmaBudget && best >= kCmaTarget) {
    auto samples = es.ask(lambda, rng);
    std::vector<RankedCandidate> ranked;
    for (auto& s : samples) {
      const double v = s.squaredNorm();
      ++evals;
      best = std::min(best, v);
      ranked.push_back({std::move(s), -v, CandidateStatus::rejected});
    }
    es.tell(std::move(ranked), Selection::mu);
  }
  return {best < kCmaTarget, fmt("best %.3e after %zu evaluations", best, evals)};
}

Verdict three_objective_smoke() {
  RunConfig c = desk(Algorithm::mo_cma_mae, DomainKind::rastrigin, 1);
  c.domain = DomainSpec::make(DomainKind::rastrigin, 20, 3);
  c.iterations = 300;
  const auto& m = metrics_of(c);
  const std::size_t d = decreases(m);
  return {m.back().coverage > 0.0 && d == 0,
          fmt("coverage %.3f, MOQD-score %.1f, %zu decreasing iterations", m.back().coverage, m.back().moqd_score, d)};
}

}  // namespace

int main() {
  std::vector<std::string> notes;
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"hypervolume oracle", hypervolume_oracle},
      {"hvi contract", hvi_contract},
      {"bisection contract", bisection_contract},
      {"geometric gap closure", gap_closure},
      {"desk-scale directional result", directional},
      {"alpha ablation direction", alpha_ablation},
      {"static vs dynamic", static_vs_dynamic},
      {"monotonicity suite", [&] { return monotonicity(notes); }},
      {"determinism", determinism},
      {"cma-es self-test", cma_self_test},
      {"3-objective smoke", three_objective_smoke},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    const Verdict v = check();
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s %s: %s (%.1fs)\n", v.pass ? "PASS" : "FAIL", name.c_str(), v.detail.c_str(), secs);
    for (const auto& note : notes) std::printf("    %s\n", note.c_str());
    notes.clear();
    std::fflush(stdout);
    if (!v.pass) ++failed;
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
