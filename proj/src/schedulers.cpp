#include "moqd/schedulers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "moqd/errors.hpp"
#include "moqd/kernels.hpp"
#include "moqd/pareto.hpp"

namespace moqd {
namespace {

constexpr std::uint64_t kCvtStream = 0;

ObjectiveVector zero_reference(const RunConfig& config) {
  return ObjectiveVector(config.domain.objectives(), 0.0);
}

std::vector<MeasureVector> make_centroids(const RunConfig& config) {
  Rng rng = make_rng(config.seed, kCvtStream);
  return tessellate_cvt(config.domain.measure_bounds(), config.cells, config.cvt_samples, rng);
}

struct Emitter {
  CmaEs es;
  Rng rng;
};

std::vector<Emitter> make_emitters(const RunConfig& config) {
  std::vector<Emitter> emitters;
  emitters.reserve(config.emitters);
  for (std::size_t i = 0; i < config.emitters; ++i) {
    emitters.push_back({CmaEs(config.initial_solution(), config.sigma0), make_rng(config.seed, 1 + i)});
  }
  return emitters;
}

class MetricsRecorder {
 public:
  explicit MetricsRecorder(const RunConfig& config) { metrics_.reserve(config.iterations); }

  void add_evaluations(std::uint64_t n) { evaluations_ += n; }
  void add_failure() { ++failures_; }
  void add_restart() { ++restarts_; }

  void record(std::size_t iteration, const CvtArchive& archive) {
    metrics_.push_back({iteration, evaluations_, archive.moqd_score(), archive.coverage(), restarts_, failures_});
  }

  std::vector<IterationMetrics> take() { return std::move(metrics_); }

 private:
  std::vector<IterationMetrics> metrics_;
  std::uint64_t evaluations_ = 0;
  std::uint64_t restarts_ = 0;
  std::uint64_t failures_ = 0;
};

}  // namespace

std::string to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::mo_cma_mae: return "mo-cma-mae";
    case Algorithm::mome: return "mome";
    case Algorithm::emitter_como: return "emitter-como";
  }
  return "unknown";
}

Algorithm parse_algorithm(const std::string& name) {
  if (name == "mo-cma-mae") return Algorithm::mo_cma_mae;
  if (name == "mome") return Algorithm::mome;
  if (name == "emitter-como") return Algorithm::emitter_como;
  throw ConfigError("unknown algorithm '" + name + "'");
}

std::string to_string(Selection selection) { return selection == Selection::mu ? "mu" : "filter"; }

Selection parse_selection(const std::string& name) {
  if (name == "mu") return Selection::mu;
  if (name == "filter") return Selection::filter;
  throw ConfigError("unknown selection rule '" + name + "'");
}

std::string to_string(RestartRule rule) { return rule == RestartRule::basic ? "basic" : "cycle"; }

RestartRule parse_restart_rule(const std::string& name) {
  if (name == "basic") return RestartRule::basic;
  if (name == "cycle") return RestartRule::cycle;
  throw ConfigError("unknown restart rule '" + name + "'");
}

Eigen::VectorXd RunConfig::initial_solution() const {
  if (x0.empty()) return Eigen::VectorXd::Zero(static_cast<Eigen::Index>(domain.dimension));
  return Eigen::Map<const Eigen::VectorXd>(x0.data(), static_cast<Eigen::Index>(x0.size()));
}

void RunConfig::validate() const {
  domain.validate();
  if (emitters == 0) throw ConfigError("emitters must be positive");
  if (batch == 0) throw ConfigError("batch must be positive");
  if (cells == 0) throw ConfigError("cells must be positive");
  if (cvt_samples < cells) throw ConfigError("cvt samples must be at least the cell count");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ConfigError("alpha must lie in (0, 1]");
  if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
  if (!(sigma0 > 0.0)) throw ConfigError("sigma0 must be positive");
  if (size_limit && *size_limit < 2) throw ConfigError("size limit must be at least 2 (or absent)");
  if (!(sigma_iso >= 0.0) || !(sigma_line >= 0.0)) throw ConfigError("variation scales must be non-negative");
  if (!x0.empty() && x0.size() != domain.dimension) throw ConfigError("x0 length must equal the domain dimension");
}

Rng make_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return Rng(seq);
}

Eigen::VectorXd iso_line_variation(const Eigen::VectorXd& parent1, const Eigen::VectorXd& parent2,
                                   double sigma_iso, double sigma_line, Rng& rng) {
  if (parent1.size() != parent2.size()) throw ContractViolation("iso_line_variation: dimension mismatch");
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd child(parent1.size());
  for (Eigen::Index i = 0; i < child.size(); ++i) child[i] = sigma_iso * normal(rng);
  const double line = sigma_line * normal(rng);
  child += parent1 + line * (parent2 - parent1);
  return child;
}

double distance_to_front(std::span<const double> p, const Front& front) {
  if (front.empty()) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& q : front) {
    if (q.size() != p.size()) throw ContractViolation("distance_to_front: length mismatch");
    double d2 = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) d2 += (p[i] - q[i]) * (p[i] - q[i]);
    best = std::min(best, d2);
  }
  return std::sqrt(best);
}

ComoScore como_score(std::span<const double> f, const Front& front, std::span<const double> ref) {
  if (!weakly_dominated_by(front, f)) return {hvi(f, front, ref), true};
  return {-distance_to_front(f, front), false};
}

RunResult run_mo_cma_mae(const RunConfig& config) {
  config.validate();
  ArchiveOptions options;
  options.acceptance = Acceptance::threshold;
  options.size_limit = config.size_limit;
  options.alpha = config.alpha;
  options.epsilon = config.epsilon;
  CvtArchive archive(make_centroids(config), zero_reference(config), options);
  auto emitters = make_emitters(config);
  const Eigen::VectorXd x0 = config.initial_solution();
  MetricsRecorder recorder(config);

  std::vector<std::size_t> recent_cells;
  for (std::size_t iteration = 1; iteration <= config.iterations; ++iteration) {
    for (auto& emitter : emitters) {
      auto samples = emitter.es.ask(config.batch, emitter.rng);
      const auto evaluations = kernels::evaluate_batch(samples, config.domain);
      recorder.add_evaluations(samples.size());

      std::vector<RankedCandidate> candidates;
      candidates.reserve(samples.size());
      recent_cells.clear();
      for (std::size_t i = 0; i < samples.size(); ++i) {
        const Evaluation& ev = evaluations[i];
        if (ev.failed) {
          recorder.add_failure();
          candidates.push_back({std::move(samples[i]), 0.0, CandidateStatus::failed});
          continue;
        }
        const InsertionOutcome out = archive.try_insert(samples[i], ev.objectives, ev.measures);
        recent_cells.push_back(out.cell);
        candidates.push_back(
            {std::move(samples[i]), out.phi, out.inserted ? CandidateStatus::inserted : CandidateStatus::rejected});
      }
      emitter.es.tell(std::move(candidates), config.selection);

      if (emitter.es.check_restart(config.restart, {archive.visits(), recent_cells})) {
        emitter.es.restart(archive.sample_elite(emitter.rng, x0), config.sigma0);
        recorder.add_restart();
      }
    }
    recorder.record(iteration, archive);
  }
  return {std::move(archive), recorder.take(), std::nullopt};
}

RunResult run_mome(const RunConfig& config) {
  config.validate();
  ArchiveOptions options;
  options.acceptance = Acceptance::pareto_front;
  options.size_limit = config.size_limit;
  CvtArchive archive(make_centroids(config), zero_reference(config), options);
  Rng rng = make_rng(config.seed, 1);
  const Eigen::VectorXd x0 = config.initial_solution();
  const std::size_t offspring = config.emitters * config.batch;
  MetricsRecorder recorder(config);

  struct Member {
    std::size_t cell;
    std::size_t index;
  };
  std::vector<Member> pool;
  std::vector<double> weights;

  for (std::size_t iteration = 1; iteration <= config.iterations; ++iteration) {
    // Parents are drawn from the archive as it stood at the start of the
    // iteration, weighted by within-cell crowding distance.
    pool.clear();
    weights.clear();
    for (std::size_t c = 0; c < archive.size(); ++c) {
      const CellState& cell = archive.cell(c);
      if (cell.empty()) continue;
      auto distance = crowding_distances(cell.objectives);
      double max_finite = 0.0;
      bool any_finite = false;
      for (double d : distance) {
        if (std::isfinite(d)) {
          max_finite = std::max(max_finite, d);
          any_finite = true;
        }
      }
      const double substitute = any_finite ? max_finite : 1.0;
      for (std::size_t i = 0; i < distance.size(); ++i) {
        pool.push_back({c, i});
        weights.push_back(std::isfinite(distance[i]) ? distance[i] : substitute);
      }
    }
    if (!weights.empty() && std::all_of(weights.begin(), weights.end(), [](double w) { return w <= 0.0; })) {
      std::fill(weights.begin(), weights.end(), 1.0);
    }

    std::vector<Eigen::VectorXd> children;
    children.reserve(offspring);
    if (pool.empty()) {
      for (std::size_t i = 0; i < offspring; ++i) {
        children.push_back(iso_line_variation(x0, x0, config.sigma_iso, config.sigma_line, rng));
      }
    } else {
      std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
      for (std::size_t i = 0; i < offspring; ++i) {
        const Member a = pool[pick(rng)];
        const Member b = pool[pick(rng)];
        children.push_back(iso_line_variation(archive.cell(a.cell).solutions[a.index],
                                              archive.cell(b.cell).solutions[b.index], config.sigma_iso,
                                              config.sigma_line, rng));
      }
    }

    const auto evaluations = kernels::evaluate_batch(children, config.domain);
    recorder.add_evaluations(children.size());
    for (std::size_t i = 0; i < children.size(); ++i) {
      if (evaluations[i].failed) {
        recorder.add_failure();
        continue;
      }
      archive.try_insert(children[i], evaluations[i].objectives, evaluations[i].measures);
    }
    recorder.record(iteration, archive);
  }
  return {std::move(archive), recorder.take(), std::nullopt};
}

RunResult run_emitter_como(const RunConfig& config) {
  config.validate();
  CvtArchive passive = CvtArchive::passive(make_centroids(config), zero_reference(config));
  const ObjectiveVector reference = zero_reference(config);
  auto emitters = make_emitters(config);
  const Eigen::VectorXd x0 = config.initial_solution();
  ParetoSet global;
  MetricsRecorder recorder(config);

  auto erase_solution = [&](std::size_t i) {
    global.solutions.erase(global.solutions.begin() + static_cast<std::ptrdiff_t>(i));
  };

  std::vector<std::size_t> recent_cells;
  for (std::size_t iteration = 1; iteration <= config.iterations; ++iteration) {
    for (auto& emitter : emitters) {
      auto samples = emitter.es.ask(config.batch, emitter.rng);
      const auto evaluations = kernels::evaluate_batch(samples, config.domain);
      recorder.add_evaluations(samples.size());

      std::vector<RankedCandidate> candidates;
      candidates.reserve(samples.size());
      recent_cells.clear();
      for (std::size_t i = 0; i < samples.size(); ++i) {
        const Evaluation& ev = evaluations[i];
        if (ev.failed) {
          recorder.add_failure();
          candidates.push_back({std::move(samples[i]), 0.0, CandidateStatus::failed});
          continue;
        }
        recent_cells.push_back(passive.try_insert(samples[i], ev.objectives, ev.measures).cell);

        const ComoScore score = como_score(ev.objectives, global.objectives, reference);
        if (score.nondominated) {
          insert_nondominated(global.objectives, ev.objectives, erase_solution);
          global.solutions.push_back(samples[i]);
          downsize(global.objectives, kGlobalFrontLimit, erase_solution);
        }
        candidates.push_back({std::move(samples[i]), score.phi,
                              score.nondominated ? CandidateStatus::inserted : CandidateStatus::rejected});
      }
      emitter.es.tell(std::move(candidates), config.selection);

      if (emitter.es.check_restart(config.restart, {passive.visits(), recent_cells})) {
        Eigen::VectorXd start = x0;
        if (!global.solutions.empty()) {
          std::uniform_int_distribution<std::size_t> pick(0, global.solutions.size() - 1);
          start = global.solutions[pick(emitter.rng)];
        }
        emitter.es.restart(std::move(start), config.sigma0);
        recorder.add_restart();
      }
    }
    recorder.record(iteration, passive);
  }
  return {std::move(passive), recorder.take(), std::move(global)};
}

RunResult run(const RunConfig& config) {
  switch (config.algorithm) {
    case Algorithm::mo_cma_mae: return run_mo_cma_mae(config);
    case Algorithm::mome: return run_mome(config);
    case Algorithm::emitter_como: return run_emitter_como(config);
  }
  throw ConfigError("unknown algorithm");
}

}  // namespace moqd
