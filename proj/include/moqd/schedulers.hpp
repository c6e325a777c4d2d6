#pragma once

// Full optimization loops: MO-CMA-MAE, MOME, and Emitter-COMO-CMA-ES with a
// passive archive for metrics.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "moqd/archive.hpp"
#include "moqd/cma_es.hpp"
#include "moqd/domains.hpp"

namespace moqd {

enum class Algorithm { mo_cma_mae, mome, emitter_como };

std::string to_string(Algorithm algorithm);
Algorithm parse_algorithm(const std::string& name);
std::string to_string(Selection selection);
Selection parse_selection(const std::string& name);
std::string to_string(RestartRule rule);
RestartRule parse_restart_rule(const std::string& name);

inline constexpr std::size_t kGlobalFrontLimit = 10000;

struct RunConfig {
  Algorithm algorithm = Algorithm::mo_cma_mae;
  DomainSpec domain;
  std::size_t iterations = 5000;
  std::size_t emitters = 5;
  std::size_t batch = 36;
  std::size_t cells = 1000;
  std::size_t cvt_samples = 50000;
  double alpha = 0.1;
  double epsilon = 1e-3;
  double sigma0 = 0.5;
  std::optional<std::size_t> size_limit = 10;  // nullopt: dynamic archive
  Selection selection = Selection::mu;
  RestartRule restart = RestartRule::cycle;
  double sigma_iso = 0.05;
  double sigma_line = 0.5;
  std::vector<double> x0;  // empty: zero vector of the domain dimension
  std::uint64_t seed = 0;

  Eigen::VectorXd initial_solution() const;
  void validate() const;
};

struct IterationMetrics {
  std::size_t iteration = 0;
  std::uint64_t evaluations = 0;
  double moqd_score = 0.0;
  double coverage = 0.0;
  std::uint64_t restarts = 0;  // cumulative
  std::uint64_t failures = 0;  // cumulative
};

struct ParetoSet {
  Front objectives;
  std::vector<Eigen::VectorXd> solutions;
};

struct RunResult {
  CvtArchive archive;  // passive archive for Emitter-COMO-CMA-ES
  std::vector<IterationMetrics> metrics;
  std::optional<ParetoSet> global;
};

/// Independent stream `stream` derived from the run seed.
Rng make_rng(std::uint64_t seed, std::uint64_t stream);

/// parent1 + sigma_iso * z + sigma_line * u * (parent2 - parent1).
Eigen::VectorXd iso_line_variation(const Eigen::VectorXd& parent1, const Eigen::VectorXd& parent2,
                                   double sigma_iso, double sigma_line, Rng& rng);

/// Smallest Euclidean distance from p to a front member (0 for an empty front).
double distance_to_front(std::span<const double> p, const Front& front);

struct ComoScore {
  double phi;
  bool nondominated;
};

/// Emitter-COMO-CMA-ES ranking value: hvi against the global front when f is
/// not weakly dominated by it, otherwise minus the distance to the front.
ComoScore como_score(std::span<const double> f, const Front& front, std::span<const double> ref);

RunResult run_mo_cma_mae(const RunConfig& config);
RunResult run_mome(const RunConfig& config);
RunResult run_emitter_como(const RunConfig& config);
RunResult run(const RunConfig& config);

}  // namespace moqd
