#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace moqd {

using Rng = std::mt19937_64;

enum class CandidateStatus { inserted, rejected, failed };

struct RankedCandidate {
  Eigen::VectorXd solution;
  double score = 0.0;
  CandidateStatus status = CandidateStatus::rejected;
};

// mu: top floor(batch/2) candidates. filter: every inserted candidate, or mu
// when none was inserted.
enum class Selection { mu, filter };

enum class RestartRule { basic, cycle };

// Archive view consulted by the cycle restart rule.
struct ArchiveStats {
  std::span<const std::uint64_t> visits;
  // Cells hit by the emitter's most recent batch.
  std::span<const std::size_t> recent_cells;
};

struct RestartThresholds {
  double max_condition = 1e14;
  double tolx_up = 1e4;
  std::size_t stagnation_window = 50;
  double cycle_factor = 10.0;
};

/// One CMA-ES instance with explicit step size: samples are
/// mean + sigma * B * D * z with C = B * D^2 * B^T.
class CmaEs {
 public:
  CmaEs(Eigen::VectorXd mean, double sigma0);

  std::vector<Eigen::VectorXd> ask(std::size_t batch, Rng& rng);

  /// Ranks the candidates (score descending, failed last, ties by sample
  /// order), selects parents and applies recombination, path, covariance
  /// and step-size updates.
  void tell(std::vector<RankedCandidate> candidates, Selection selection);

  bool check_restart(RestartRule rule, const ArchiveStats& stats,
                     const RestartThresholds& thresholds = {}) const;

  /// Resets to C = I, sigma = sigma0 and the given mean. The caller's random
  /// stream is not touched.
  void restart(Eigen::VectorXd new_mean, double sigma0);

  std::size_t dimension() const { return static_cast<std::size_t>(mean_.size()); }
  const Eigen::VectorXd& mean() const { return mean_; }
  double step_size() const { return sigma_; }
  double initial_step_size() const { return sigma0_; }
  const Eigen::MatrixXd& covariance() const { return cov_; }
  const Eigen::VectorXd& path_sigma() const { return path_sigma_; }
  const Eigen::VectorXd& path_c() const { return path_c_; }
  std::uint64_t generation() const { return generation_; }
  std::size_t iterations_without_improvement() const { return stale_iterations_; }
  bool decomposition_failed() const { return decomposition_failed_; }

  /// Eigenvalues of the covariance from the latest decomposition, ascending.
  Eigen::VectorXd eigenvalues() const { return eigenvalues_; }

  // Exposed for tests that need to force a pathological covariance.
  void set_covariance(const Eigen::MatrixXd& cov);

 private:
  void decompose();

  Eigen::VectorXd mean_;
  double sigma_;
  double sigma0_;
  Eigen::MatrixXd cov_;
  Eigen::MatrixXd basis_;        // B
  Eigen::VectorXd eigenvalues_;  // diag(D)^2
  Eigen::MatrixXd inv_sqrt_cov_;
  Eigen::VectorXd path_sigma_;
  Eigen::VectorXd path_c_;
  std::uint64_t generation_ = 0;
  std::uint64_t last_decomposition_ = 0;
  std::size_t stale_iterations_ = 0;
  bool decomposition_failed_ = false;
};

}  // namespace moqd
