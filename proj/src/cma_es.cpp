#include "moqd/cma_es.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "moqd/errors.hpp"

namespace moqd {
namespace {

// Strategy parameters for a recombination over `parents` points in dimension
// n, following the standard CMA-ES defaults with positive weights only.
struct Strategy {
  Eigen::VectorXd weights;
  double mu_eff;
  double c_sigma;
  double d_sigma;
  double c_c;
  double c_1;
  double c_mu;
};

Strategy make_strategy(std::size_t parents, std::size_t n_dim) {
  const double n = static_cast<double>(n_dim);
  Strategy s;
  s.weights.resize(static_cast<Eigen::Index>(parents));
  for (std::size_t i = 0; i < parents; ++i) {
    s.weights[static_cast<Eigen::Index>(i)] =
        std::log(static_cast<double>(parents) + 0.5) - std::log(static_cast<double>(i + 1));
  }
  s.weights /= s.weights.sum();
  s.mu_eff = 1.0 / s.weights.squaredNorm();
  s.c_sigma = (s.mu_eff + 2.0) / (n + s.mu_eff + 5.0);
  s.d_sigma = 1.0 + 2.0 * std::max(0.0, std::sqrt((s.mu_eff - 1.0) / (n + 1.0)) - 1.0) + s.c_sigma;
  s.c_c = (4.0 + s.mu_eff / n) / (n + 4.0 + 2.0 * s.mu_eff / n);
  s.c_1 = 2.0 / ((n + 1.3) * (n + 1.3) + s.mu_eff);
  s.c_mu = std::min(1.0 - s.c_1,
                    2.0 * (s.mu_eff - 2.0 + 1.0 / s.mu_eff) / ((n + 2.0) * (n + 2.0) + s.mu_eff));
  return s;
}

double expected_normal_norm(double n) {
  return std::sqrt(n) * (1.0 - 1.0 / (4.0 * n) + 1.0 / (21.0 * n * n));
}

}  // namespace

CmaEs::CmaEs(Eigen::VectorXd mean, double sigma0) : mean_(std::move(mean)), sigma_(sigma0), sigma0_(sigma0) {
  if (mean_.size() == 0) throw ContractViolation("CmaEs: empty mean");
  if (!(sigma0 > 0.0)) throw ContractViolation("CmaEs: sigma0 must be positive");
  restart(mean_, sigma0);
}

void CmaEs::restart(Eigen::VectorXd new_mean, double sigma0) {
  if (new_mean.size() != mean_.size()) throw ContractViolation("CmaEs::restart: dimension mismatch");
  const auto n = mean_.size();
  mean_ = std::move(new_mean);
  sigma_ = sigma0;
  sigma0_ = sigma0;
  cov_ = Eigen::MatrixXd::Identity(n, n);
  basis_ = Eigen::MatrixXd::Identity(n, n);
  eigenvalues_ = Eigen::VectorXd::Ones(n);
  inv_sqrt_cov_ = Eigen::MatrixXd::Identity(n, n);
  path_sigma_ = Eigen::VectorXd::Zero(n);
  path_c_ = Eigen::VectorXd::Zero(n);
  generation_ = 0;
  last_decomposition_ = 0;
  stale_iterations_ = 0;
  decomposition_failed_ = false;
}

std::vector<Eigen::VectorXd> CmaEs::ask(std::size_t batch, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto n = mean_.size();
  const Eigen::MatrixXd transform = basis_ * eigenvalues_.cwiseSqrt().asDiagonal();
  std::vector<Eigen::VectorXd> samples;
  samples.reserve(batch);
  Eigen::VectorXd z(n);
  for (std::size_t i = 0; i < batch; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) z[j] = normal(rng);
    samples.emplace_back(mean_ + sigma_ * (transform * z));
  }
  return samples;
}

void CmaEs::tell(std::vector<RankedCandidate> candidates, Selection selection) {
  if (candidates.empty()) throw ContractViolation("CmaEs::tell: empty candidate list");
  const auto n = mean_.size();
  for (const auto& c : candidates) {
    if (c.solution.size() != n) throw ContractViolation("CmaEs::tell: candidate dimension mismatch");
  }

  std::vector<std::size_t> order(candidates.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const bool fa = candidates[a].status == CandidateStatus::failed;
    const bool fb = candidates[b].status == CandidateStatus::failed;
    if (fa != fb) return fb;
    if (fa) return false;
    return candidates[a].score > candidates[b].score;
  });

  std::vector<std::size_t> parents;
  if (selection == Selection::filter) {
    for (std::size_t idx : order) {
      if (candidates[idx].status == CandidateStatus::inserted) parents.push_back(idx);
    }
  }
  if (parents.empty()) {
    const std::size_t mu = std::max<std::size_t>(1, candidates.size() / 2);
    parents.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(mu));
  }

  const Strategy s = make_strategy(parents.size(), static_cast<std::size_t>(n));
  Eigen::MatrixXd steps(n, static_cast<Eigen::Index>(parents.size()));
  for (std::size_t i = 0; i < parents.size(); ++i) {
    steps.col(static_cast<Eigen::Index>(i)) = (candidates[parents[i]].solution - mean_) / sigma_;
  }
  const Eigen::VectorXd step_w = steps * s.weights;

  mean_ += sigma_ * step_w;
  ++generation_;

  path_sigma_ = (1.0 - s.c_sigma) * path_sigma_ +
                std::sqrt(s.c_sigma * (2.0 - s.c_sigma) * s.mu_eff) * (inv_sqrt_cov_ * step_w);
  const double chi_n = expected_normal_norm(static_cast<double>(n));
  const double ps_norm = path_sigma_.norm();
  const double correction =
      std::sqrt(1.0 - std::pow(1.0 - s.c_sigma, 2.0 * static_cast<double>(generation_)));
  const bool h_sigma = ps_norm / correction / chi_n < 1.4 + 2.0 / (static_cast<double>(n) + 1.0);

  path_c_ = (1.0 - s.c_c) * path_c_;
  if (h_sigma) path_c_ += std::sqrt(s.c_c * (2.0 - s.c_c) * s.mu_eff) * step_w;

  const double stall = h_sigma ? 0.0 : s.c_1 * s.c_c * (2.0 - s.c_c);
  Eigen::MatrixXd rank_mu = steps * s.weights.asDiagonal() * steps.transpose();
  cov_ = (1.0 - s.c_1 - s.c_mu + stall) * cov_ + s.c_1 * (path_c_ * path_c_.transpose()) + s.c_mu * rank_mu;
  cov_ = 0.5 * (cov_ + cov_.transpose());

  sigma_ *= std::exp((s.c_sigma / s.d_sigma) * (ps_norm / chi_n - 1.0));

  const bool improved = std::any_of(candidates.begin(), candidates.end(), [](const RankedCandidate& c) {
    return c.status != CandidateStatus::failed && c.score > 0.0;
  });
  stale_iterations_ = improved ? 0 : stale_iterations_ + 1;

  const std::uint64_t gap = std::max<std::uint64_t>(
      1, static_cast<std::uint64_t>(n) / (10 * static_cast<std::uint64_t>(candidates.size())));
  if (generation_ - last_decomposition_ >= gap) decompose();
}

void CmaEs::decompose() {
  last_decomposition_ = generation_;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov_);
  if (solver.info() != Eigen::Success || !solver.eigenvalues().allFinite() ||
      solver.eigenvalues().minCoeff() <= 0.0) {
    decomposition_failed_ = true;
    return;
  }
  decomposition_failed_ = false;
  basis_ = solver.eigenvectors();
  eigenvalues_ = solver.eigenvalues();
  inv_sqrt_cov_ = basis_ * eigenvalues_.cwiseSqrt().cwiseInverse().asDiagonal() * basis_.transpose();
}

void CmaEs::set_covariance(const Eigen::MatrixXd& cov) {
  if (cov.rows() != mean_.size() || cov.cols() != mean_.size()) {
    throw ContractViolation("CmaEs::set_covariance: shape mismatch");
  }
  cov_ = 0.5 * (cov + cov.transpose());
  decompose();
}

bool CmaEs::check_restart(RestartRule rule, const ArchiveStats& stats, const RestartThresholds& thresholds) const {
  if (decomposition_failed_) return true;
  if (rule == RestartRule::basic) {
    const double largest = eigenvalues_.maxCoeff();
    const double smallest = eigenvalues_.minCoeff();
    if (largest / smallest > thresholds.max_condition) return true;
    if (sigma_ * std::sqrt(largest) > thresholds.tolx_up * sigma0_) return true;
    return stale_iterations_ >= thresholds.stagnation_window;
  }

  if (stats.visits.empty()) return false;
  const double total = std::accumulate(stats.visits.begin(), stats.visits.end(), 0.0,
                                       [](double acc, std::uint64_t v) { return acc + static_cast<double>(v); });
  const double mean_visits = total / static_cast<double>(stats.visits.size());
  if (mean_visits < 1.0) return false;
  return std::any_of(stats.recent_cells.begin(), stats.recent_cells.end(), [&](std::size_t cell) {
    return static_cast<double>(stats.visits[cell]) > thresholds.cycle_factor * mean_visits;
  });
}

}  // namespace moqd
