#include "moqd/archive.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "moqd/errors.hpp"

namespace moqd {
namespace {

constexpr int kMaxLloydRounds = 100;
constexpr double kLloydTolerance = 1e-6;
constexpr int kMaxHalvings = 64;

}  // namespace

std::vector<MeasureVector> tessellate_cvt(const Bounds& bounds, std::size_t cells, std::size_t samples, Rng& rng) {
  const std::size_t dim = bounds.low.size();
  if (dim == 0 || bounds.high.size() != dim) throw ConfigError("tessellate_cvt: malformed bounds");
  for (std::size_t k = 0; k < dim; ++k) {
    if (!(bounds.low[k] < bounds.high[k])) {
      throw ConfigError("tessellate_cvt: degenerate bounds in dimension " + std::to_string(k));
    }
  }
  if (cells == 0) throw ConfigError("tessellate_cvt: need at least one cell");
  if (cells > samples) throw ConfigError("tessellate_cvt: more cells than samples");

  kernels::PointSet points(dim, samples);
  std::vector<std::uniform_real_distribution<double>> uniform;
  double diagonal = 0.0;
  for (std::size_t k = 0; k < dim; ++k) {
    uniform.emplace_back(bounds.low[k], bounds.high[k]);
    diagonal += (bounds.high[k] - bounds.low[k]) * (bounds.high[k] - bounds.low[k]);
  }
  diagonal = std::sqrt(diagonal);
  for (std::size_t i = 0; i < samples; ++i) {
    auto row = points.row(i);
    for (std::size_t k = 0; k < dim; ++k) row[k] = uniform[k](rng);
  }

  // Seeded with the first `cells` samples.
  kernels::PointSet centroids(dim, cells);
  std::copy_n(points.data.begin(), dim * cells, centroids.data.begin());

  std::vector<std::size_t> labels(samples);
  std::vector<double> sums(dim * cells);
  std::vector<std::size_t> counts(cells);
  for (int round = 0; round < kMaxLloydRounds; ++round) {
    kernels::nearest_centroid(points, centroids, labels);
    std::fill(sums.begin(), sums.end(), 0.0);
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t i = 0; i < samples; ++i) {
      const auto row = points.row(i);
      double* sum = sums.data() + labels[i] * dim;
      for (std::size_t k = 0; k < dim; ++k) sum[k] += row[k];
      ++counts[labels[i]];
    }
    double max_shift = 0.0;
    for (std::size_t j = 0; j < cells; ++j) {
      if (counts[j] == 0) continue;
      auto c = centroids.row(j);
      double shift2 = 0.0;
      for (std::size_t k = 0; k < dim; ++k) {
        const double updated = sums[j * dim + k] / static_cast<double>(counts[j]);
        shift2 += (updated - c[k]) * (updated - c[k]);
        c[k] = updated;
      }
      max_shift = std::max(max_shift, std::sqrt(shift2));
    }
    if (max_shift < kLloydTolerance * diagonal) break;
  }

  std::vector<MeasureVector> out;
  out.reserve(cells);
  for (std::size_t j = 0; j < cells; ++j) {
    const auto c = centroids.row(j);
    out.emplace_back(c.begin(), c.end());
  }
  return out;
}

ObjectiveVector discounted(std::span<const double> f, double d, std::span<const double> ref) {
  ObjectiveVector out(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = ref[i] + d * (f[i] - ref[i]);
  return out;
}

double bisect_discount(std::span<const double> f, const Front& threshold, double alpha, double epsilon,
                       std::span<const double> ref) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ContractViolation("bisect_discount: alpha must lie in (0, 1]");
  if (!(epsilon > 0.0)) throw ContractViolation("bisect_discount: epsilon must be positive");
  const double full = hvi(f, threshold, ref);
  if (!(full > 0.0)) throw ContractViolation("bisect_discount: f is dominated by the threshold front");

  const double target = alpha * full;
  double low = 0.0;
  double high = 1.0;
  for (int i = 0; i < kMaxHalvings; ++i) {
    const double d = 0.5 * (low + high);
    const double mid = hvi(discounted(f, d, ref), threshold, ref);
    if (mid > target) {
      high = d;
    } else if (target - mid > epsilon) {
      low = d;
    } else {
      return d;
    }
  }
  // Only reachable through rounding; `low` always satisfies the upper bound.
  return low;
}

void ArchiveOptions::validate() const {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ConfigError("alpha must lie in (0, 1]");
  if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
  if (size_limit && *size_limit < 2) throw ConfigError("size limit must be at least 2");
}

CvtArchive::CvtArchive(std::vector<MeasureVector> centroids, ObjectiveVector reference, ArchiveOptions options)
    : centroids_(std::move(centroids)), reference_(std::move(reference)), options_(options) {
  options_.validate();
  if (centroids_.empty()) throw ConfigError("archive needs at least one centroid");
  if (reference_.size() != 2 && reference_.size() != 3) throw ConfigError("archive supports 2 or 3 objectives");
  const std::size_t dim = centroids_.front().size();
  centroid_block_ = kernels::PointSet(dim, centroids_.size());
  for (std::size_t j = 0; j < centroids_.size(); ++j) {
    if (centroids_[j].size() != dim) throw ConfigError("centroids differ in dimension");
    std::copy(centroids_[j].begin(), centroids_[j].end(), centroid_block_.row(j).begin());
  }
  cells_.resize(centroids_.size());
  visits_.assign(centroids_.size(), 0);
}

CvtArchive CvtArchive::passive(std::vector<MeasureVector> centroids, ObjectiveVector reference) {
  ArchiveOptions options;
  options.acceptance = Acceptance::pareto_front;
  return CvtArchive(std::move(centroids), std::move(reference), options);
}

std::size_t CvtArchive::assign_cell(std::span<const double> measures) const {
  if (measures.size() != centroid_block_.dim) throw ContractViolation("assign_cell: measure dimension mismatch");
  return kernels::nearest(measures, centroid_block_);
}

void CvtArchive::downsize_cell(CellState& cell) const {
  if (!options_.size_limit) return;
  const std::size_t limit = *options_.size_limit;
  downsize(cell.objectives, limit, [&](std::size_t i) {
    cell.solutions.erase(cell.solutions.begin() + static_cast<std::ptrdiff_t>(i));
  });
  if (options_.acceptance == Acceptance::threshold) downsize(cell.threshold, limit);
}

InsertionOutcome CvtArchive::try_insert(const Eigen::VectorXd& solution, std::span<const double> objectives,
                                        std::span<const double> measures) {
  if (objectives.size() != reference_.size()) throw ContractViolation("try_insert: objective count mismatch");
  InsertionOutcome outcome;
  outcome.cell = assign_cell(measures);
  CellState& cell = cells_[outcome.cell];
  ++cell.visits;
  ++visits_[outcome.cell];

  const bool threshold_mode = options_.acceptance == Acceptance::threshold;
  outcome.phi = hvi(objectives, threshold_mode ? cell.threshold : cell.objectives, reference_);
  if (!(outcome.phi > 0.0)) return outcome;
  outcome.inserted = true;

  // Gain of the raw front; equals phi when the gate is the raw front itself.
  const double gain = threshold_mode ? hvi(objectives, cell.objectives, reference_) : outcome.phi;
  const bool added = insert_nondominated(cell.objectives, objectives, [&](std::size_t i) {
    cell.solutions.erase(cell.solutions.begin() + static_cast<std::ptrdiff_t>(i));
  });
  if (added) cell.solutions.push_back(solution);

  if (threshold_mode) {
    const double d = bisect_discount(objectives, cell.threshold, options_.alpha, options_.epsilon, reference_);
    ++bisection_calls_;
    outcome.discount = d;
    insert_nondominated(cell.threshold, discounted(objectives, d, reference_));
  }
  const std::size_t before = cell.objectives.size();
  downsize_cell(cell);
  // Accumulate unless a drop happened.
  if (cell.objectives.size() == before) {
    cell.hypervolume += gain;
  } else {
    cell.hypervolume = hypervolume(cell.objectives, reference_);
  }
  return outcome;
}

double CvtArchive::moqd_score() const {
  double score = 0.0;
  for (const auto& cell : cells_) score += cell.hypervolume;
  return score;
}

double CvtArchive::coverage() const {
  const auto filled = std::count_if(cells_.begin(), cells_.end(), [](const CellState& c) { return !c.empty(); });
  return static_cast<double>(filled) / static_cast<double>(cells_.size());
}

Eigen::VectorXd CvtArchive::sample_elite(Rng& rng, const Eigen::VectorXd& fallback) const {
  std::vector<std::size_t> filled;
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    if (!cells_[i].empty()) filled.push_back(i);
  }
  if (filled.empty()) return fallback;
  std::uniform_int_distribution<std::size_t> pick_cell(0, filled.size() - 1);
  const CellState& cell = cells_[filled[pick_cell(rng)]];
  std::uniform_int_distribution<std::size_t> pick_member(0, cell.solutions.size() - 1);
  return cell.solutions[pick_member(rng)];
}

std::vector<HeatmapRow> CvtArchive::export_heatmap() const {
  std::vector<HeatmapRow> rows;
  rows.reserve(cells_.size());
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    rows.push_back({i, centroids_[i], cells_[i].hypervolume, cells_[i].solutions.size(), cells_[i].visits});
  }
  return rows;
}

}  // namespace moqd
