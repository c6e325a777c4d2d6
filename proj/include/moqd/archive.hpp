#pragma once

// CVT-tessellated MOQD archive. Each cell keeps a local Pareto set and, in
// threshold mode, a lagging threshold front that gates insertion.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "moqd/cma_es.hpp"
#include "moqd/domains.hpp"
#include "moqd/kernels.hpp"
#include "moqd/pareto.hpp"

namespace moqd {

/// Lloyd's k-means over `samples` uniform points in `bounds`. Stops when no
/// centroid moves more than 1e-6 of the box diagonal, or after 100 rounds.
std::vector<MeasureVector> tessellate_cvt(const Bounds& bounds, std::size_t cells, std::size_t samples, Rng& rng);

/// Discount d in [0, 1] such that
///   alpha * hvi(f) - epsilon <= hvi(ref + d (f - ref), T) <= alpha * hvi(f).
/// Requires hvi(f, T) > 0.
double bisect_discount(std::span<const double> f, const Front& threshold, double alpha, double epsilon,
                       std::span<const double> ref);

/// Point ref + d * (f - ref); equals d * f for the zero reference.
ObjectiveVector discounted(std::span<const double> f, double d, std::span<const double> ref);

struct CellState {
  Front objectives;  // raw objectives of the Pareto set
  std::vector<Eigen::VectorXd> solutions;
  Front threshold;
  std::uint64_t visits = 0;
  double hypervolume = 0.0;  // of `objectives`, kept current on every change

  bool empty() const { return solutions.empty(); }
};

struct InsertionOutcome {
  std::size_t cell = 0;
  double phi = 0.0;
  bool inserted = false;
  std::optional<double> discount;
};

enum class Acceptance {
  threshold,     // gate on hvi against the threshold front
  pareto_front,  // gate on hvi against the cell's raw front
};

struct ArchiveOptions {
  Acceptance acceptance = Acceptance::threshold;
  std::optional<std::size_t> size_limit;
  double alpha = 0.1;
  double epsilon = 1e-3;

  void validate() const;
};

struct HeatmapRow {
  std::size_t cell;
  MeasureVector centroid;
  double hypervolume;
  std::size_t pareto_size;
  std::uint64_t visits;
};

class CvtArchive {
 public:
  CvtArchive(std::vector<MeasureVector> centroids, ObjectiveVector reference, ArchiveOptions options = {});

  /// Metrics-only archive: raw-front acceptance, no size limit.
  static CvtArchive passive(std::vector<MeasureVector> centroids, ObjectiveVector reference);

  std::size_t assign_cell(std::span<const double> measures) const;

  InsertionOutcome try_insert(const Eigen::VectorXd& solution, std::span<const double> objectives,
                              std::span<const double> measures);

  /// Sum of per-cell hypervolumes of the raw fronts, in cell order.
  double moqd_score() const;
  double coverage() const;

  /// Uniform non-empty cell, then a uniform member of its Pareto set;
  /// `fallback` when the archive is empty.
  Eigen::VectorXd sample_elite(Rng& rng, const Eigen::VectorXd& fallback) const;

  std::vector<HeatmapRow> export_heatmap() const;

  std::size_t size() const { return cells_.size(); }
  const std::vector<MeasureVector>& centroids() const { return centroids_; }
  const std::vector<CellState>& cells() const { return cells_; }
  const CellState& cell(std::size_t i) const { return cells_.at(i); }
  const ObjectiveVector& reference() const { return reference_; }
  const ArchiveOptions& options() const { return options_; }
  std::span<const std::uint64_t> visits() const { return visits_; }
  std::uint64_t bisection_calls() const { return bisection_calls_; }

 private:
  void downsize_cell(CellState& cell) const;

  std::vector<MeasureVector> centroids_;
  kernels::PointSet centroid_block_;
  std::vector<CellState> cells_;
  std::vector<std::uint64_t> visits_;
  ObjectiveVector reference_;
  ArchiveOptions options_;
  std::uint64_t bisection_calls_ = 0;
};

}  // namespace moqd
