#pragma once

// Data-parallel inner loops. Every kernel has a serial reference and an
// OpenMP variant; the two produce identical results, and the unqualified
// name dispatches to the OpenMP variant when it was compiled in.

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "moqd/domains.hpp"

namespace moqd::kernels {

// Row-major block of equally sized points.
struct PointSet {
  std::size_t dim = 0;
  std::vector<double> data;

  PointSet() = default;
  PointSet(std::size_t dimension, std::size_t count) : dim(dimension), data(dimension * count, 0.0) {}

  std::size_t size() const { return dim == 0 ? 0 : data.size() / dim; }
  std::span<const double> row(std::size_t i) const { return {data.data() + i * dim, dim}; }
  std::span<double> row(std::size_t i) { return {data.data() + i * dim, dim}; }
};

bool openmp_enabled();

/// Index of the nearest centroid by Euclidean distance, lowest index on ties.
std::size_t nearest(std::span<const double> point, const PointSet& centroids);

void nearest_centroid_serial(const PointSet& points, const PointSet& centroids, std::span<std::size_t> labels);
void nearest_centroid_parallel(const PointSet& points, const PointSet& centroids, std::span<std::size_t> labels);
void nearest_centroid(const PointSet& points, const PointSet& centroids, std::span<std::size_t> labels);

std::vector<Evaluation> evaluate_batch_serial(std::span<const Eigen::VectorXd> solutions, const DomainSpec& spec);
std::vector<Evaluation> evaluate_batch_parallel(std::span<const Eigen::VectorXd> solutions, const DomainSpec& spec);
std::vector<Evaluation> evaluate_batch(std::span<const Eigen::VectorXd> solutions, const DomainSpec& spec);

}  // namespace moqd::kernels
