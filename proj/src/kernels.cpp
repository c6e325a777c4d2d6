#include "moqd/kernels.hpp"

#include <exception>
#include <limits>

#include "moqd/errors.hpp"

namespace moqd::kernels {
namespace {

void require_shapes(const PointSet& points, const PointSet& centroids, std::span<std::size_t> labels) {
  if (points.dim != centroids.dim) throw ContractViolation("nearest_centroid: dimension mismatch");
  if (labels.size() != points.size()) throw ContractViolation("nearest_centroid: label buffer size mismatch");
  if (centroids.size() == 0) throw ContractViolation("nearest_centroid: no centroids");
}

std::span<const double> as_span(const Eigen::VectorXd& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

}  // namespace

bool openmp_enabled() {
#ifdef MOQD_HAVE_OPENMP
  return true;
#else
  return false;
#endif
}

std::size_t nearest(std::span<const double> point, const PointSet& centroids) {
  const std::size_t dim = centroids.dim;
  const double* c = centroids.data.data();
  const std::size_t count = centroids.size();
  std::size_t best = 0;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < count; ++j, c += dim) {
    double d2 = 0.0;
    for (std::size_t k = 0; k < dim; ++k) {
      const double diff = point[k] - c[k];
      d2 += diff * diff;
    }
    if (d2 < best_d2) {
      best_d2 = d2;
      best = j;
    }
  }
  return best;
}

void nearest_centroid_serial(const PointSet& points, const PointSet& centroids, std::span<std::size_t> labels) {
  require_shapes(points, centroids, labels);
  for (std::size_t i = 0; i < points.size(); ++i) labels[i] = nearest(points.row(i), centroids);
}

void nearest_centroid_parallel(const PointSet& points, const PointSet& centroids, std::span<std::size_t> labels) {
  require_shapes(points, centroids, labels);
  const auto count = static_cast<std::ptrdiff_t>(points.size());
#ifdef MOQD_HAVE_OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    const auto row = static_cast<std::size_t>(i);
    labels[row] = nearest(points.row(row), centroids);
  }
}

void nearest_centroid(const PointSet& points, const PointSet& centroids, std::span<std::size_t> labels) {
  if (openmp_enabled()) {
    nearest_centroid_parallel(points, centroids, labels);
  } else {
    nearest_centroid_serial(points, centroids, labels);
  }
}

std::vector<Evaluation> evaluate_batch_serial(std::span<const Eigen::VectorXd> solutions, const DomainSpec& spec) {
  std::vector<Evaluation> out;
  out.reserve(solutions.size());
  for (const auto& x : solutions) out.push_back(evaluate(as_span(x), spec));
  return out;
}

std::vector<Evaluation> evaluate_batch_parallel(std::span<const Eigen::VectorXd> solutions, const DomainSpec& spec) {
  std::vector<Evaluation> out(solutions.size());
  const auto count = static_cast<std::ptrdiff_t>(solutions.size());
  // Exceptions may not escape an OpenMP region; keep the first and rethrow.
  std::exception_ptr error;
#ifdef MOQD_HAVE_OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    try {
      out[static_cast<std::size_t>(i)] = evaluate(as_span(solutions[static_cast<std::size_t>(i)]), spec);
    } catch (...) {
#ifdef MOQD_HAVE_OPENMP
#pragma omp critical(moqd_evaluate_error)
#endif
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return out;
}

std::vector<Evaluation> evaluate_batch(std::span<const Eigen::VectorXd> solutions, const DomainSpec& spec) {
  if (openmp_enabled() && solutions.size() > 1) return evaluate_batch_parallel(solutions, spec);
  return evaluate_batch_serial(solutions, spec);
}

}  // namespace moqd::kernels
