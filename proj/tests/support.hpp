#pragma once

// Independent oracles and random generators shared by the unit tests and
// the acceptance binary. Nothing here calls into the library's hypervolume
// or dominance code.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace moqd::testing {

using Vec = std::vector<double>;

inline bool oracle_weakly_dominates(std::span<const double> a, std::span<const double> b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] < b[i]) return false;
  return true;
}

inline bool oracle_covered(const std::vector<Vec>& front, std::span<const double> p) {
  for (const Vec& q : front)
    if (oracle_weakly_dominates(q, p)) return true;
  return false;
}

struct McEstimate {
  double value = 0.0;
  double standard_error = 0.0;
};

// Uniform samples in the box [ref, max_i]; hits are points dominated by
// some member.
inline McEstimate monte_carlo_hypervolume(const std::vector<Vec>& front, std::span<const double> ref,
                                          std::size_t samples, std::mt19937_64& rng) {
  if (front.empty()) return {};
  const std::size_t k = ref.size();
  Vec hi(ref.begin(), ref.end());
  for (const Vec& p : front)
    for (std::size_t j = 0; j < k; ++j) hi[j] = std::max(hi[j], p[j]);
  double box = 1.0;
  for (std::size_t j = 0; j < k; ++j) box *= hi[j] - ref[j];
  if (box == 0.0) return {};

  std::vector<std::uniform_real_distribution<double>> axes;
  for (std::size_t j = 0; j < k; ++j) axes.emplace_back(ref[j], hi[j]);
  Vec x(k);
  std::size_t hits = 0;
  for (std::size_t s = 0; s < samples; ++s) {
    for (std::size_t j = 0; j < k; ++j) x[j] = axes[j](rng);
    if (oracle_covered(front, x)) ++hits;
  }
  const double p = static_cast<double>(hits) / static_cast<double>(samples);
  return {p * box, box * std::sqrt(p * (1.0 - p) / static_cast<double>(samples))};
}

// Exact two-objective hypervolume by inclusion of sorted strips, written
// independently of the library sweep.
inline double strip_hypervolume_2d(std::vector<Vec> front, std::span<const double> ref) {
  std::sort(front.begin(), front.end(), [](const Vec& a, const Vec& b) { return a[0] > b[0]; });
  double area = 0.0;
  double best_y = ref[1];
  for (const Vec& p : front) {
    if (p[1] > best_y) {
      area += (p[0] - ref[0]) * (p[1] - best_y);
      best_y = p[1];
    }
  }
  return area;
}

// Mutually non-dominated points: positive-orthant sphere of radius 99 pushed
// through per-axis monotone maps, which preserve dominance.
inline std::vector<Vec> random_front(std::size_t k, std::size_t size, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> gamma(0.5, 2.0);
  Vec exponents(k);
  for (double& e : exponents) e = gamma(rng);
  std::vector<Vec> front;
  while (front.size() < size) {
    Vec u(k);
    double norm = 0.0;
    for (double& v : u) {
      v = std::abs(normal(rng));
      norm += v * v;
    }
    norm = std::sqrt(norm);
    if (norm == 0.0) continue;
    for (std::size_t j = 0; j < k; ++j) u[j] = 100.0 * std::pow(0.99 * u[j] / norm, exponents[j]);
    front.push_back(std::move(u));
  }
  return front;
}

// Arbitrary points (dominated ones included), optionally snapped to a coarse
// grid so that ties and duplicates show up.
inline std::vector<Vec> random_points(std::size_t k, std::size_t size, std::mt19937_64& rng, bool grid = false) {
  std::uniform_real_distribution<double> u(0.0, 100.0);
  std::uniform_int_distribution<int> g(0, 10);
  std::vector<Vec> pts(size, Vec(k));
  for (Vec& p : pts)
    for (double& v : p) v = grid ? 10.0 * g(rng) : u(rng);
  return pts;
}

inline Vec random_point(std::size_t k, std::mt19937_64& rng, double lo = 0.0, double hi = 100.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Vec p(k);
  for (double& v : p) v = u(rng);
  return p;
}

}  // namespace moqd::testing
