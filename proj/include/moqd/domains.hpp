#pragma once

// Benchmark domains: shifted sphere and rastrigin with clip measures, and
// the planar arm. Objectives are normalized to [0, 100] so the zero vector is
// a valid reference point.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "moqd/pareto.hpp"

namespace moqd {

using MeasureVector = std::vector<double>;

enum class DomainKind { sphere, rastrigin, arm };

std::string to_string(DomainKind kind);
DomainKind parse_domain_kind(const std::string& name);

struct Bounds {
  std::vector<double> low;
  std::vector<double> high;
};

struct DomainSpec {
  DomainKind kind = DomainKind::sphere;
  std::size_t dimension = 100;
  // One shift per objective (sphere and rastrigin only).
  std::vector<double> shifts{4.0, -4.0};
  double link_length = 1.0;

  /// Shifts {4, -4} for two objectives, {4, 0, -4} for three.
  static DomainSpec make(DomainKind kind, std::size_t dimension, std::size_t objectives);

  std::size_t objectives() const;

  /// Raw-unit span B(n) mapped onto [0, 100].
  double normalization_bound() const;

  /// Box holding every reachable measure, used to tessellate the archive.
  Bounds measure_bounds() const;

  void validate() const;
};

struct Evaluation {
  ObjectiveVector objectives;
  MeasureVector measures;
  bool failed = false;
};

inline constexpr double kClipBound = 5.12;
inline constexpr double kSphereBoundPerDim = 38.9376;
inline constexpr double kRastriginBoundPerDim = 202.1497;
inline constexpr double kArmVarianceBound = 6.58;

/// x inside [-5.12, 5.12], otherwise 5.12 / x.
double clip(double x);

/// Un-normalized objectives, one per shift.
ObjectiveVector sphere_raw(std::span<const double> x, std::span<const double> shifts);
ObjectiveVector rastrigin_raw(std::span<const double> x, std::span<const double> shifts);

Evaluation eval_sphere(std::span<const double> x, const DomainSpec& spec);
Evaluation eval_rastrigin(std::span<const double> x, const DomainSpec& spec);
Evaluation eval_arm(std::span<const double> x, const DomainSpec& spec);

Evaluation evaluate(std::span<const double> x, const DomainSpec& spec);

}  // namespace moqd
