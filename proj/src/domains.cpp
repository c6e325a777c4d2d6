#include "moqd/domains.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "moqd/errors.hpp"

namespace moqd {
namespace {

double clamp_percent(double v) { return std::clamp(v, 0.0, 100.0); }

MeasureVector clip_measures(std::span<const double> x) {
  const std::size_t half = x.size() / 2;
  double first = 0.0;
  double second = 0.0;
  for (std::size_t i = 0; i < half; ++i) first += clip(x[i]);
  for (std::size_t i = half; i < x.size(); ++i) second += clip(x[i]);
  return {first, second};
}

void require_dimension(std::span<const double> x, const DomainSpec& spec) {
  if (x.size() != spec.dimension) {
    throw ContractViolation("solution has " + std::to_string(x.size()) + " coordinates, domain expects " +
                            std::to_string(spec.dimension));
  }
}

double population_variance(std::span<const double> v) {
  double mean = 0.0;
  for (double e : v) mean += e;
  mean /= static_cast<double>(v.size());
  double acc = 0.0;
  for (double e : v) acc += (e - mean) * (e - mean);
  return acc / static_cast<double>(v.size());
}

}  // namespace

std::string to_string(DomainKind kind) {
  switch (kind) {
    case DomainKind::sphere: return "sphere";
    case DomainKind::rastrigin: return "rastrigin";
    case DomainKind::arm: return "arm";
  }
  return "unknown";
}

DomainKind parse_domain_kind(const std::string& name) {
  if (name == "sphere") return DomainKind::sphere;
  if (name == "rastrigin") return DomainKind::rastrigin;
  if (name == "arm") return DomainKind::arm;
  throw ConfigError("unknown domain '" + name + "'");
}

DomainSpec DomainSpec::make(DomainKind kind, std::size_t dimension, std::size_t objectives) {
  DomainSpec spec;
  spec.kind = kind;
  spec.dimension = dimension;
  if (objectives == 3) {
    spec.shifts = {4.0, 0.0, -4.0};
  } else if (objectives == 2) {
    spec.shifts = {4.0, -4.0};
  } else {
    throw ConfigError("objectives must be 2 or 3");
  }
  spec.validate();
  return spec;
}

std::size_t DomainSpec::objectives() const { return kind == DomainKind::arm ? 2 : shifts.size(); }

double DomainSpec::normalization_bound() const {
  const double n = static_cast<double>(dimension);
  switch (kind) {
    case DomainKind::sphere: return kSphereBoundPerDim * n;
    case DomainKind::rastrigin: return kRastriginBoundPerDim * n;
    case DomainKind::arm: return kArmVarianceBound;
  }
  return 0.0;
}

Bounds DomainSpec::measure_bounds() const {
  if (kind == DomainKind::arm) {
    const double radius = static_cast<double>(dimension) * link_length;
    return {{-radius, -radius}, {radius, radius}};
  }
  const double extent = kClipBound * static_cast<double>(dimension / 2);
  return {{-extent, -extent}, {extent, extent}};
}

void DomainSpec::validate() const {
  if (dimension < 2 || dimension % 2 != 0) throw ConfigError("domain dimension must be even and at least 2");
  if (kind == DomainKind::arm) {
    if (shifts.size() == 3) throw ConfigError("the arm domain has exactly two objectives");
    if (!(link_length > 0.0)) throw ConfigError("arm link length must be positive");
    return;
  }
  if (shifts.size() != 2 && shifts.size() != 3) throw ConfigError("sphere/rastrigin need 2 or 3 shifts");
  if (std::set<double>(shifts.begin(), shifts.end()).size() != shifts.size()) {
    throw ConfigError("domain shifts must be distinct");
  }
}

double clip(double x) {
  if (x >= -kClipBound && x <= kClipBound) return x;
  return kClipBound / x;
}

ObjectiveVector sphere_raw(std::span<const double> x, std::span<const double> shifts) {
  ObjectiveVector raw;
  raw.reserve(shifts.size());
  for (double shift : shifts) {
    double acc = 0.0;
    for (double xi : x) acc -= (xi - shift) * (xi - shift);
    raw.push_back(acc);
  }
  return raw;
}

ObjectiveVector rastrigin_raw(std::span<const double> x, std::span<const double> shifts) {
  ObjectiveVector raw;
  raw.reserve(shifts.size());
  for (double shift : shifts) {
    double acc = 0.0;
    for (double xi : x) {
      const double d = xi - shift;
      acc += 10.0 * std::cos(2.0 * std::numbers::pi * d) - d * d;
    }
    raw.push_back(acc);
  }
  return raw;
}

Evaluation eval_sphere(std::span<const double> x, const DomainSpec& spec) {
  require_dimension(x, spec);
  const double bound = spec.normalization_bound();
  Evaluation out;
  out.objectives = sphere_raw(x, spec.shifts);
  for (double& v : out.objectives) v = clamp_percent(100.0 * (1.0 + v / bound));
  out.measures = clip_measures(x);
  return out;
}

Evaluation eval_rastrigin(std::span<const double> x, const DomainSpec& spec) {
  require_dimension(x, spec);
  const double bound = spec.normalization_bound();
  Evaluation out;
  out.objectives = rastrigin_raw(x, spec.shifts);
  for (double& v : out.objectives) v = clamp_percent(100.0 * (v + bound) / bound);
  out.measures = clip_measures(x);
  return out;
}

Evaluation eval_arm(std::span<const double> x, const DomainSpec& spec) {
  require_dimension(x, spec);
  const std::size_t half = x.size() / 2;
  const double raw_first = -population_variance(x.subspan(0, half));
  const double raw_second = -population_variance(x.subspan(half));

  Evaluation out;
  out.failed = raw_first < -kArmVarianceBound || raw_second < -kArmVarianceBound;
  out.objectives = {clamp_percent(100.0 * (1.0 + raw_first / kArmVarianceBound)),
                    clamp_percent(100.0 * (1.0 + raw_second / kArmVarianceBound))};

  double angle = 0.0;
  double tip_x = 0.0;
  double tip_y = 0.0;
  for (double joint : x) {
    angle += joint;
    tip_x += spec.link_length * std::cos(angle);
    tip_y += spec.link_length * std::sin(angle);
  }
  out.measures = {tip_x, tip_y};
  return out;
}

Evaluation evaluate(std::span<const double> x, const DomainSpec& spec) {
  switch (spec.kind) {
    case DomainKind::sphere: return eval_sphere(x, spec);
    case DomainKind::rastrigin: return eval_rastrigin(x, spec);
    case DomainKind::arm: return eval_arm(x, spec);
  }
  throw ContractViolation("unknown domain kind");
}

}  // namespace moqd
