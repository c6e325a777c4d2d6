#pragma once

// Dominance, Pareto fronts, crowding distance and exact hypervolume for
// two and three maximized objectives.

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "moqd/errors.hpp"

namespace moqd {

using ObjectiveVector = std::vector<double>;

// Mutually non-dominated objective vectors, kept in insertion order.
using Front = std::vector<ObjectiveVector>;

/// True iff a >= b componentwise and a > b in at least one component.
bool dominates(std::span<const double> a, std::span<const double> b);

/// True iff a >= b componentwise (includes equality).
bool weakly_dominates(std::span<const double> a, std::span<const double> b);

/// True iff some member of the front weakly dominates p.
bool weakly_dominated_by(const Front& front, std::span<const double> p);

/// Inserts p unless a member weakly dominates it, erasing every member p
/// dominates. `on_erase(i)` is called with the index of each erased member
/// before it is removed (indices arrive in descending order), so callers
/// can keep parallel payload arrays in sync.
template <class OnErase>
bool insert_nondominated(Front& front, std::span<const double> p, OnErase&& on_erase) {
  if (weakly_dominated_by(front, p)) return false;
  for (std::size_t i = front.size(); i-- > 0;) {
    if (dominates(p, front[i])) {
      on_erase(i);
      front.erase(front.begin() + static_cast<std::ptrdiff_t>(i));
    }
  }
  front.emplace_back(p.begin(), p.end());
  return true;
}

inline bool insert_nondominated(Front& front, std::span<const double> p) {
  return insert_nondominated(front, p, [](std::size_t) {});
}

/// Lebesgue measure of the union of boxes [ref, p] over the front.
///
/// Points only need to weakly dominate `ref`; dominated members are
/// tolerated and contribute nothing. Throws ContractViolation for a
/// component below the reference or k outside {2, 3}.
double hypervolume(const Front& front, std::span<const double> ref);

/// Hypervolume gained by adding p to the front. Exactly 0 when p is weakly
/// dominated by the front, strictly positive otherwise.
double hvi(std::span<const double> p, const Front& front, std::span<const double> ref);

/// NSGA-II crowding distance per member. Extremes of every objective with a
/// non-zero range get +infinity; fronts of one or two points are all
/// infinite.
std::vector<double> crowding_distances(const Front& front);

/// Index of the member with the smallest crowding distance; ties go to the
/// earliest member.
std::size_t most_crowded(const Front& front);

/// Drops most-crowded members (recomputing distances after every drop)
/// until the front holds at most `limit` points.
template <class OnErase>
void downsize(Front& front, std::size_t limit, OnErase&& on_erase) {
  if (limit < 2) throw ContractViolation("downsize: limit must be at least 2");
  while (front.size() > limit) {
    const std::size_t victim = most_crowded(front);
    on_erase(victim);
    front.erase(front.begin() + static_cast<std::ptrdiff_t>(victim));
  }
}

inline void downsize(Front& front, std::size_t limit) {
  downsize(front, limit, [](std::size_t) {});
}

}  // namespace moqd
