#include "moqd/pareto.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <limits>
#include <map>
#include <numeric>
#include <string>

namespace moqd {
namespace {

void require_same_length(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw ContractViolation("objective length mismatch: " + std::to_string(a.size()) + " vs " +
                            std::to_string(b.size()));
  }
}

void require_above_reference(std::span<const double> p, std::span<const double> ref) {
  require_same_length(p, ref);
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!(p[i] >= ref[i])) {
      throw ContractViolation("point component " + std::to_string(i) + " lies below the reference");
    }
  }
}

// Union area of boxes [ref, (x, y)] maintained under insertion. Stored points
// have ascending x and strictly descending y.
class Staircase {
 public:
  Staircase(double ref_x, double ref_y) : ref_x_(ref_x), ref_y_(ref_y) {}

  void insert(double x, double y) {
    auto right = points_.lower_bound(x);
    if (right != points_.end() && right->second >= y) return;

    double height = right != points_.end() ? right->second : ref_y_;
    double edge = x;
    double added = 0.0;
    auto erase_from = points_.begin();
    bool blocked = false;
    for (auto it = right; it != points_.begin();) {
      --it;
      added += (edge - it->first) * (y - height);
      if (it->second >= y) {
        erase_from = std::next(it);
        blocked = true;
        break;
      }
      height = it->second;
      edge = it->first;
    }
    if (!blocked) added += (edge - ref_x_) * (y - height);

    auto erase_to = right;
    if (right != points_.end() && right->first == x) ++erase_to;
    points_.erase(erase_from, erase_to);
    points_.emplace(x, y);
    area_ += added;
  }

  double area() const { return area_; }

 private:
  double ref_x_;
  double ref_y_;
  double area_ = 0.0;
  std::map<double, double> points_;
};

double hypervolume_2d(const Front& front, std::span<const double> ref) {
  std::vector<std::size_t> order(front.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (front[a][0] != front[b][0]) return front[a][0] > front[b][0];
    return front[a][1] > front[b][1];
  });
  double volume = 0.0;
  double covered_y = ref[1];
  for (std::size_t idx : order) {
    const auto& p = front[idx];
    if (p[1] > covered_y) {
      volume += (p[0] - ref[0]) * (p[1] - covered_y);
      covered_y = p[1];
    }
  }
  return volume;
}

// Sweep downward along the third objective, growing the 2-D staircase of
// the projected points seen so far.
double hypervolume_3d(const Front& front, std::span<const double> ref) {
  std::vector<std::size_t> order(front.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return front[a][2] > front[b][2]; });
  Staircase slice(ref[0], ref[1]);
  double volume = 0.0;
  double previous_z = 0.0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto& p = front[order[i]];
    if (i > 0) volume += slice.area() * (previous_z - p[2]);
    slice.insert(p[0], p[1]);
    previous_z = p[2];
  }
  if (!order.empty()) volume += slice.area() * (previous_z - ref[2]);
  return volume;
}

}  // namespace

bool dominates(std::span<const double> a, std::span<const double> b) {
  require_same_length(a, b);
  bool strictly = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] < b[i]) return false;
    if (a[i] > b[i]) strictly = true;
  }
  return strictly;
}

bool weakly_dominates(std::span<const double> a, std::span<const double> b) {
  require_same_length(a, b);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] < b[i]) return false;
  }
  return true;
}

bool weakly_dominated_by(const Front& front, std::span<const double> p) {
  return std::any_of(front.begin(), front.end(),
                     [&](const ObjectiveVector& q) { return weakly_dominates(q, p); });
}

double hypervolume(const Front& front, std::span<const double> ref) {
  if (ref.size() != 2 && ref.size() != 3) {
    throw ContractViolation("hypervolume supports 2 or 3 objectives, got " + std::to_string(ref.size()));
  }
  for (const auto& p : front) require_above_reference(p, ref);
  if (front.empty()) return 0.0;
  return ref.size() == 2 ? hypervolume_2d(front, ref) : hypervolume_3d(front, ref);
}

double hvi(std::span<const double> p, const Front& front, std::span<const double> ref) {
  require_above_reference(p, ref);
  if (weakly_dominated_by(front, p)) return 0.0;

  // Volume of [ref, p] minus the part of it the front already covers.
  double box = 1.0;
  for (std::size_t i = 0; i < p.size(); ++i) box *= p[i] - ref[i];
  Front clipped;
  clipped.reserve(front.size());
  for (const auto& q : front) {
    ObjectiveVector c(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) c[i] = std::min(q[i], p[i]);
    clipped.push_back(std::move(c));
  }
  return std::max(0.0, box - hypervolume(clipped, ref));
}

std::vector<double> crowding_distances(const Front& front) {
  const std::size_t n = front.size();
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (n <= 2) return std::vector<double>(n, inf);

  std::vector<double> distance(n, 0.0);
  std::vector<std::size_t> order(n);
  const std::size_t k = front.front().size();
  for (std::size_t m = 0; m < k; ++m) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return front[a][m] < front[b][m]; });
    const double lo = front[order.front()][m];
    const double hi = front[order.back()][m];
    if (hi == lo) continue;
    distance[order.front()] = inf;
    distance[order.back()] = inf;
    for (std::size_t j = 1; j + 1 < n; ++j) {
      distance[order[j]] += (front[order[j + 1]][m] - front[order[j - 1]][m]) / (hi - lo);
    }
  }
  return distance;
}

std::size_t most_crowded(const Front& front) {
  if (front.empty()) throw ContractViolation("most_crowded: empty front");
  const auto distance = crowding_distances(front);
  return static_cast<std::size_t>(std::min_element(distance.begin(), distance.end()) - distance.begin());
}

}  // namespace moqd
