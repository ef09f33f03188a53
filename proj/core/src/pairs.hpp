#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "hklab/conductance.hpp"
#include "hklab/lattice.hpp"

namespace hklab::detail {

/// Calls fn(i, j, C) once for every unordered pair i < j of listed window indices with
/// positive conductance. `lambda` (in label units) drops pairs farther apart than it.
template <typename Fn>
void for_each_pair(const ConductanceModel& model, const LatticeWindow& window, const std::vector<std::size_t>& sites,
                   double lambda, Fn&& fn) {
  const double range = std::min(model.range(), lambda);
  std::vector<std::ptrdiff_t> slot(window.size(), -1);
  for (std::size_t k = 0; k < sites.size(); ++k) slot[sites[k]] = static_cast<std::ptrdiff_t>(k);

  // Short-range models: walk the displacement list instead of all pairs.
  std::vector<Point> offsets;
  bool sparse = false;
  if (std::isfinite(range)) {
    std::size_t count = 0;
    model.for_each_displacement(range, [&](const Point&, double) { ++count; });
    if (count < sites.size() / 2 + 1) {
      sparse = true;
      model.for_each_displacement(range, [&](const Point& z, double) { offsets.push_back(z); });
    }
  }
  if (sparse) {
    for (std::size_t i : sites) {
      const Point x = window.point(i);
      for (const auto& z : offsets) {
        auto j = window.try_index(x + z);
        if (!j || *j <= i || slot[*j] < 0) continue;
        const double c = model.rate(x, x + z);
        if (c > 0.0) fn(i, *j, c);
      }
    }
    return;
  }
  std::vector<Point> pts;
  pts.reserve(sites.size());
  for (std::size_t i : sites) pts.push_back(window.point(i));
  const double lambda2 = lambda * lambda;
  for (std::size_t a = 0; a < sites.size(); ++a) {
    for (std::size_t b = a + 1; b < sites.size(); ++b) {
      if (std::isfinite(lambda) && (pts[b] - pts[a]).norm2() > lambda2) continue;
      const double c = model.rate(pts[a], pts[b]);
      if (c <= 0.0) continue;
      if (sites[a] < sites[b]) fn(sites[a], sites[b], c);
      else fn(sites[b], sites[a], c);
    }
  }
}

inline std::vector<std::size_t> all_sites(const LatticeWindow& window) {
  std::vector<std::size_t> s(window.size());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = i;
  return s;
}

}  // namespace hklab::detail
