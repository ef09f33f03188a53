#include "hklab/lattice.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace hklab {

namespace {

// Largest integer k with k < bound (bound > 0).
std::int64_t strict_reach(double bound) {
  auto k = static_cast<std::int64_t>(std::ceil(bound)) - 1;
  return std::max<std::int64_t>(k, 0);
}

bool in_shape(const SetDescriptor& d, std::int64_t scale, const Point& y) {
  const Point z = y - d.center;
  const double lim = d.radius * static_cast<double>(scale);
  if (d.shape == SetDescriptor::Shape::Ball) return z.norm2() < lim * lim;
  return static_cast<double>(z.max_norm()) < lim;
}

}  // namespace

LatticeWindow::LatticeWindow(Point lower, Point upper, std::int64_t scale)
    : lower_(std::move(lower)), upper_(std::move(upper)), scale_(scale) {
  if (lower_.dim != upper_.dim || lower_.dim < 1) throw ConfigError("window corners must share a dimension");
  if (scale_ < 1) throw ConfigError("window scale must be a positive integer");
  std::size_t total = 1;
  for (int i = lower_.dim - 1; i >= 0; --i) {
    if (!(lower_[i] < upper_[i])) throw ConfigError("window requires lower < upper componentwise");
    const auto extent = static_cast<std::uint64_t>(upper_[i] - lower_[i]);
    stride_[static_cast<std::size_t>(i)] = total;
    if (extent > std::numeric_limits<std::size_t>::max() / total) throw ConfigError("window site count overflows");
    total *= static_cast<std::size_t>(extent);
  }
  size_ = total;
  site_mass_ = std::pow(static_cast<double>(scale_), -static_cast<double>(lower_.dim));
}

LatticeWindow make_window(const Point& lower, const Point& upper, std::int64_t scale) {
  return LatticeWindow(lower, upper, scale);
}

LatticeWindow centered_window(int dim, std::int64_t half, std::int64_t scale) {
  Point lo(dim), hi(dim);
  for (int i = 0; i < dim; ++i) {
    lo[i] = -half;
    hi[i] = half + 1;
  }
  return LatticeWindow(lo, hi, scale);
}

bool LatticeWindow::contains(const Point& p) const {
  if (p.dim != dim()) return false;
  for (int i = 0; i < dim(); ++i)
    if (p[i] < lower_[i] || p[i] >= upper_[i]) return false;
  return true;
}

std::optional<std::size_t> LatticeWindow::try_index(const Point& p) const {
  if (!contains(p)) return std::nullopt;
  std::size_t idx = 0;
  for (int i = 0; i < dim(); ++i) idx += static_cast<std::size_t>(p[i] - lower_[i]) * stride_[static_cast<std::size_t>(i)];
  return idx;
}

std::size_t LatticeWindow::index(const Point& p) const {
  auto idx = try_index(p);
  if (!idx) throw DomainError("point " + p.to_string() + " outside window " + describe());
  return *idx;
}

Point LatticeWindow::point(std::size_t index) const {
  if (index >= size_) throw DomainError("window index out of range");
  Point p(dim());
  for (int i = 0; i < dim(); ++i) {
    const std::size_t s = stride_[static_cast<std::size_t>(i)];
    p[i] = lower_[i] + static_cast<std::int64_t>(index / s);
    index %= s;
  }
  return p;
}

Point LatticeWindow::center() const {
  Point p(dim());
  for (int i = 0; i < dim(); ++i) p[i] = lower_[i] + (upper_[i] - 1 - lower_[i]) / 2;
  return p;
}

std::string LatticeWindow::describe() const {
  std::ostringstream os;
  os << "[" << lower_.to_string() << "," << upper_.to_string() << ")";
  if (scale_ != 1) os << "/rho=" << scale_;
  return os.str();
}

std::string SetDescriptor::describe() const {
  std::ostringstream os;
  os.precision(12);
  switch (shape) {
    case Shape::Ball: os << "Ball(" << center.to_string() << "," << radius << ")"; break;
    case Shape::Cube: os << "Cube(" << center.to_string() << "," << radius << ")"; break;
    case Shape::Explicit: os << "Explicit"; break;
  }
  return os.str();
}

LatticeSet::LatticeSet(const LatticeWindow& window, std::vector<bool> members, SetDescriptor descriptor, bool clipped)
    : window_(window), members_(std::move(members)), descriptor_(std::move(descriptor)), clipped_(clipped) {
  if (members_.size() != window_.size()) throw ConfigError("membership mask does not match window size");
  for (bool b : members_) count_ += b ? 1 : 0;
}

bool LatticeSet::contains(const Point& p) const {
  auto idx = window_.try_index(p);
  return idx && members_[*idx];
}

std::vector<std::size_t> LatticeSet::indices() const {
  std::vector<std::size_t> out;
  out.reserve(count_);
  for (std::size_t i = 0; i < members_.size(); ++i)
    if (members_[i]) out.push_back(i);
  return out;
}

std::vector<Point> LatticeSet::points() const {
  std::vector<Point> out;
  out.reserve(count_);
  for (std::size_t i = 0; i < members_.size(); ++i)
    if (members_[i]) out.push_back(window_.point(i));
  return out;
}

LatticeSet LatticeSet::set_union(const LatticeSet& other) const {
  if (!(window_ == other.window_)) throw DomainError("set operations need a shared window");
  std::vector<bool> m(members_.size());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = members_[i] || other.members_[i];
  return LatticeSet(window_, std::move(m), SetDescriptor{});
}

LatticeSet LatticeSet::set_intersection(const LatticeSet& other) const {
  if (!(window_ == other.window_)) throw DomainError("set operations need a shared window");
  std::vector<bool> m(members_.size());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = members_[i] && other.members_[i];
  return LatticeSet(window_, std::move(m), SetDescriptor{});
}

bool LatticeSet::subset_of(const LatticeSet& other) const {
  for (std::size_t i = 0; i < members_.size(); ++i)
    if (members_[i] && !other.contains(window_.point(i))) return false;
  return true;
}

LatticeSet LatticeSet::from_points(const LatticeWindow& window, const std::vector<Point>& pts) {
  std::vector<bool> m(window.size(), false);
  bool clipped = false;
  for (const auto& p : pts) {
    if (auto idx = window.try_index(p)) m[*idx] = true;
    else clipped = true;
  }
  return LatticeSet(window, std::move(m), SetDescriptor{}, clipped);
}

std::vector<Point> enumerate_set(int dim, std::int64_t scale, const SetDescriptor& d) {
  if (d.shape == SetDescriptor::Shape::Explicit) throw DomainError("explicit sets cannot be enumerated from a descriptor");
  if (d.center.dim != dim) throw ConfigError("set centre dimension mismatch");
  const std::int64_t reach = d.radius > 0.0 ? strict_reach(d.radius * static_cast<double>(scale)) : -1;
  std::vector<Point> out;
  if (reach < 0) return out;
  Point z(dim);
  for (int i = 0; i < dim; ++i) z[i] = -reach;
  while (true) {
    const Point y = d.center + z;
    if (in_shape(d, scale, y)) out.push_back(y);
    int axis = dim - 1;
    while (axis >= 0 && z[axis] == reach) {
      z[axis] = -reach;
      --axis;
    }
    if (axis < 0) break;
    ++z[axis];
  }
  return out;
}

LatticeWindow bounding_window(int dim, std::int64_t scale, const SetDescriptor& d) {
  const std::int64_t reach = strict_reach(d.radius * static_cast<double>(scale));
  Point lo(dim), hi(dim);
  for (int i = 0; i < dim; ++i) {
    lo[i] = d.center[i] - reach;
    hi[i] = d.center[i] + reach + 1;
  }
  return LatticeWindow(lo, hi, scale);
}

bool set_fits(const LatticeWindow& window, const SetDescriptor& d) {
  for (const auto& p : enumerate_set(window.dim(), window.scale(), d))
    if (!window.contains(p)) return false;
  return true;
}

LatticeSet make_set(const LatticeWindow& window, const SetDescriptor& d) {
  if (d.shape == SetDescriptor::Shape::Explicit) throw DomainError("use LatticeSet::from_points for explicit sets");
  if (!window.contains(d.center)) throw DomainError("set centre " + d.center.to_string() + " outside window");
  std::vector<bool> m(window.size(), false);
  bool clipped = false;
  for (const auto& p : enumerate_set(window.dim(), window.scale(), d)) {
    if (auto idx = window.try_index(p)) m[*idx] = true;
    else clipped = true;
  }
  return LatticeSet(window, std::move(m), d, clipped);
}

}  // namespace hklab
