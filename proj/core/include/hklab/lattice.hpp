#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hklab/point.hpp"

namespace hklab {

/// Axis-aligned box [lower, upper) of integer labels. With scale rho the labels u stand for
/// the points u / rho of rho^{-1} Z^d, each carrying mass rho^{-d}.
class LatticeWindow {
 public:
  LatticeWindow(Point lower, Point upper, std::int64_t scale = 1);

  int dim() const { return lower_.dim; }
  std::int64_t scale() const { return scale_; }
  const Point& lower() const { return lower_; }
  const Point& upper() const { return upper_; }
  std::size_t size() const { return size_; }
  double site_mass() const { return site_mass_; }
  double measure() const { return static_cast<double>(size_) * site_mass_; }

  bool contains(const Point& p) const;
  std::size_t index(const Point& p) const;
  std::optional<std::size_t> try_index(const Point& p) const;
  Point point(std::size_t index) const;

  /// Point closest to the geometric centre (rounded toward lower).
  Point center() const;

  std::string describe() const;

  friend bool operator==(const LatticeWindow& a, const LatticeWindow& b) {
    return a.lower_ == b.lower_ && a.upper_ == b.upper_ && a.scale_ == b.scale_;
  }

 private:
  Point lower_;
  Point upper_;
  std::int64_t scale_;
  std::array<std::size_t, kMaxDim> stride_{};
  std::size_t size_ = 0;
  double site_mass_ = 1.0;
};

LatticeWindow make_window(const Point& lower, const Point& upper, std::int64_t scale = 1);

/// Symmetric box [-half, half]^d.
LatticeWindow centered_window(int dim, std::int64_t half, std::int64_t scale = 1);

/// Geometric set descriptor. Radii and centres are in the rescaled geometry: a centre is an
/// integer label (u standing for u / rho) and the radius is measured in units of rho^{-1} Z^d
/// lattice distance, i.e. Ball(x, r) = { y : |y - x| / rho < r }.
struct SetDescriptor {
  enum class Shape { Ball, Cube, Explicit };
  Shape shape = Shape::Explicit;
  Point center;
  double radius = 0.0;

  static SetDescriptor ball(Point c, double r) { return {Shape::Ball, std::move(c), r}; }
  static SetDescriptor cube(Point c, double r) { return {Shape::Cube, std::move(c), r}; }
  std::string describe() const;
};

class LatticeSet {
 public:
  LatticeSet(const LatticeWindow& window, std::vector<bool> members, SetDescriptor descriptor, bool clipped = false);

  const LatticeWindow& window() const { return window_; }
  const SetDescriptor& descriptor() const { return descriptor_; }
  bool clipped() const { return clipped_; }
  bool contains(const Point& p) const;
  bool contains_index(std::size_t i) const { return members_[i]; }
  std::size_t count() const { return count_; }
  double measure() const { return static_cast<double>(count_) * window_.site_mass(); }
  bool empty() const { return count_ == 0; }

  /// Window indices of the members in increasing order.
  std::vector<std::size_t> indices() const;
  std::vector<Point> points() const;

  LatticeSet set_union(const LatticeSet& other) const;
  LatticeSet set_intersection(const LatticeSet& other) const;
  bool subset_of(const LatticeSet& other) const;

  static LatticeSet from_points(const LatticeWindow& window, const std::vector<Point>& pts);

 private:
  LatticeWindow window_;
  std::vector<bool> members_;
  SetDescriptor descriptor_;
  bool clipped_ = false;
  std::size_t count_ = 0;
};

/// Builds Ball / Cube membership inside the window. The open ball uses the Euclidean norm, the
/// open cube of side 2r the max norm. Sets reaching outside the window are clipped and flagged.
LatticeSet make_set(const LatticeWindow& window, const SetDescriptor& descriptor);

/// Whether the full (unclipped) set fits inside the window.
bool set_fits(const LatticeWindow& window, const SetDescriptor& descriptor);

/// All lattice labels of the open ball / cube without reference to any window.
std::vector<Point> enumerate_set(int dim, std::int64_t scale, const SetDescriptor& descriptor);

/// Smallest window that contains the set.
LatticeWindow bounding_window(int dim, std::int64_t scale, const SetDescriptor& descriptor);

}  // namespace hklab
