#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <stdexcept>
#include <string>

namespace hklab {

inline constexpr int kMaxDim = 4;

/// Raised for malformed models, windows and experiment configs.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when an operation is called outside its domain (x not in B, f == 0, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A point of Z^d, d <= kMaxDim. Unused trailing coordinates stay zero so that
/// equality and hashing only depend on the meaningful part.
struct Point {
  std::array<std::int64_t, kMaxDim> c{};
  int dim = 0;

  Point() = default;
  explicit Point(int d) : dim(d) {
    if (d < 1 || d > kMaxDim) throw ConfigError("point dimension out of range: " + std::to_string(d));
  }
  Point(std::initializer_list<std::int64_t> coords) : dim(static_cast<int>(coords.size())) {
    if (dim < 1 || dim > kMaxDim) throw ConfigError("point dimension out of range");
    int i = 0;
    for (auto v : coords) c[static_cast<std::size_t>(i++)] = v;
  }

  static Point origin(int d) { return Point(d); }
  static Point unit(int d, int axis, std::int64_t step = 1) {
    Point p(d);
    p[axis] = step;
    return p;
  }

  std::int64_t& operator[](int i) { return c[static_cast<std::size_t>(i)]; }
  std::int64_t operator[](int i) const { return c[static_cast<std::size_t>(i)]; }

  friend bool operator==(const Point&, const Point&) = default;

  Point operator+(const Point& o) const {
    Point r(*this);
    for (int i = 0; i < dim; ++i) r[i] += o[i];
    return r;
  }
  Point operator-(const Point& o) const {
    Point r(*this);
    for (int i = 0; i < dim; ++i) r[i] -= o[i];
    return r;
  }
  Point operator-() const {
    Point r(*this);
    for (int i = 0; i < dim; ++i) r[i] = -r[i];
    return r;
  }

  /// |p|^2, exact as long as coordinates stay below ~2^31.
  double norm2() const {
    double s = 0.0;
    for (int i = 0; i < dim; ++i) s += static_cast<double>(c[static_cast<std::size_t>(i)]) * static_cast<double>(c[static_cast<std::size_t>(i)]);
    return s;
  }
  double norm() const { return std::sqrt(norm2()); }
  /// Cube (sup) norm |p|_m.
  std::int64_t max_norm() const {
    std::int64_t m = 0;
    for (int i = 0; i < dim; ++i) m = std::max(m, c[static_cast<std::size_t>(i)] < 0 ? -c[static_cast<std::size_t>(i)] : c[static_cast<std::size_t>(i)]);
    return m;
  }

  std::string to_string() const {
    std::string s = "(";
    for (int i = 0; i < dim; ++i) {
      if (i) s += ",";
      s += std::to_string(c[static_cast<std::size_t>(i)]);
    }
    return s + ")";
  }
};

struct PointHash {
  std::size_t operator()(const Point& p) const noexcept {
    std::uint64_t h = 0x9E3779B97F4A7C15ULL ^ static_cast<std::uint64_t>(p.dim);
    for (int i = 0; i < p.dim; ++i) {
      h ^= static_cast<std::uint64_t>(p[i]) + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
  }
};

}  // namespace hklab
