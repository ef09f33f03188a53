#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "hklab/point.hpp"

namespace hklab {

enum class ModelKind { StableLike, AxisStableLike, SparseLongRange, Table };

std::string_view to_string(ModelKind kind);
ModelKind parse_model_kind(std::string_view name);

/// Bounded symmetric coefficient c(x,y) in [lo, hi].
struct WeightFunction {
  enum class Shape { Constant, Oscillating };
  Shape shape = Shape::Constant;
  double lo = 1.0;
  double hi = 1.0;

  static WeightFunction constant(double c) { return {Shape::Constant, c, c}; }
  /// lo + (hi - lo) (1 + cos(sum_i (x_i + y_i))) / 2; symmetric and deterministic.
  static WeightFunction oscillating(double lo, double hi) { return {Shape::Oscillating, lo, hi}; }

  double operator()(const Point& x, const Point& y) const;
  bool is_constant() const { return shape == Shape::Constant || lo == hi; }
};

/// One row of an explicit translation-invariant rate table: C(x, x + offset) = rate.
struct TableEntry {
  Point offset;
  double rate = 0.0;
};

/// Symmetric conductance C(x,y) on Z^d, optionally rescaled to rho^{-1} Z^d. A rescaled
/// model is evaluated at integer labels u, v (standing for u/rho, v/rho) and returns
/// rho^{alpha-d} C(u, v); its site mass is rho^{-d}.
class ConductanceModel {
 public:
  static ConductanceModel stable_like(int dim, double alpha, WeightFunction weight = WeightFunction::constant(1.0));
  static ConductanceModel axis_stable_like(int dim, double alpha, WeightFunction weight = WeightFunction::constant(1.0));
  /// Default sequences b_n = n^{n^n} (while <= 2^62) and a_n = 2^{-n-4} b_n^{-2}.
  static ConductanceModel sparse_long_range(int dim);
  static ConductanceModel sparse_long_range(int dim, std::vector<double> a, std::vector<std::int64_t> b);
  /// Entries must come in symmetric pairs (offset, -offset) with equal rates.
  static ConductanceModel table(int dim, double alpha, std::vector<TableEntry> entries);
  /// Unit conductance between lattice neighbours, alpha = 2.
  static ConductanceModel nearest_neighbor(int dim);

  ModelKind kind() const { return kind_; }
  double alpha() const { return alpha_; }
  int dim() const { return dim_; }
  std::int64_t scale() const { return scale_; }
  const WeightFunction& weight() const { return weight_; }
  const std::vector<double>& a_seq() const { return a_; }
  const std::vector<std::int64_t>& b_seq() const { return b_; }
  const std::vector<TableEntry>& table_entries() const { return table_; }

  /// rho^{alpha-d}; 1 for the unscaled lattice.
  double rate_factor() const { return rate_factor_; }
  /// mu_x = rho^{-d}.
  double site_mass() const { return site_mass_; }

  /// C(x,y) (times rate_factor when rescaled). Throws ConfigError on dimension mismatch.
  double rate(const Point& x, const Point& y) const;

  /// Envelope phi evaluated on a displacement: dominates C(x, x+z) for every x.
  double envelope(const Point& z) const;

  /// Upper bound on sum_{|z| > r} envelope(z), possibly +inf.
  double envelope_tail_bound(double r) const;

  /// Calls fn(z, rate-or-envelope) for every displacement with 0 < |z| <= r in the support.
  /// For translation-invariant models the second argument is the exact rate.
  void for_each_displacement(double r, const std::function<void(const Point&, double)>& fn) const;

  /// Calls fn(z, envelope(z)) for every lattice displacement 0 < |z| <= r where the envelope
  /// is positive. For tables this is the radial maximum, so it covers more points than the
  /// support itself.
  void for_each_envelope_point(double r, const std::function<void(const Point&, double)>& fn) const;

  /// True iff C(x, x+z) does not depend on x.
  bool translation_invariant() const;

  /// Largest |z| of any supported jump; +inf for unbounded range.
  double range() const;

  /// Total jump rate sum_y C(x,y), to near machine precision when a closed form or finite
  /// support is available; otherwise a truncated sum plus the envelope tail bound.
  double total_rate(const Point& x) const;

  /// True when total_rate is exact rather than an upper bound.
  bool total_rate_exact() const;

  /// Stable identifier used in reports, e.g. "StableLike(d=1,alpha=1,c=[1,1])".
  std::string id() const;

  ConductanceModel rescaled(std::int64_t rho) const;

 private:
  ConductanceModel() = default;
  double base_rate_of_offset(const Point& z) const;
  void finalize();

  ModelKind kind_ = ModelKind::Table;
  double alpha_ = 2.0;
  int dim_ = 1;
  std::int64_t scale_ = 1;
  double rate_factor_ = 1.0;
  double site_mass_ = 1.0;
  WeightFunction weight_;
  std::vector<double> a_;
  std::vector<std::int64_t> b_;
  std::vector<TableEntry> table_;
  std::unordered_map<Point, double, PointHash> table_lookup_;
  double table_range_ = 0.0;
  double unit_total_ = -1.0;  // cached sum_z rate for translation-invariant models
};

/// Envelope phi together with the measured (A3) constants.
struct EnvelopeFunction {
  std::function<double(const Point&)> phi;
  double kappa2 = 0.0;
  double kappa3 = 0.0;
};

enum class AssumptionId { A1, A2, A3, A4 };
std::string_view to_string(AssumptionId id);

struct AssumptionReport {
  AssumptionId assumption = AssumptionId::A3;
  std::string window;
  std::vector<double> parameters;   // radii or cube sides
  std::vector<double> ratios;       // primary measured ratio per parameter
  std::vector<double> ratios_aux;   // secondary ratio per parameter (S2 for A3)
  double constant = 0.0;            // sup of ratios (kappa2 for A3, kappa4 for A4)
  double constant_aux = 0.0;        // kappa3 for A3
  double spread = 0.0;              // max/min of ratios
  double spread_aux = 0.0;
  double growth = 0.0;              // max ratio / ratio at the smallest parameter
  double growth_aux = 0.0;
  double bound = 0.0;               // declared cap the growth/spread is judged against
  bool pass = false;
  std::string witness;
  std::string note;
};

/// C(x,y) for the model; the diagonal is zero.
double eval_conductance(const ConductanceModel& model, const Point& x, const Point& y);

struct VertexRate {
  double value = 0.0;       // sum over 0 < |y-x| <= radius
  double tail_bound = 0.0;  // >= sum over |y-x| > radius
};

VertexRate vertex_rate(const ConductanceModel& model, const Point& x, double radius);

/// Empirical (A3) constants over the given radii. growth_cap bounds how much r^alpha S1(r)
/// and r^{alpha-2} S2(r) may grow from the smallest radius before the report fails.
AssumptionReport check_A3(const ConductanceModel& model, const std::vector<double>& radii, double growth_cap = 4.0);

/// (A2): min over the sampled sites of total_rate, compared to kappa1 > 0.
AssumptionReport check_A2(const ConductanceModel& model, const std::vector<Point>& sites);

/// (A1): symmetry and zero diagonal over random pairs drawn from a box of half-width `extent`.
AssumptionReport check_A1(const ConductanceModel& model, std::size_t pairs, std::int64_t extent, std::uint64_t seed);

ConductanceModel rescale(const ConductanceModel& model, std::int64_t rho);

/// Parses "(dx..., rate)" CSV rows into table entries.
std::vector<TableEntry> parse_table_csv(std::string_view text, int dim);

}  // namespace hklab
