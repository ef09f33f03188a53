#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "hklab/conductance.hpp"
#include "hklab/lattice.hpp"
#include "hklab/linalg.hpp"
#include "hklab/report.hpp"

namespace hklab {

enum class BoundaryMode { Absorb, KillInside };

struct GeneratorOptions {
  BoundaryMode mode = BoundaryMode::Absorb;
  std::optional<LatticeSet> domain;  // required for KillInside
  /// Drop jumps longer than lambda (in rescaled distance |y - x| / rho).
  double lambda_cut = std::numeric_limits<double>::infinity();
  std::size_t site_cap = 20000;
};

/// Q = (q(x,y)) - diag(v) on a window. q are jump rates C(x,y) / mu_x; v_x is the full exit
/// rate, so rate mass leaving the window (Absorb) or the domain (KillInside) goes to a cemetery.
/// Sites outside the domain carry no rows.
struct SparseGenerator {
  LatticeWindow window{Point::origin(1), Point::unit(1, 0, 1)};
  CsrMatrix jumps;               // off-diagonal jump rates, symmetric
  std::vector<double> exit_rate;  // v_x
  std::vector<double> routed;     // part of v_x leaving the window / domain
  std::vector<bool> alive;
  BoundaryMode mode = BoundaryMode::Absorb;
  double lambda_cut = std::numeric_limits<double>::infinity();
  double uniformization = 0.0;  // Lambda = 1.05 max v
  double site_mass = 1.0;

  std::size_t size() const { return window.size(); }
  /// y = Q x.
  void apply(std::span<const double> x, std::span<double> y) const;
};

SparseGenerator build_generator(const ConductanceModel& model, const LatticeWindow& window,
                                const GeneratorOptions& options = {});

enum class KernelVariant { Full, Rescaled, Truncated, Killed };
std::string_view to_string(KernelVariant v);

/// Row p(t, x, .) of the transition density with respect to the site mass.
struct KernelSlice {
  double t = 0.0;
  Point source;
  LatticeWindow window{Point::origin(1), Point::unit(1, 0, 1)};
  std::vector<double> density;
  double poisson_truncation_error = 0.0;
  KernelVariant variant = KernelVariant::Full;
  std::int64_t rho = 1;
  double lambda = std::numeric_limits<double>::infinity();

  double at(const Point& y) const { return density[window.index(y)]; }
  /// 1 - sum_y p mu_y: probability lost to the cemetery (plus truncation).
  double lost_mass() const;
};

struct SemigroupStats {
  std::size_t terms = 0;
  std::size_t substeps = 1;
  double truncation = 0.0;
};

/// v <- e^{tQ} v by uniformization; the Poisson series is cut once its tail is below tol.
SemigroupStats apply_semigroup(const SparseGenerator& gen, double t, std::vector<double>& v, double tol = 1e-10);

KernelSlice transition_density(const SparseGenerator& gen, double t, const Point& x, double tol = 1e-10);

/// Density of the rho-rescaled chain killed on leaving `cube` (a Cube descriptor in rescaled
/// geometry), started at label x.
KernelSlice killed_density(const ConductanceModel& model, const SetDescriptor& cube, std::int64_t rho, double t,
                           const Point& x, double tol = 1e-10);

/// Dense eigendecomposition of -Q restricted to the live sites.
struct SpectralOracle {
  std::vector<std::size_t> sites;  // window indices of the live sites
  std::vector<double> eigenvalues;
  DenseMatrix eigenvectors;  // columns, orthonormal in the counting inner product
  double site_mass = 1.0;
  LatticeWindow window{Point::origin(1), Point::unit(1, 0, 1)};

  /// sum_i e^{-lambda_i t} phi_i(x) phi_i(.) / mu, indexed by window site.
  std::vector<double> density_row(double t, const Point& x) const;
};

SpectralOracle spectral_oracle(const SparseGenerator& gen, std::size_t max_sites = 500);

/// max_y |p(s+t,x,y) - sum_z p(s,x,z) p(t,z,y) mu_z|.
double chapman_kolmogorov_defect(const SparseGenerator& gen, double s, double t, const Point& x, double tol = 1e-10);

/// max over ordered pairs of sources of |p(t,x,y) - p(t,y,x)|.
double symmetry_defect(const SparseGenerator& gen, double t, const std::vector<Point>& sources, double tol = 1e-10);

/// Near-diagonal lower bound from the window centre: eps(t) = min over |y| <= 2t^{1/alpha}
/// of p(t,0,y) t^{d/alpha}. Boundary loss above 10% marks the report inconclusive.
CheckReport near_diagonal_lower_check(const ConductanceModel& model, const std::vector<double>& times,
                                      std::int64_t half_width, double spread_cap = 3.0, double tol = 1e-10);

/// Killed lower bound: for each rho, min over x, y in B(0, 3R/4) of p^rho_B(t, x, y) with B the
/// open cube of half-side R around 0.
CheckReport killed_lower_check(const ConductanceModel& model, const std::vector<std::int64_t>& rhos, double R,
                               double t = 1.0, double spread_cap = 3.0, double tol = 1e-10);

/// c(t) = max_y p(t,0,y) (t^{d/alpha} v 1); passes if the spread over times is <= spread_cap.
CheckReport upper_bound_check(const ConductanceModel& model, const std::vector<double>& times, std::int64_t half_width,
                              double spread_cap = 3.0, double tol = 1e-10);

/// Least-squares slope of log p^{rho,lambda}(t,0,y) against |y|/lambda over cells with p > 10 tol.
CheckReport truncated_decay_check(const ConductanceModel& model, std::int64_t rho, double lambda, double t,
                                  std::int64_t half_width, double slope_cap = -0.75, double tol = 1e-10);

/// p^rho(t,x,y) (rescaled generator) against rho^d p(rho^alpha t, rho x, rho y) (base generator),
/// both on the label window [-half_width, half_width]^d.
CheckReport scaling_identity_check(const ConductanceModel& model, std::int64_t rho, double t, const Point& x,
                                   const Point& y, std::int64_t half_width, double tol = 1e-12);

void write_slice_csv(const KernelSlice& slice, std::ostream& os);

}  // namespace hklab
