#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "hklab/conductance.hpp"
#include "hklab/lattice.hpp"
#include "hklab/pathsim.hpp"
#include "hklab/report.hpp"

namespace hklab {

/// Dirichlet problem: h harmonic for the chain inside `domain`, h = boundary on window \ domain,
/// and h = outside_value beyond the window.
struct HarmonicProblem {
  ConductanceModel model;
  LatticeWindow window;
  LatticeSet domain;
  std::vector<double> boundary;  // one value per window site; entries inside the domain are ignored
  double outside_value = 0.0;
};

enum class BoundaryPreset { HalfSpace, FarSite, LinearRamp };
std::string_view to_string(BoundaryPreset p);
BoundaryPreset parse_boundary_preset(std::string_view s);

/// Boundary data presets on the window:
///   HalfSpace  - 1 where y_1 >= position, else 0
///   FarSite    - 1 at the label (position, 0, ..., 0), else 0
///   LinearRamp - (y_1 - lower_1) / (upper_1 - 1 - lower_1)
std::vector<double> boundary_preset(const LatticeWindow& window, BoundaryPreset preset, std::int64_t position = 0);

HarmonicProblem make_problem(const ConductanceModel& model, const LatticeWindow& window, const SetDescriptor& domain,
                             std::vector<double> boundary, double outside_value = 0.0);

struct HarmonicSolution {
  std::vector<double> h;   // per window site; boundary values copied outside the domain
  double residual = 0.0;   // max_x |sum_y C(x,y)(h(y) - h(x))| over the domain
  double bias_bound = 0.0; // max over the domain of (out-of-window mass / v_x) max|g|
  int iterations = 0;
  std::string method;
};

struct HarmonicOptions {
  double rel_tol = 1e-12;
  double tail_threshold = 1e-6;
};

/// Throws DomainError when some domain site keeps less than (1 - tail_threshold) of its rate
/// inside the window (message names the half-width needed), or when the system is singular.
HarmonicSolution solve_harmonic(const HarmonicProblem& problem, const HarmonicOptions& options = {});

/// Smallest half-width w such that a window [-w, w]^d around a domain of the given radius
/// (label units) meets the tail threshold.
std::int64_t required_half_width(const ConductanceModel& model, double domain_radius, double tail_threshold = 1e-6);

struct OscillationLevel {
  double radius = 0.0;
  std::size_t sites = 0;
  double sup = 0.0;
  double inf = 0.0;
  double osc = 0.0;
  bool used = false;
};

struct OscillationProfile {
  Point center;
  double radius = 0.0;
  double contraction = 0.5;
  std::vector<OscillationLevel> levels;
  double beta = 0.0;
  bool inconclusive = false;
  std::string note;
};

/// Oscillation of h over B(x, contraction^k r), k = 0..levels-1, and the log-log slope over
/// levels with at least 5 sites and osc > 1e-8.
OscillationProfile oscillation_profile(const HarmonicProblem& problem, const std::vector<double>& h, const Point& x,
                                       double r, double contraction, int levels);

/// E^x h(X_{t ^ tau_D}) by simulation against h(x).
CheckReport martingale_check(const HarmonicProblem& problem, const HarmonicSolution& solution, const Point& x, double t,
                             std::size_t n, std::uint64_t seed, const SimOptions& options = {});

struct ExponentRecursion {
  double gamma = 0.0;
  double rho = 0.0;
  double beta = 0.0;
  bool in_range = false;  // beta in (0, alpha)
};

/// gamma = 1 - c1/4, rho = min(eta, (gamma/2)^{1/alpha}, (c1 gamma^2 / (8 c2))^{1/alpha}),
/// beta = log gamma / log rho.
ExponentRecursion theoretical_exponent(double c1, double c2, double eta, double alpha);

/// CSV of h; window sites outside the domain where h = 0 are omitted.
void write_harmonic_csv(const HarmonicProblem& problem, const std::vector<double>& h, std::ostream& os);

}  // namespace hklab
