#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hklab/conductance.hpp"
#include "hklab/lattice.hpp"
#include "hklab/linalg.hpp"

namespace hklab {

/// E(f,f) = 1/2 sum_{x,y} (f(y) - f(x))^2 C(x,y) restricted to a window, stored as unordered
/// pairs. The optional killing term sum_x f(x)^2 k(x) accounts for partners outside the window
/// when f is extended by zero.
struct QuadraticForm {
  struct Pair {
    std::size_t i;
    std::size_t j;
    double c;
  };

  LatticeWindow window;
  std::vector<Pair> pairs;
  std::vector<double> mass;
  std::vector<double> killing;  // empty when the form has no exterior term

  std::size_t size() const { return window.size(); }
};

/// Form on the window; with `exterior` the jumps leaving the window become a killing term.
QuadraticForm make_form(const ConductanceModel& model, const LatticeWindow& window, bool exterior = false);

/// Form from an explicit pair list (tests and hand-built examples).
QuadraticForm make_form(const LatticeWindow& window, std::vector<QuadraticForm::Pair> pairs);

double dirichlet_energy(const QuadraticForm& form, std::span<const double> f);

/// Connected components of the conductance graph among the listed window indices.
std::vector<std::vector<std::size_t>> components(const QuadraticForm& form);

struct PoincareResult {
  double constant = 0.0;  // kappa_4 (or c) after dividing by r^alpha / R^alpha
  double ratio = 0.0;     // the raw Rayleigh quotient
  std::vector<double> extremal;
  std::vector<Point> sites;
  bool connected = true;
  bool on_grid = true;  // weighted inequality: R inside the admissible grid
  std::string witness;
  std::string method;
};

/// Smallest kappa_4 with  sum_B (f - f_B)^2 mu <= kappa_4 r^alpha E_{k5 B}(f,f)  where B is the
/// open cube of side 2r around `center` (labels in the model's rescaled lattice) and E_{k5 B} is
/// the Dirichlet energy of pairs inside the enlarged cube.
PoincareResult best_poincare_constant(const ConductanceModel& model, const Point& center, double r, double kappa5);

/// Same quotient for explicit inner/outer site sets, scaled by 1/r^alpha.
PoincareResult poincare_constant_on_sets(const ConductanceModel& model, const LatticeSet& inner, const LatticeSet& outer,
                                         double r);

/// ||f||_2^{2+2a/d} / (E(f,f) ||f||_1^{2a/d}); +inf when E(f,f) = 0.
double nash_ratio(const QuadraticForm& form, std::span<const double> f, double alpha, int d);

struct NashSurvey {
  double sup_ratio = 0.0;
  std::size_t argmax = 0;
  double c4 = 0.0;  // reported constants of ||f||_2^2 <= c4 s^a E + c5 s^{-d} ||f||_1^2
  double c5 = 1.0;
  double worst_chain_slack = 0.0;  // max over (f, s) of lhs / rhs; <= 1 means the chain holds
  bool chain_holds = true;
};

/// Nash ratio over a reproducible ensemble of bump, plateau and noise functions supported in
/// the window, plus the pointwise check of the s-parametrised inequality on a grid of s.
NashSurvey nash_survey(const ConductanceModel& model, const LatticeWindow& window, std::size_t count, std::uint64_t seed,
                       const std::vector<double>& s_grid);

struct WeightProfile {
  Point center;
  double radius = 0.0;
  std::int64_t scale = 1;
  std::vector<Point> sites;
  std::vector<double> values;
  double c1 = 0.0;
};

/// phi_R(x) = c1 (R^2 - |x0 - x|_m^2)^+ on the open cube B[x0, R] of rho^{-1} Z^d, normalised
/// so that sum_B phi_R = rho^d.
WeightProfile weight_phi(const Point& x0, double R, std::int64_t rho);

/// Whether R lies in  U_n [n/rho + 1/(4 rho), n/rho + 1/rho].
bool weighted_radius_on_grid(double R, std::int64_t rho);

/// sup (sum w (f - fbar)^2) / (sum_{x,y} (f(x)-f(y))^2 k(x,y)) for probability weights w and
/// symmetric pair weights k (each unordered pair listed once; the double sum counts it twice).
RayleighResult weighted_rayleigh(std::span<const double> weights, const std::vector<QuadraticForm::Pair>& pairs);

/// Local weighted Poincare constant on B[x0,R] at scale rho for the rescaled conductance.
PoincareResult weighted_poincare_constant(const ConductanceModel& model, const Point& x0, double R, std::int64_t rho);

/// best_poincare_constant over cubes of the given sides (r = side / 2) centred at the origin.
/// Passes when every cube is connected and max/min of the constants is at most spread_cap.
AssumptionReport check_A4_scaling(const ConductanceModel& model, const std::vector<double>& sides, double kappa5,
                                  double spread_cap = 4.0);

}  // namespace hklab
