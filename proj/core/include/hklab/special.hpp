#pragma once

namespace hklab::special {

/// Hurwitz zeta  sum_{k>=0} (k+a)^{-s}  for s > 1, a > 0 (Euler-Maclaurin, ~1e-15 relative).
double hurwitz_zeta(double s, double a);

inline double riemann_zeta(double s) { return hurwitz_zeta(s, 1.0); }

/// Dirichlet beta  sum_{k>=0} (-1)^k (2k+1)^{-s}, s > 1.
double dirichlet_beta(double s);

/// Surface area of the unit sphere in R^d.
double unit_sphere_area(int d);

/// Upper bound for  sum_{k integer, k > r} k^{-s}  (s > 1) from the convex midpoint rule.
double power_tail_bound_1d(double r, double s);

/// Upper bound for  sum_{z in Z^d, |z| > r} |z|^{-s}  (s > d). For d == 1 this is twice
/// power_tail_bound_1d. For d >= 2 it integrates (|u| - sqrt(d)/2)^{-s} over the unit
/// cells of the lattice points and therefore needs r > sqrt(d); below that the caller must
/// sum explicitly to a larger radius first.
double lattice_tail_bound(int d, double r, double s);

/// Smallest radius admitted by lattice_tail_bound in dimension d.
double lattice_tail_min_radius(int d);

/// sum_{z in Z^d \ 0} |z|^{-s} in closed form (d = 1, 2); returns a negative value otherwise.
double lattice_zeta_closed_form(int d, double s);

}  // namespace hklab::special
