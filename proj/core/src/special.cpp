#include "hklab/special.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace hklab::special {

namespace {

// B_{2j} / (2j)!
constexpr std::array<double, 10> kBernoulliOverFactorial = {
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30240.0,
    -1.0 / 1209600.0,
    1.0 / 47900160.0,
    -691.0 / 1307674368000.0,
    1.0 / 74724249600.0,
    -3617.0 / 10670622842880000.0,
    43867.0 / 5109094217170944000.0,
    -174611.0 / 802857662698291200000.0,
};

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

double hurwitz_zeta(double s, double a) {
  if (!(s > 1.0) || !(a > 0.0)) throw std::domain_error("hurwitz_zeta requires s > 1, a > 0");
  constexpr int kDirect = 24;
  double sum = 0.0;
  for (int k = 0; k < kDirect; ++k) sum += std::pow(k + a, -s);
  const double n = kDirect + a;
  sum += std::pow(n, 1.0 - s) / (s - 1.0);
  sum += 0.5 * std::pow(n, -s);
  // s (s+1) ... (s+2j-2) n^{-s-2j+1}
  double rising = s;
  double npow = std::pow(n, -s - 1.0);
  for (std::size_t j = 0; j < kBernoulliOverFactorial.size(); ++j) {
    sum += kBernoulliOverFactorial[j] * rising * npow;
    rising *= (s + 2.0 * static_cast<double>(j) + 1.0) * (s + 2.0 * static_cast<double>(j) + 2.0);
    npow /= n * n;
  }
  return sum;
}

double dirichlet_beta(double s) {
  return std::pow(4.0, -s) * (hurwitz_zeta(s, 0.25) - hurwitz_zeta(s, 0.75));
}

double unit_sphere_area(int d) {
  return 2.0 * std::pow(std::numbers::pi, d / 2.0) / std::tgamma(d / 2.0);
}

double power_tail_bound_1d(double r, double s) {
  const double first = std::floor(std::max(r, 0.0)) + 1.0;
  return std::pow(first - 0.5, 1.0 - s) / (s - 1.0);
}

double lattice_tail_min_radius(int d) { return d == 1 ? 0.0 : std::sqrt(static_cast<double>(d)) + 1e-9; }

double lattice_tail_bound(int d, double r, double s) {
  if (!(s > d)) throw std::domain_error("lattice_tail_bound requires s > d");
  if (d == 1) return 2.0 * power_tail_bound_1d(r, s);
  const double h = 0.5 * std::sqrt(static_cast<double>(d));
  const double w0 = r - 2.0 * h;
  if (!(w0 > 0.0)) throw std::domain_error("lattice_tail_bound radius too small");
  // omega_d * int_{w0}^inf (w + h)^{d-1} w^{-s} dw
  double acc = 0.0;
  for (int j = 0; j <= d - 1; ++j) {
    acc += binomial(d - 1, j) * std::pow(h, d - 1 - j) * std::pow(w0, j - s + 1.0) / (s - j - 1.0);
  }
  return unit_sphere_area(d) * acc;
}

double lattice_zeta_closed_form(int d, double s) {
  if (d == 1) return 2.0 * riemann_zeta(s);
  if (d == 2) return 4.0 * riemann_zeta(0.5 * s) * dirichlet_beta(0.5 * s);
  return -1.0;
}

}  // namespace hklab::special
