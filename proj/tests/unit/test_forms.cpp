#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <hklab/forms.hpp>

using namespace hklab;

namespace {

// Neumann path Laplacian on n sites: smallest nonzero eigenvalue 2 - 2 cos(pi / n).
double path_gap(std::size_t n) { return 2.0 - 2.0 * std::cos(std::numbers::pi / static_cast<double>(n)); }

}  // namespace

TEST_SUITE("forms") {

TEST_CASE("two-site energy") {
  const auto form = make_form(make_window({0}, {2}), {{0, 1, 3.0}});
  const std::vector<double> f{0.0, 2.0};
  CHECK(dirichlet_energy(form, f) == 12.0);
  const std::vector<double> c{7.0, 7.0};
  CHECK(dirichlet_energy(form, c) == 0.0);
}

TEST_CASE("energy equals the ordered double sum") {
  const auto m = ConductanceModel::stable_like(1, 1.3);
  const auto w = make_window({0}, {5});
  const auto form = make_form(m, w);
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> f(5);
  for (auto& v : f) v = u(gen);
  double brute = 0.0;
  for (std::int64_t x = 0; x < 5; ++x)
    for (std::int64_t y = 0; y < 5; ++y) {
      const double d = f[static_cast<std::size_t>(y)] - f[static_cast<std::size_t>(x)];
      brute += 0.5 * d * d * m.rate({x}, {y});
    }
  CHECK(dirichlet_energy(form, f) == doctest::Approx(brute).epsilon(1e-14));
}

TEST_CASE("two-site Poincare ratio is one half") {
  const auto m = ConductanceModel::nearest_neighbor(1);
  const auto w = make_window({0}, {2});
  const auto all = make_set(w, SetDescriptor::ball({0}, 3.0));
  const auto pr = poincare_constant_on_sets(m, all, all, 1.0);
  CHECK(pr.connected);
  CHECK(pr.ratio == doctest::Approx(0.5).epsilon(1e-12));
  // The extremal function is non-constant: f(1) - f(0) != 0.
  REQUIRE(pr.extremal.size() == 2);
  CHECK(std::abs(pr.extremal[1] - pr.extremal[0]) > 0.1);
}

TEST_CASE("nearest-neighbour Poincare constant against the path Laplacian") {
  const auto m = ConductanceModel::nearest_neighbor(1);
  for (double side : {4.0, 8.0, 16.0}) {
    const double r = side / 2.0;
    const auto pr = best_poincare_constant(m, {0}, r, 1.0);
    const std::size_t n = static_cast<std::size_t>(side) - 1;  // open cube |y| < r
    CHECK(pr.sites.size() == n);
    CHECK(pr.ratio == doctest::Approx(1.0 / path_gap(n)).epsilon(1e-10));
    CHECK(pr.constant == doctest::Approx(pr.ratio / (r * r)).epsilon(1e-14));
  }
  const auto rep = check_A4_scaling(m, {4, 8, 16}, 1.0);
  CHECK(rep.pass);
  CHECK(rep.spread <= 4.0);
}

TEST_CASE("box Laplacian in the plane") {
  // Product structure: the gap of the n x n box equals the gap of the path.
  const auto m = ConductanceModel::nearest_neighbor(2);
  const auto pr = best_poincare_constant(m, {0, 0}, 3.0, 1.0);
  CHECK(pr.sites.size() == 25);
  CHECK(pr.ratio == doctest::Approx(1.0 / path_gap(5)).epsilon(1e-10));
}

TEST_CASE("disconnected table fails with a witness") {
  const auto m = ConductanceModel::table(1, 2.0, {{Point{2}, 1.0}, {Point{-2}, 1.0}});
  const auto rep = check_A4_scaling(m, {4, 8}, 1.0);
  CHECK_FALSE(rep.pass);
  CHECK_FALSE(rep.witness.empty());
}

TEST_CASE("sparse long-range model has finite Poincare constants") {
  const auto rep = check_A4_scaling(ConductanceModel::sparse_long_range(3), {8, 16}, 1.0);
  CHECK(std::isfinite(rep.ratios[0]));
  CHECK(std::isfinite(rep.ratios[1]));
  CHECK(rep.ratios[0] > 0.0);
}

TEST_CASE("stable-like constants are scale-consistent") {
  const auto m = ConductanceModel::stable_like(2, 1.0);
  const auto a = best_poincare_constant(m, {0, 0}, 4.0, 1.0);
  const auto b = best_poincare_constant(m, {0, 0}, 8.0, 1.0);
  CHECK(std::max(a.constant, b.constant) / std::min(a.constant, b.constant) <= 2.0);
}

TEST_CASE("Nash ratio of an indicator") {
  const auto m = ConductanceModel::nearest_neighbor(1);
  const auto form = make_form(m, make_window({0}, {2}));
  const std::vector<double> f{1.0, 0.0};
  CHECK(nash_ratio(form, f, 2.0, 1) == doctest::Approx(1.0));
  const std::vector<double> c{1.0, 1.0};
  CHECK(std::isinf(nash_ratio(form, c, 2.0, 1)));
}

TEST_CASE("Nash survey is stable across windows") {
  const auto m = ConductanceModel::stable_like(2, 1.0);
  const std::vector<double> grid{0.5, 1, 2, 4, 8, 16};
  const auto a = nash_survey(m, make_window({-16, -16}, {16, 16}), 100, 5, grid);
  const auto b = nash_survey(m, make_window({-24, -24}, {24, 24}), 100, 5, grid);
  CHECK(std::isfinite(a.sup_ratio));
  CHECK(b.sup_ratio == doctest::Approx(a.sup_ratio).epsilon(0.5));
  CHECK(a.chain_holds);
}

TEST_CASE("weight profile on three sites") {
  const auto w = weight_phi({0}, 1.5, 1);
  REQUIRE(w.sites.size() == 3);
  CHECK(w.c1 == doctest::Approx(1.0 / 4.75).epsilon(1e-15));
  double total = 0.0;
  for (std::size_t k = 0; k < w.sites.size(); ++k) {
    const double x = static_cast<double>(w.sites[k][0]);
    CHECK(w.values[k] == doctest::Approx((2.25 - x * x) / 4.75).epsilon(1e-15));
    total += w.values[k];
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("single-site weight") {
  const auto w = weight_phi({3, 1}, 0.5, 2);
  REQUIRE(w.sites.size() == 1);
  for (std::size_t k = 0; k < w.sites.size(); ++k)
    if (w.sites[k] == Point{3, 1}) CHECK(w.values[k] == doctest::Approx(4.0));
  double total = 0.0;
  for (double v : w.values) total += v;
  CHECK(total == doctest::Approx(4.0));
}

TEST_CASE("weighted two-site Rayleigh quotient in closed form") {
  // f = (0, 1): sum w (f - fbar)^2 = p (1 - p); the ordered double sum counts the pair twice.
  const double p = 0.3, k = 0.7;
  const std::vector<double> weights{p, 1.0 - p};
  const auto res = weighted_rayleigh(weights, {{0, 1, k}});
  CHECK(std::abs(res.value - p * (1.0 - p) / (2.0 * k)) <= 1e-12);
}

TEST_CASE("admissible radius grid") {
  CHECK(weighted_radius_on_grid(3.0, 1));
  CHECK(weighted_radius_on_grid(1.25, 1));
  CHECK_FALSE(weighted_radius_on_grid(1.1, 1));
}

}  // TEST_SUITE
