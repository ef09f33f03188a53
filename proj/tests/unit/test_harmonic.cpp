#include <doctest.h>

#include <cmath>

#include <Eigen/Dense>

#include <hklab/harmonic.hpp>
#include <hklab/report.hpp>

using namespace hklab;

namespace {

HarmonicProblem linear_problem(std::int64_t n) {
  const auto w = make_window({0}, {n + 1});
  std::vector<double> g(w.size(), 0.0);
  g[w.index({n})] = 1.0;
  return make_problem(ConductanceModel::nearest_neighbor(1), w, SetDescriptor::ball({n / 2}, static_cast<double>(n / 2)), g);
}

}  // namespace

TEST_SUITE("harmonic") {

TEST_CASE("constant boundary data give a constant solution") {
  const auto m = ConductanceModel::stable_like(1, 1.0);
  const auto w = centered_window(1, 40);
  auto p = make_problem(m, w, SetDescriptor::ball({0}, 10.0), std::vector<double>(w.size(), 2.5), 2.5);
  HarmonicOptions opt;
  opt.tail_threshold = 1.0;
  const auto s = solve_harmonic(p, opt);
  for (std::size_t i : p.domain.indices()) CHECK(s.h[i] == doctest::Approx(2.5).epsilon(1e-12));
}

TEST_CASE("linear functions are harmonic for the simple walk") {
  const auto p = linear_problem(10);
  CHECK(p.domain.count() == 9);
  const auto s = solve_harmonic(p);
  for (std::int64_t x = 1; x < 10; ++x) CHECK(std::abs(s.h[p.window.index({x})] - x / 10.0) <= 1e-12);
}

TEST_CASE("solver against a dense LU solve") {
  const auto m = ConductanceModel::stable_like(1, 1.0);
  const auto w = centered_window(1, 150);
  const auto g = boundary_preset(w, BoundaryPreset::HalfSpace, 120);
  const auto p = make_problem(m, w, SetDescriptor::ball({0}, 100.0), g);
  HarmonicOptions opt;
  opt.tail_threshold = 1.0;  // the out-of-window mass is part of both systems
  const auto s = solve_harmonic(p, opt);

  const auto dom = p.domain.indices();
  const auto n = static_cast<Eigen::Index>(dom.size());
  CHECK(n == 199);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Point x = w.point(dom[static_cast<std::size_t>(i)]);
    a(i, i) = m.total_rate(x);
    for (std::size_t k = 0; k < w.size(); ++k) {
      const Point y = w.point(k);
      if (y == x) continue;
      if (p.domain.contains_index(k)) {
        const auto j = static_cast<Eigen::Index>(std::lower_bound(dom.begin(), dom.end(), k) - dom.begin());
        a(i, j) -= m.rate(x, y);
      } else {
        b(i) += m.rate(x, y) * g[k];
      }
    }
  }
  const Eigen::VectorXd h = a.partialPivLu().solve(b);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) worst = std::max(worst, std::abs(h(i) - s.h[dom[static_cast<std::size_t>(i)]]));
  CHECK(worst <= 1e-9);
}

TEST_CASE("maximum principle") {
  const auto m = ConductanceModel::stable_like(1, 1.5);
  const auto w = centered_window(1, 60);
  const auto p = make_problem(m, w, SetDescriptor::ball({0}, 20.0), boundary_preset(w, BoundaryPreset::LinearRamp));
  HarmonicOptions opt;
  opt.tail_threshold = 1.0;
  const auto s = solve_harmonic(p, opt);
  for (std::size_t i : p.domain.indices()) {
    CHECK(s.h[i] >= 0.0);
    CHECK(s.h[i] <= 1.0);
  }
}

TEST_CASE("window too small for the tail threshold") {
  const auto m = ConductanceModel::stable_like(1, 1.0);
  const auto w = centered_window(1, 40);
  const auto p = make_problem(m, w, SetDescriptor::ball({0}, 10.0), boundary_preset(w, BoundaryPreset::HalfSpace, 20));
  CHECK_THROWS_AS(solve_harmonic(p), DomainError);
}

TEST_CASE("clipped domain is rejected") {
  const auto w = centered_window(1, 5);
  CHECK_THROWS_AS(make_problem(ConductanceModel::nearest_neighbor(1), w, SetDescriptor::ball({0}, 9.0),
                               std::vector<double>(w.size(), 0.0)),
                  ConfigError);
}

TEST_CASE("oscillation of a constant is flagged") {
  const auto p = linear_problem(100);
  const std::vector<double> h(p.window.size(), 1.0);
  const auto prof = oscillation_profile(p, h, {50}, 32.0, 0.5, 4);
  CHECK(prof.inconclusive);
  for (const auto& l : prof.levels) CHECK(l.osc == 0.0);
}

TEST_CASE("oscillation of a linear profile") {
  const auto p = linear_problem(100);
  const auto s = solve_harmonic(p);
  const auto prof = oscillation_profile(p, s.h, {50}, 32.0, 0.5, 4);
  REQUIRE_FALSE(prof.inconclusive);
  // Over B(50, r) with integer r the sites are 50 +- (r - 1), so osc = 2 (r - 1) / 100.
  std::vector<double> lx, ly;
  for (double r : {32.0, 16.0, 8.0, 4.0}) {
    lx.push_back(std::log(r));
    ly.push_back(std::log(2.0 * (r - 1.0) / 100.0));
  }
  const auto fit = least_squares(lx, ly);
  CHECK(prof.beta == doctest::Approx(fit.slope).epsilon(1e-9));
  CHECK(prof.beta > 0.9);
  CHECK(prof.beta < 1.3);
  for (std::size_t k = 1; k < prof.levels.size(); ++k) CHECK(prof.levels[k].osc <= prof.levels[k - 1].osc);
}

TEST_CASE("martingale check exact cases") {
  const auto p = linear_problem(20);
  const auto s = solve_harmonic(p);
  const auto at_zero = martingale_check(p, s, {7}, 0.0, 1000, 1);
  CHECK(at_zero.estimate == doctest::Approx(0.0).epsilon(1e-12));

  const auto w = make_window({0}, {21});
  auto c = make_problem(ConductanceModel::nearest_neighbor(1), w, SetDescriptor::ball({10}, 10.0),
                        std::vector<double>(w.size(), 0.4), 0.4);
  const auto sc = solve_harmonic(c);
  const auto flat = martingale_check(c, sc, {10}, 5.0, 1000, 2);
  CHECK(std::abs(flat.estimate) <= 1e-12);
}

TEST_CASE("martingale check on the simple walk") {
  const auto p = linear_problem(20);
  const auto s = solve_harmonic(p);
  const auto rep = martingale_check(p, s, {7}, 10.0, 20000, 3);
  CHECK(rep.pass);
}

TEST_CASE("theoretical exponent worked case") {
  const auto e = theoretical_exponent(0.5, 1.0, 0.25, 1.0);
  CHECK(e.gamma == 0.875);
  CHECK(e.rho == doctest::Approx(0.0478515625).epsilon(1e-14));
  CHECK(e.beta == doctest::Approx(std::log(0.875) / std::log(0.0478515625)).epsilon(1e-14));
  CHECK(e.beta == doctest::Approx(0.043929).epsilon(1e-5));
  CHECK(e.in_range);
}

TEST_CASE("theoretical exponent limits and range") {
  const auto small = theoretical_exponent(1e-9, 1.0, 0.25, 1.0);
  CHECK(small.gamma == doctest::Approx(1.0));
  CHECK(small.beta < 1e-8);
  CHECK(small.beta > 0.0);
  for (int i = 0; i < 100; ++i) {
    const double c1 = 0.01 + 0.98 * ((i * 37) % 100) / 100.0;
    const double c2 = 0.1 + 0.2 * (i % 17);
    const double eta = 0.05 + 0.9 * ((i * 13) % 100) / 100.0;
    const double alpha = 0.1 + 1.9 * ((i * 7) % 100) / 99.0;
    const auto e = theoretical_exponent(c1, c2, eta, alpha);
    CHECK(e.beta > 0.0);
    CHECK(e.beta < alpha);
  }
  CHECK_THROWS_AS(theoretical_exponent(1.5, 1.0, 0.25, 1.0), DomainError);
}

TEST_CASE("required half-width grows with the tail") {
  const auto w1 = required_half_width(ConductanceModel::stable_like(1, 1.0), 10.0);
  const auto w2 = required_half_width(ConductanceModel::stable_like(1, 1.9), 10.0);
  CHECK(w1 > w2);
  CHECK(required_half_width(ConductanceModel::nearest_neighbor(1), 10.0) <= 12);
}

}  // TEST_SUITE
