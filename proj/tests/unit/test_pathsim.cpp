#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include <boost/math/distributions/chi_squared.hpp>

#include <hklab/heatkernel.hpp>
#include <hklab/pathsim.hpp>

using namespace hklab;

namespace {

// chi-square goodness of fit of sampled one-step targets from x against C(x,.)/v_x. Offsets
// with |z| <= bins get their own cell; the rest are pooled.
double jump_kernel_pvalue(const ConductanceModel& m, const Point& x, std::size_t n, std::uint64_t seed, int bins) {
  const JumpSampler sampler(m);
  const double v = m.total_rate(x);
  std::map<std::int64_t, double> expected;
  double inner = 0.0;
  for (std::int64_t k = -bins; k <= bins; ++k) {
    if (k == 0) continue;
    Point y = x;
    y[0] += k;
    if (m.dim() > 1) continue;
    const double p = m.rate(x, y) / v;
    expected[k] = p * static_cast<double>(n);
    inner += p;
  }
  expected[0] = (1.0 - inner) * static_cast<double>(n);  // pooled far cell
  std::map<std::int64_t, double> observed;
  RandomStream rng(seed, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto j = sampler.step(x, rng);
    const std::int64_t dz = j.target[0] - x[0];
    observed[std::abs(dz) <= bins ? dz : 0] += 1.0;
  }
  double chi2 = 0.0;
  for (const auto& [k, e] : expected) chi2 += (observed[k] - e) * (observed[k] - e) / e;
  boost::math::chi_squared dist(static_cast<double>(expected.size() - 1));
  return boost::math::cdf(boost::math::complement(dist, chi2));
}

}  // namespace

TEST_SUITE("pathsim") {

TEST_CASE("alias table reproduces its weights") {
  const std::vector<double> w{1.0, 3.0, 0.0, 6.0};
  const AliasTable t(w);
  CHECK(t.probability(0) == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(t.probability(1) == doctest::Approx(0.3).epsilon(1e-14));
  CHECK(t.probability(2) == doctest::Approx(0.0));
  CHECK(t.probability(3) == doctest::Approx(0.6).epsilon(1e-14));
  CHECK_THROWS_AS(AliasTable(std::vector<double>{0.0, 0.0}), DomainError);
}

TEST_CASE("zero horizon keeps the start") {
  const auto p = sample_path(ConductanceModel::stable_like(1, 1.0), {3}, 0.0, centered_window(1, 10), 1);
  CHECK(p.states.size() == 1);
  CHECK(p.states[0] == Point{3});
}

TEST_CASE("paths are reproducible and well formed") {
  const auto m = ConductanceModel::stable_like(1, 1.0);
  const auto w = centered_window(1, 1000);
  const auto a = sample_path(m, {0}, 50.0, w, 9);
  const auto b = sample_path(m, {0}, 50.0, w, 9);
  CHECK(a.times == b.times);
  CHECK(a.states == b.states);
  for (std::size_t k = 1; k < a.times.size(); ++k) {
    CHECK(a.times[k] > a.times[k - 1]);
    CHECK(a.states[k] != a.states[k - 1]);
  }
}

TEST_CASE("holding time of a single-neighbour table") {
  const auto m = ConductanceModel::table(1, 2.0, {{Point{1}, 3.0}, {Point{-1}, 3.0}});
  const JumpSampler s(m);
  // Rate 3 to each side; the first holding time has mean 1/6.
  const std::size_t n = 1000000;
  double sum = 0.0, sum2 = 0.0;
  RandomStream rng(5, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const double h = s.step({0}, rng).hold;
    sum += h;
    sum2 += h * h;
  }
  const double mean = sum / n;
  const double se = std::sqrt((sum2 / n - mean * mean) / n);
  CHECK(std::abs(mean - 1.0 / 6.0) <= 3.0 * se);
}

TEST_CASE("holding times pass Kolmogorov-Smirnov against the exponential law") {
  const auto m = ConductanceModel::stable_like(1, 1.5);
  const JumpSampler s(m);
  const double v = m.total_rate({0});
  const std::size_t n = 100000;
  std::vector<double> h(n);
  RandomStream rng(77, 0);
  for (auto& x : h) x = s.step({0}, rng).hold;
  std::sort(h.begin(), h.end());
  double dmax = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double cdf = 1.0 - std::exp(-v * h[i]);
    dmax = std::max({dmax, std::abs(cdf - static_cast<double>(i) / n), std::abs(cdf - static_cast<double>(i + 1) / n)});
  }
  const double critical = std::sqrt(-0.5 * std::log(1e-3 / 2.0));  // asymptotic level 1e-3
  CHECK(dmax * std::sqrt(static_cast<double>(n)) < critical);
}

TEST_CASE("nearest-neighbour steps are fair") {
  const auto m = ConductanceModel::nearest_neighbor(1);
  const JumpSampler s(m);
  const std::size_t n = 1000000;
  std::size_t right = 0;
  RandomStream rng(8, 0);
  for (std::size_t i = 0; i < n; ++i) right += s.step({0}, rng).target[0] == 1 ? 1 : 0;
  CHECK(std::abs(static_cast<double>(right) / n - 0.5) <= 3.0 * std::sqrt(0.25 / n));
}

TEST_CASE("jump kernel fidelity") {
  CHECK(jump_kernel_pvalue(ConductanceModel::stable_like(1, 1.0), {0}, 1000000, 21, 16) > 1e-3);
  // Non-translation-invariant weight goes through thinning.
  const auto osc = ConductanceModel::stable_like(1, 1.0, WeightFunction::oscillating(0.5, 2.0));
  CHECK(jump_kernel_pvalue(osc, {3}, 1000000, 22, 16) > 1e-3);
  CHECK(jump_kernel_pvalue(osc, {-11}, 1000000, 23, 16) > 1e-3);
}

TEST_CASE("exit probability with no time is zero") {
  const auto e = estimate_exit_prob(ConductanceModel::stable_like(1, 1.0), {0}, 1.0, 8.0, 0.0, 1000, 1);
  CHECK(e.value == 0.0);
}

TEST_CASE("exit probability against the killed kernel") {
  // Exit before time 1 from B(0, 2.5) = {-2..2} equals the mass lost by the killed density.
  const auto m = ConductanceModel::stable_like(1, 1.0);
  const double R = 2.5, gamma = 1.0;  // gamma R^alpha is the time horizon
  const auto e = estimate_exit_prob(m, {0}, 1.0, R, gamma / R, 100000, 4);
  const auto k = killed_density(m, SetDescriptor::cube({0}, R), 1, 1.0, {0}, 1e-12);
  double alive = 0.0;
  for (double v : k.density) alive += v;
  CHECK(std::abs(e.value - (1.0 - alive)) <= 3.0 * e.std_error);
}

TEST_CASE("hitting a set that contains the start") {
  const auto e = estimate_hitting_prob(ConductanceModel::stable_like(1, 1.0), {0}, {{0}}, 8.0, 100, 3);
  CHECK(e.value == 1.0);
}

TEST_CASE("hitting set outside the inner ball is rejected") {
  CHECK_THROWS_AS(estimate_hitting_prob(ConductanceModel::stable_like(1, 1.0), {0}, {{20}}, 8.0, 100, 3), DomainError);
}

TEST_CASE("exit time below the lattice spacing is the first holding time") {
  const auto m = ConductanceModel::stable_like(1, 1.0);
  const auto st = expected_exit_time(m, {0}, {0.5, 0.9}, 100000, 12);
  const double mean = 1.0 / m.total_rate({0});
  CHECK(std::abs(st.per_radius[0].value - mean) <= 3.0 * st.per_radius[0].std_error);
  CHECK(green_potential(m, {0}, 0.5, [](const Point&) { return 1.0; }) == doctest::Approx(mean).epsilon(1e-12));
}

TEST_CASE("Levy system with vanishing integrands") {
  const auto zero = levy_system_check(ConductanceModel::stable_like(1, 1.0), {0}, [](const Point&, const Point&) { return 0.0; },
                                     4.0, 1000, 2);
  CHECK(zero.values[0] == 0.0);
  CHECK(zero.values[1] == 0.0);
  const auto nn = levy_system_check(ConductanceModel::nearest_neighbor(1), {0},
                                    [](const Point& u, const Point& v) { return (v - u).norm() >= 2.0 ? 1.0 : 0.0; }, 4.0,
                                    1000, 2);
  CHECK(nn.values[0] == 0.0);
  CHECK(nn.values[1] == 0.0);
}

TEST_CASE("estimates do not depend on the thread count") {
  const auto m = ConductanceModel::stable_like(1, 1.0);
  SimOptions one, four;
  four.threads = 4;
  const auto a = estimate_exit_prob(m, {0}, 1.0, 8.0, 0.1, 20000, 99, one);
  const auto b = estimate_exit_prob(m, {0}, 1.0, 8.0, 0.1, 20000, 99, four);
  CHECK(a.value == b.value);
  CHECK(a.std_error == b.std_error);
}

TEST_CASE("pairwise summation is order-fixed") {
  std::vector<double> v(1001);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = 1.0 / static_cast<double>(i + 1);
  double naive = 0.0;
  for (double x : v) naive += x;
  CHECK(pairwise_sum(v) == doctest::Approx(naive).epsilon(1e-14));
}

TEST_CASE("tail policy names") {
  CHECK(parse_tail_policy("censor") == TailPolicy::Censor);
  CHECK(parse_tail_policy("reject") == TailPolicy::Reject);
  CHECK_THROWS_AS(parse_tail_policy("drop"), ConfigError);
}

}  // TEST_SUITE
