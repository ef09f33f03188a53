#include "hklab/harmonic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "hklab/linalg.hpp"
#include "pairs.hpp"

namespace hklab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Lattice distance from x to the nearest label outside the window, along the axes.
double distance_to_exterior(const LatticeWindow& w, const Point& x) {
  std::int64_t best = std::numeric_limits<std::int64_t>::max();
  for (int i = 0; i < w.dim(); ++i) best = std::min({best, x[i] - w.lower()[i] + 1, w.upper()[i] - x[i]});
  return static_cast<double>(best);
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double a : v) m = std::max(m, std::abs(a));
  return m;
}

}  // namespace

std::string_view to_string(BoundaryPreset p) {
  switch (p) {
    case BoundaryPreset::HalfSpace: return "half_space";
    case BoundaryPreset::FarSite: return "far_site";
    case BoundaryPreset::LinearRamp: return "linear_ramp";
  }
  return "?";
}

BoundaryPreset parse_boundary_preset(std::string_view s) {
  if (s == "half_space") return BoundaryPreset::HalfSpace;
  if (s == "far_site") return BoundaryPreset::FarSite;
  if (s == "linear_ramp") return BoundaryPreset::LinearRamp;
  throw ConfigError("unknown boundary preset '" + std::string(s) + "'");
}

std::vector<double> boundary_preset(const LatticeWindow& window, BoundaryPreset preset, std::int64_t position) {
  std::vector<double> g(window.size(), 0.0);
  const double lo = static_cast<double>(window.lower()[0]);
  const double span = static_cast<double>(window.upper()[0] - 1) - lo;
  for (std::size_t i = 0; i < window.size(); ++i) {
    const Point y = window.point(i);
    switch (preset) {
      case BoundaryPreset::HalfSpace:
        g[i] = y[0] >= position ? 1.0 : 0.0;
        break;
      case BoundaryPreset::FarSite: {
        bool hit = y[0] == position;
        for (int k = 1; k < y.dim; ++k) hit = hit && y[k] == 0;
        g[i] = hit ? 1.0 : 0.0;
        break;
      }
      case BoundaryPreset::LinearRamp:
        g[i] = span > 0.0 ? (static_cast<double>(y[0]) - lo) / span : 0.0;
        break;
    }
  }
  return g;
}

HarmonicProblem make_problem(const ConductanceModel& model, const LatticeWindow& window, const SetDescriptor& domain,
                             std::vector<double> boundary, double outside_value) {
  if (boundary.size() != window.size()) throw ConfigError("boundary data size does not match the window");
  LatticeSet d = make_set(window, domain);
  if (d.clipped()) throw ConfigError("harmonic domain " + domain.describe() + " does not fit the window");
  return HarmonicProblem{model, window, std::move(d), std::move(boundary), outside_value};
}

std::int64_t required_half_width(const ConductanceModel& model, double domain_radius, double tail_threshold) {
  const double v = model.total_rate(Point::origin(model.dim()));
  double reach = 1.0;
  while (model.envelope_tail_bound(reach - 0.5) / v > tail_threshold) {
    reach *= 1.1;
    if (reach > 1e15) throw DomainError("envelope tail too heavy for any window");
  }
  return static_cast<std::int64_t>(std::ceil(reach + domain_radius));
}

HarmonicSolution solve_harmonic(const HarmonicProblem& problem, const HarmonicOptions& options) {
  const ConductanceModel& model = problem.model;
  const LatticeWindow& window = problem.window;
  if (problem.boundary.size() != window.size()) throw ConfigError("boundary data size does not match the window");
  if (model.scale() != window.scale()) throw ConfigError("model and window scales differ");
  const auto dom = problem.domain.indices();
  const std::size_t m = dom.size();
  if (m == 0) throw DomainError("empty harmonic domain");
  const double mass = model.site_mass();

  std::vector<std::ptrdiff_t> local(window.size(), -1);
  for (std::size_t k = 0; k < m; ++k) local[dom[k]] = static_cast<std::ptrdiff_t>(k);
  std::vector<std::size_t> data_sites;
  for (std::size_t i = 0; i < window.size(); ++i)
    if (local[i] < 0 && problem.boundary[i] != 0.0) data_sites.push_back(i);
  const double gmax = std::max(max_abs(problem.boundary), std::abs(problem.outside_value));

  HarmonicSolution sol;
  std::vector<double> v(m), b(m, 0.0);
  double worst_domain_radius = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const Point x = window.point(dom[k]);
    v[k] = model.total_rate(x) / mass;
    const double out = model.envelope_tail_bound(distance_to_exterior(window, x) - 0.5) / mass;
    const double frac = out / v[k];
    if (frac > options.tail_threshold) {
      for (const auto& p : problem.domain.points())
        worst_domain_radius = std::max(worst_domain_radius, static_cast<double>((p - window.center()).max_norm()));
      throw DomainError("window too small for the tail threshold at " + x.to_string() +
                        "; need half-width >= " +
                        std::to_string(required_half_width(model, worst_domain_radius, options.tail_threshold)));
    }
    sol.bias_bound = std::max(sol.bias_bound, frac * gmax);
  }

  // Boundary data inside the window.
  const bool sparse_range = std::isfinite(model.range()) && model.range() < 64.0;
  for (std::size_t k = 0; k < m; ++k) {
    const Point x = window.point(dom[k]);
    double s = 0.0, inside = 0.0;
    if (sparse_range) {
      model.for_each_displacement(model.range(), [&](const Point& z, double) {
        const auto j = window.try_index(x + z);
        if (!j) return;
        const double c = model.rate(x, x + z);
        inside += c;
        if (local[*j] < 0) s += c * problem.boundary[*j];
      });
    } else {
      for (std::size_t j : data_sites) s += model.rate(x, window.point(j)) * problem.boundary[j];
      if (problem.outside_value != 0.0)
        for (std::size_t j = 0; j < window.size(); ++j)
          if (j != dom[k]) inside += model.rate(x, window.point(j));
    }
    b[k] = s / mass;
    if (problem.outside_value != 0.0) b[k] += problem.outside_value * std::max(0.0, v[k] - inside / mass);
  }

  std::vector<CsrMatrix::Triplet> trip;
  std::vector<double> leak(v);
  detail::for_each_pair(model, window, dom, kInf, [&](std::size_t i, std::size_t j, double c) {
    const double q = c / mass;
    const auto a = static_cast<std::size_t>(local[i]), bb = static_cast<std::size_t>(local[j]);
    trip.push_back({a, bb, -q});
    trip.push_back({bb, a, -q});
    leak[a] -= q;
    leak[bb] -= q;
  });
  for (std::size_t k = 0; k < m; ++k) trip.push_back({k, k, v[k]});
  const CsrMatrix A(m, std::move(trip));
  double max_leak = 0.0, max_v = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    max_leak = std::max(max_leak, leak[k]);
    max_v = std::max(max_v, v[k]);
  }
  if (!(max_leak > 1e-14 * max_v)) throw DomainError("singular harmonic system: no rate mass leaves the domain");

  std::vector<double> u(m, 0.0);
  const LinearOperator op = [&](std::span<const double> x, std::span<double> y) { A.multiply(x, y); };
  const CgResult cg = conjugate_gradient(op, b, u, options.rel_tol, static_cast<int>(std::max<std::size_t>(10 * m, 1000)));
  sol.iterations = cg.iterations;
  sol.method = "cg";
  if (!cg.converged) {
    if (m > 2000) throw DomainError("harmonic CG did not converge");
    DenseMatrix dense(m);
    for (std::size_t i = 0; i < m; ++i)
      A.for_each_in_row(i, [&](std::size_t j, double a) { dense(i, j) = a; });
    u = dense_spd_solve(dense, b);
    sol.method = "dense";
  }

  sol.h = problem.boundary;
  for (std::size_t k = 0; k < m; ++k) sol.h[dom[k]] = u[k];
  std::vector<double> au(m);
  A.multiply(u, au);
  for (std::size_t k = 0; k < m; ++k) sol.residual = std::max(sol.residual, std::abs(b[k] - au[k]));
  return sol;
}

OscillationProfile oscillation_profile(const HarmonicProblem& problem, const std::vector<double>& h, const Point& x,
                                       double r, double contraction, int levels) {
  if (!(contraction > 0.0 && contraction < 1.0)) throw DomainError("contraction must lie in (0,1)");
  if (levels < 1) throw DomainError("need at least one level");
  if (h.size() != problem.window.size()) throw DomainError("h does not match the window");
  const std::int64_t rho = problem.window.scale();
  for (const auto& p : enumerate_set(x.dim, rho, SetDescriptor::ball(x, r)))
    if (!problem.domain.contains(p)) throw DomainError("B(x, r) is not contained in the domain");
  OscillationProfile prof;
  prof.center = x;
  prof.radius = r;
  prof.contraction = contraction;
  std::vector<double> lr, lo;
  double s = r;
  for (int k = 0; k < levels; ++k, s *= contraction) {
    OscillationLevel lvl;
    lvl.radius = s;
    const auto pts = enumerate_set(x.dim, rho, SetDescriptor::ball(x, s));
    if (pts.empty()) {
      prof.levels.push_back(lvl);
      continue;
    }
    lvl.sites = pts.size();
    lvl.sup = -kInf;
    lvl.inf = kInf;
    for (const auto& p : pts) {
      const double v = h[problem.window.index(p)];
      lvl.sup = std::max(lvl.sup, v);
      lvl.inf = std::min(lvl.inf, v);
    }
    lvl.osc = lvl.sup - lvl.inf;
    lvl.used = lvl.sites >= 5 && lvl.osc > 1e-8;
    if (lvl.used) {
      lr.push_back(std::log(s));
      lo.push_back(std::log(lvl.osc));
    }
    prof.levels.push_back(lvl);
  }
  if (lr.size() < 3) {
    prof.inconclusive = true;
    prof.beta = std::numeric_limits<double>::quiet_NaN();
    prof.note = "fewer than 3 usable levels";
    return prof;
  }
  prof.beta = least_squares(lr, lo).slope;
  return prof;
}

CheckReport martingale_check(const HarmonicProblem& problem, const HarmonicSolution& solution, const Point& x, double t,
                             std::size_t n, std::uint64_t seed, const SimOptions& options) {
  if (!problem.domain.contains(x)) throw DomainError("martingale_check needs x in the domain");
  if (!(t >= 0.0)) throw DomainError("time must be nonnegative");
  const LatticeWindow& w = problem.window;
  auto value_at = [&](const Point& y) {
    const auto i = w.try_index(y);
    return i ? solution.h[*i] : problem.outside_value;
  };
  SimOptions opt = options;
  opt.sampler.window.reset();
  const JumpSampler sampler(problem.model, opt.sampler);
  const StopRule leaves = [&](const Point& y) { return !problem.domain.contains(y); };
  std::vector<double> vals(n, 0.0);
  std::vector<char> cens(n, 0);
  parallel_for(n, opt.threads, [&](std::size_t i) {
    const PathSample p = sample_path(sampler, x, t, seed, i, leaves);
    cens[i] = p.censored ? 1 : 0;
    vals[i] = value_at(p.states.back());
  });
  std::vector<double> kept;
  std::size_t c = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (cens[i]) ++c;
    else kept.push_back(vals[i]);
  }
  const EstimatorResult est = summarize(kept, c, seed, opt.config_hash);
  const double hx = value_at(x);
  CheckReport rep;
  rep.name = "martingale";
  rep.params = {t, static_cast<double>(n)};
  rep.values = {est.value, hx};
  rep.estimate = est.value - hx;
  rep.error = est.std_error;
  rep.bound = 3.0 * est.std_error + solution.bias_bound;
  rep.add("mc_mean", est.value);
  rep.add("h_x", hx);
  rep.add("std_error", est.std_error);
  rep.add("bias_bound", solution.bias_bound);
  rep.add("censored_fraction", est.censored_fraction());
  rep.inconclusive = est.censored_fraction() > 0.01;
  if (rep.inconclusive) rep.note = "censored fraction above 1%";
  rep.pass = std::abs(rep.estimate) <= rep.bound;
  return rep;
}

ExponentRecursion theoretical_exponent(double c1, double c2, double eta, double alpha) {
  if (!(c1 > 0.0 && c1 < 1.0)) throw DomainError("c1 must lie in (0,1)");
  if (!(c2 > 0.0)) throw DomainError("c2 must be positive");
  if (!(eta > 0.0 && eta < 1.0)) throw DomainError("eta must lie in (0,1)");
  if (!(alpha > 0.0 && alpha <= 2.0)) throw DomainError("alpha must lie in (0,2]");
  ExponentRecursion e;
  e.gamma = 1.0 - c1 / 4.0;
  e.rho = std::min({eta, std::pow(e.gamma / 2.0, 1.0 / alpha), std::pow(c1 * e.gamma * e.gamma / (8.0 * c2), 1.0 / alpha)});
  e.beta = std::log(e.gamma) / std::log(e.rho);
  e.in_range = e.beta > 0.0 && e.beta < alpha;
  return e;
}

void write_harmonic_csv(const HarmonicProblem& problem, const std::vector<double>& h, std::ostream& os) {
  const LatticeWindow& w = problem.window;
  const int d = w.dim();
  for (int i = 0; i < d; ++i) os << 'y' << (i + 1) << ',';
  os << "in_domain,h\n";
  char buf[40];
  for (std::size_t k = 0; k < w.size(); ++k) {
    if (!problem.domain.contains_index(k) && h[k] == 0.0) continue;
    const Point y = w.point(k);
    for (int i = 0; i < d; ++i) os << y[i] << ',';
    std::snprintf(buf, sizeof buf, "%.17g", h[k]);
    os << (problem.domain.contains_index(k) ? 1 : 0) << ',' << buf << '\n';
  }
}

}  // namespace hklab
