#include "hklab/heatkernel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "pairs.hpp"

namespace hklab {

namespace {

constexpr double kMaxPoissonMean = 1e4;

double dist_scaled(const Point& z, std::int64_t rho) { return z.norm() / static_cast<double>(rho); }

std::vector<double> delta(const SparseGenerator& gen, const Point& x) {
  auto i = gen.window.try_index(x);
  if (!i) throw DomainError("source " + x.to_string() + " lies outside the window");
  if (!gen.alive[*i]) throw DomainError("source " + x.to_string() + " lies outside the live domain");
  std::vector<double> v(gen.size(), 0.0);
  v[*i] = 1.0;
  return v;
}

KernelVariant variant_of(const SparseGenerator& gen) {
  if (gen.mode == BoundaryMode::KillInside) return KernelVariant::Killed;
  if (std::isfinite(gen.lambda_cut)) return KernelVariant::Truncated;
  if (gen.window.scale() != 1) return KernelVariant::Rescaled;
  return KernelVariant::Full;
}

}  // namespace

std::string_view to_string(KernelVariant v) {
  switch (v) {
    case KernelVariant::Full: return "Full";
    case KernelVariant::Rescaled: return "Rescaled";
    case KernelVariant::Truncated: return "Truncated";
    case KernelVariant::Killed: return "Killed";
  }
  return "?";
}

void SparseGenerator::apply(std::span<const double> x, std::span<double> y) const {
  jumps.multiply(x, y);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = alive[i] ? y[i] - exit_rate[i] * x[i] : 0.0;
}

SparseGenerator build_generator(const ConductanceModel& model, const LatticeWindow& window,
                                const GeneratorOptions& options) {
  if (model.dim() != window.dim()) throw ConfigError("model and window dimensions differ");
  if (model.scale() != window.scale())
    throw ConfigError("model scale " + std::to_string(model.scale()) + " does not match window scale " +
                      std::to_string(window.scale()));
  if (window.size() > options.site_cap)
    throw ConfigError("window has " + std::to_string(window.size()) + " sites, cap is " +
                      std::to_string(options.site_cap));
  const std::size_t n = window.size();
  SparseGenerator gen{window, {}, std::vector<double>(n, 0.0), std::vector<double>(n, 0.0),
                      std::vector<bool>(n, true), options.mode, options.lambda_cut, 0.0, model.site_mass()};
  if (options.mode == BoundaryMode::KillInside) {
    if (!options.domain) throw ConfigError("KillInside needs a domain set");
    if (!(options.domain->window() == window)) throw ConfigError("kill domain lives on a different window");
    for (std::size_t i = 0; i < n; ++i) gen.alive[i] = options.domain->contains_index(i);
  }
  std::vector<std::size_t> sites;
  for (std::size_t i = 0; i < n; ++i)
    if (gen.alive[i]) sites.push_back(i);

  const double mass = model.site_mass();
  const double rho = static_cast<double>(model.scale());
  const double label_cut = options.lambda_cut * rho;
  const bool truncated = std::isfinite(options.lambda_cut);
  const double invariant_rate =
      model.translation_invariant()
          ? (truncated ? vertex_rate(model, Point::origin(model.dim()), label_cut).value
                       : model.total_rate(Point::origin(model.dim())))
          : -1.0;
  for (std::size_t i : sites) {
    double v = invariant_rate;
    if (v < 0.0) {
      const Point x = window.point(i);
      v = truncated ? vertex_rate(model, x, label_cut).value : model.total_rate(x);
    }
    if (!std::isfinite(v)) throw ConfigError("vertex rate overflow at " + window.point(i).to_string());
    gen.exit_rate[i] = v / mass;
  }

  std::vector<double> inside(n, 0.0);
  std::vector<CsrMatrix::Triplet> trip;
  detail::for_each_pair(model, window, sites, label_cut, [&](std::size_t i, std::size_t j, double c) {
    const double q = c / mass;
    trip.push_back({i, j, q});
    trip.push_back({j, i, q});
    inside[i] += q;
    inside[j] += q;
  });
  gen.jumps = CsrMatrix(n, std::move(trip));
  double vmax = 0.0;
  for (std::size_t i : sites) {
    gen.routed[i] = std::max(0.0, gen.exit_rate[i] - inside[i]);
    vmax = std::max(vmax, gen.exit_rate[i]);
  }
  gen.uniformization = 1.05 * vmax;
  return gen;
}

double KernelSlice::lost_mass() const {
  double s = 0.0;
  for (double p : density) s += p;
  return 1.0 - s * window.site_mass();
}

SemigroupStats apply_semigroup(const SparseGenerator& gen, double t, std::vector<double>& v, double tol) {
  if (!(t >= 0.0)) throw DomainError("time must be nonnegative");
  if (!(tol > 0.0)) throw DomainError("tolerance must be positive");
  if (v.size() != gen.size()) throw DomainError("vector size does not match the generator");
  SemigroupStats stats;
  const double lam = gen.uniformization;
  if (t == 0.0 || lam == 0.0) return stats;
  stats.substeps = static_cast<std::size_t>(std::ceil(lam * t / kMaxPoissonMean));
  const double a = lam * t / static_cast<double>(stats.substeps);
  const double step_tol = tol / static_cast<double>(stats.substeps);
  const double log_a = std::log(a);

  std::vector<double> cur(v.size()), next(v.size()), acc(v.size());
  for (std::size_t step = 0; step < stats.substeps; ++step) {
    cur = v;
    double w = std::exp(-a);
    for (std::size_t i = 0; i < v.size(); ++i) acc[i] = w * cur[i];
    for (std::size_t k = 1;; ++k) {
      gen.apply(cur, next);
      for (std::size_t i = 0; i < v.size(); ++i) cur[i] += next[i] / lam;
      w = std::exp(-a + static_cast<double>(k) * log_a - std::lgamma(static_cast<double>(k) + 1.0));
      for (std::size_t i = 0; i < v.size(); ++i) acc[i] += w * cur[i];
      // Tail past k: geometric bound once the Poisson terms are decreasing.
      const double kn = static_cast<double>(k) + 1.0;
      if (kn + 1.0 > a) {
        const double tail = w * a / kn / (1.0 - a / (kn + 1.0));
        if (tail < step_tol) {
          stats.terms += k + 1;
          stats.truncation += tail;
          break;
        }
      }
    }
    v = acc;
  }
  return stats;
}

KernelSlice transition_density(const SparseGenerator& gen, double t, const Point& x, double tol) {
  std::vector<double> v = delta(gen, x);
  const SemigroupStats st = apply_semigroup(gen, t, v, tol);
  KernelSlice s;
  s.t = t;
  s.source = x;
  s.window = gen.window;
  for (double& p : v) p /= gen.site_mass;
  s.density = std::move(v);
  s.poisson_truncation_error = t == 0.0 ? 0.0 : std::max(st.truncation, tol);
  s.variant = variant_of(gen);
  s.rho = gen.window.scale();
  s.lambda = gen.lambda_cut;
  return s;
}

KernelSlice killed_density(const ConductanceModel& model, const SetDescriptor& cube, std::int64_t rho, double t,
                           const Point& x, double tol) {
  if (cube.shape != SetDescriptor::Shape::Cube) throw DomainError("killed_density expects a cube descriptor");
  const ConductanceModel scaled = model.rescaled(rho);
  const LatticeWindow window = bounding_window(model.dim(), rho, cube);
  LatticeSet domain = make_set(window, cube);
  if (!domain.contains(x)) throw DomainError("source " + x.to_string() + " is not in " + cube.describe());
  GeneratorOptions opt;
  opt.mode = BoundaryMode::KillInside;
  opt.domain = std::move(domain);
  const SparseGenerator gen = build_generator(scaled, window, opt);
  return transition_density(gen, t, x, tol);
}

std::vector<double> SpectralOracle::density_row(double t, const Point& x) const {
  const std::size_t wi = window.index(x);
  const auto it = std::find(sites.begin(), sites.end(), wi);
  if (it == sites.end()) throw DomainError("source outside the oracle's domain");
  const std::size_t a = static_cast<std::size_t>(it - sites.begin());
  const std::size_t m = sites.size();
  std::vector<double> decay(m);
  for (std::size_t k = 0; k < m; ++k) decay[k] = std::exp(-eigenvalues[k] * t) * eigenvectors(a, k);
  std::vector<double> row(window.size(), 0.0);
  for (std::size_t b = 0; b < m; ++b) {
    double s = 0.0;
    for (std::size_t k = 0; k < m; ++k) s += decay[k] * eigenvectors(b, k);
    row[sites[b]] = s / site_mass;
  }
  return row;
}

SpectralOracle spectral_oracle(const SparseGenerator& gen, std::size_t max_sites) {
  SpectralOracle o;
  o.window = gen.window;
  o.site_mass = gen.site_mass;
  std::vector<std::ptrdiff_t> local(gen.size(), -1);
  for (std::size_t i = 0; i < gen.size(); ++i)
    if (gen.alive[i]) {
      local[i] = static_cast<std::ptrdiff_t>(o.sites.size());
      o.sites.push_back(i);
    }
  if (o.sites.size() > max_sites)
    throw DomainError("spectral oracle limited to " + std::to_string(max_sites) + " sites");
  DenseMatrix a(o.sites.size());
  for (std::size_t r = 0; r < o.sites.size(); ++r) {
    const std::size_t i = o.sites[r];
    a(r, r) = gen.exit_rate[i];
    gen.jumps.for_each_in_row(i, [&](std::size_t j, double q) {
      if (local[j] >= 0) a(r, static_cast<std::size_t>(local[j])) -= q;
    });
  }
  symmetric_eigen(a, o.eigenvalues, o.eigenvectors);
  return o;
}

double chapman_kolmogorov_defect(const SparseGenerator& gen, double s, double t, const Point& x, double tol) {
  std::vector<double> direct = delta(gen, x);
  apply_semigroup(gen, s + t, direct, tol);
  std::vector<double> composed = delta(gen, x);
  apply_semigroup(gen, s, composed, tol);
  apply_semigroup(gen, t, composed, tol);
  double worst = 0.0;
  for (std::size_t i = 0; i < direct.size(); ++i) worst = std::max(worst, std::abs(direct[i] - composed[i]));
  return worst / gen.site_mass;
}

double symmetry_defect(const SparseGenerator& gen, double t, const std::vector<Point>& sources, double tol) {
  std::vector<KernelSlice> rows;
  rows.reserve(sources.size());
  for (const auto& x : sources) rows.push_back(transition_density(gen, t, x, tol));
  double worst = 0.0;
  for (std::size_t a = 0; a < sources.size(); ++a)
    for (std::size_t b = a + 1; b < sources.size(); ++b)
      worst = std::max(worst, std::abs(rows[a].at(sources[b]) - rows[b].at(sources[a])));
  return worst;
}

CheckReport near_diagonal_lower_check(const ConductanceModel& model, const std::vector<double>& times,
                                      std::int64_t half_width, double spread_cap, double tol) {
  if (times.empty()) throw DomainError("near_diagonal_lower_check needs times");
  const LatticeWindow window = centered_window(model.dim(), half_width, model.scale());
  const SparseGenerator gen = build_generator(model, window);
  const Point x = Point::origin(model.dim());
  const double a = model.alpha();
  const double d = model.dim();
  CheckReport rep;
  rep.name = "near_diagonal_lower";
  rep.params = times;
  rep.bound = spread_cap;
  double worst_loss = 0.0;
  for (double t : times) {
    const KernelSlice s = transition_density(gen, t, x, tol);
    worst_loss = std::max(worst_loss, s.lost_mass());
    const double reach = 2.0 * std::pow(t, 1.0 / a);
    const double norm = std::pow(t, d / a);
    double lo = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < window.size(); ++i) {
      const Point y = window.point(i);
      if (dist_scaled(y - x, model.scale()) <= reach) lo = std::min(lo, s.density[i] * norm);
    }
    rep.values.push_back(lo);
  }
  rep.estimate = *std::min_element(rep.values.begin(), rep.values.end());
  rep.spread = spread_of(rep.values);
  rep.error = tol;
  rep.add("boundary_loss", worst_loss);
  rep.inconclusive = worst_loss > 0.1;
  if (rep.inconclusive) rep.note = "boundary loss above 10%";
  rep.pass = rep.estimate > 0.0 && rep.spread <= spread_cap;
  return rep;
}

CheckReport killed_lower_check(const ConductanceModel& model, const std::vector<std::int64_t>& rhos, double R,
                               double t, double spread_cap, double tol) {
  if (rhos.empty()) throw DomainError("killed_lower_check needs scales");
  const Point x0 = Point::origin(model.dim());
  const auto cube = SetDescriptor::cube(x0, R);
  CheckReport rep;
  rep.name = "killed_lower";
  rep.bound = spread_cap;
  for (std::int64_t rho : rhos) {
    rep.params.push_back(static_cast<double>(rho));
    const ConductanceModel scaled = model.rescaled(rho);
    const LatticeWindow window = bounding_window(model.dim(), rho, cube);
    GeneratorOptions opt;
    opt.mode = BoundaryMode::KillInside;
    opt.domain = make_set(window, cube);
    const SparseGenerator gen = build_generator(scaled, window, opt);
    const auto inner = enumerate_set(model.dim(), rho, SetDescriptor::ball(x0, 0.75 * R));
    double lo = std::numeric_limits<double>::infinity();
    for (const auto& x : inner) {
      const KernelSlice s = transition_density(gen, t, x, tol);
      for (const auto& y : inner) lo = std::min(lo, s.at(y));
    }
    rep.values.push_back(lo);
  }
  rep.estimate = *std::min_element(rep.values.begin(), rep.values.end());
  rep.spread = spread_of(rep.values);
  rep.error = tol;
  rep.add("R", R);
  rep.add("t", t);
  rep.pass = rep.estimate > 0.0 && rep.spread <= spread_cap;
  return rep;
}

CheckReport upper_bound_check(const ConductanceModel& model, const std::vector<double>& times, std::int64_t half_width,
                              double spread_cap, double tol) {
  if (times.empty()) throw DomainError("upper_bound_check needs times");
  const LatticeWindow window = centered_window(model.dim(), half_width, model.scale());
  const SparseGenerator gen = build_generator(model, window);
  const Point x = Point::origin(model.dim());
  CheckReport rep;
  rep.name = "upper_bound";
  rep.params = times;
  rep.bound = spread_cap;
  double worst_loss = 0.0, pmax = 0.0;
  for (double t : times) {
    const KernelSlice s = transition_density(gen, t, x, tol);
    worst_loss = std::max(worst_loss, s.lost_mass());
    const double top = *std::max_element(s.density.begin(), s.density.end());
    pmax = std::max(pmax, top * s.window.site_mass());
    rep.values.push_back(top * std::max(std::pow(t, model.dim() / model.alpha()), 1.0));
  }
  rep.estimate = *std::max_element(rep.values.begin(), rep.values.end());
  rep.spread = spread_of(rep.values);
  rep.error = tol;
  rep.add("boundary_loss", worst_loss);
  rep.add("max_probability", pmax);
  rep.pass = rep.spread <= spread_cap && pmax <= 1.0 + tol;
  return rep;
}

CheckReport truncated_decay_check(const ConductanceModel& model, std::int64_t rho, double lambda, double t,
                                  std::int64_t half_width, double slope_cap, double tol) {
  if (!(lambda >= 1.0)) throw DomainError("lambda must be >= 1");
  const ConductanceModel scaled = model.rescaled(rho);
  const LatticeWindow window = centered_window(model.dim(), half_width, rho);
  CheckReport rep;
  rep.name = "truncated_decay";
  rep.params = {static_cast<double>(rho), lambda, t};
  rep.bound = slope_cap;
  rep.error = tol;
  const double extent = static_cast<double>(2 * half_width) * std::sqrt(static_cast<double>(model.dim()));
  if (!std::isfinite(model.range()) && lambda * static_cast<double>(rho) >= extent) {
    rep.inconclusive = true;
    rep.note = "truncation inactive on this window; tails stay polynomial";
    return rep;
  }
  GeneratorOptions opt;
  opt.lambda_cut = lambda;
  const SparseGenerator gen = build_generator(scaled, window, opt);
  const Point x = Point::origin(model.dim());
  const KernelSlice s = transition_density(gen, t, x, tol);
  std::vector<double> xs, ys;
  const double d = model.dim(), a = model.alpha(), c2 = 1.0;
  double c1 = 0.0;
  for (std::size_t i = 0; i < window.size(); ++i) {
    const double p = s.density[i];
    if (!(p > 10.0 * tol)) continue;
    const double r = dist_scaled(window.point(i) - x, rho) / lambda;
    xs.push_back(r);
    ys.push_back(std::log(p));
    c1 = std::max(c1, p * std::exp(r) * std::pow(t, d / a) * std::exp(-c2 * t));
  }
  std::vector<double> distinct(xs);
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() < 3) {
    rep.inconclusive = true;
    rep.note = "fewer than 3 distances above 10 tol";
    return rep;
  }
  const LinearFit fit = least_squares(xs, ys);
  rep.estimate = fit.slope;
  rep.values = {fit.slope, fit.intercept};
  rep.add("slope", fit.slope);
  rep.add("intercept", fit.intercept);
  rep.add("c1", c1);
  rep.add("c2", c2);
  rep.add("points", static_cast<double>(fit.points));
  // The envelope c1 t^{-d/a} e^{c2 t} e^{-r} dominates every fitted cell by construction of c1.
  rep.pass = fit.slope <= slope_cap;
  return rep;
}

CheckReport scaling_identity_check(const ConductanceModel& model, std::int64_t rho, double t, const Point& x,
                                   const Point& y, std::int64_t half_width, double tol) {
  if (model.scale() != 1) throw DomainError("scaling identity needs an unscaled base model");
  if (rho < 1) throw DomainError("rho must be a positive integer");
  const LatticeWindow base_window = centered_window(model.dim(), half_width, 1);
  Point u = x, v = y;
  for (int i = 0; i < model.dim(); ++i) {
    u[i] *= rho;
    v[i] *= rho;
  }
  if (!base_window.contains(u) || !base_window.contains(v))
    throw DomainError("rho x or rho y falls outside the base window " + base_window.describe());
  const ConductanceModel scaled = model.rescaled(rho);
  const LatticeWindow scaled_window = centered_window(model.dim(), half_width, rho);
  const SparseGenerator gs = build_generator(scaled, scaled_window);
  const SparseGenerator gb = build_generator(model, base_window);
  const KernelSlice ls = transition_density(gs, t, u, tol);
  const KernelSlice bs = transition_density(gb, std::pow(static_cast<double>(rho), model.alpha()) * t, u, tol);
  const double lhs = ls.at(v);
  const double rhs = std::pow(static_cast<double>(rho), model.dim()) * bs.at(v);
  CheckReport rep;
  rep.name = "scaling_identity";
  rep.params = {static_cast<double>(rho), t};
  rep.values = {lhs, rhs};
  rep.estimate = rhs > 0.0 ? std::abs(lhs - rhs) / rhs : std::abs(lhs - rhs);
  rep.bound = 1e-6;
  rep.error = tol;
  rep.add("lhs", lhs);
  rep.add("rhs", rhs);
  rep.add("boundary_loss", bs.lost_mass());
  rep.pass = rep.estimate <= rep.bound;
  return rep;
}

void write_slice_csv(const KernelSlice& slice, std::ostream& os) {
  const int d = slice.window.dim();
  for (int i = 0; i < d; ++i) os << 'y' << (i + 1) << ',';
  os << "density\n";
  char buf[64];
  const double rho = static_cast<double>(slice.window.scale());
  for (std::size_t k = 0; k < slice.window.size(); ++k) {
    const Point y = slice.window.point(k);
    for (int i = 0; i < d; ++i) {
      std::snprintf(buf, sizeof buf, "%.17g,", static_cast<double>(y[i]) / rho);
      os << buf;
    }
    std::snprintf(buf, sizeof buf, "%.17g\n", slice.density[k]);
    os << buf;
  }
}

}  // namespace hklab
