#include "hklab/forms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "pairs.hpp"

namespace hklab {

namespace {

constexpr std::size_t kDenseLimit = 2000;
constexpr std::size_t kIterativeLimit = 20000;

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), std::size_t{0}); }
  std::size_t find(std::size_t a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

std::string points_to_string(const std::vector<Point>& pts, std::size_t limit = 8) {
  std::string s = "{";
  for (std::size_t i = 0; i < pts.size() && i < limit; ++i) s += (i ? "," : "") + pts[i].to_string();
  if (pts.size() > limit) s += ",...";
  return s + "}";
}

// sup of f'Nf / f'Df with D = Laplacian of `pairs` over n local sites. `weights` define N as
// the weighted centering form  diag(w) - w w' / sum(w)  restricted to `inner` (local indices).
RayleighResult solve_quotient(std::size_t n, const std::vector<QuadraticForm::Pair>& pairs,
                              const std::vector<std::size_t>& inner, const std::vector<double>& weights,
                              double pair_multiplicity) {
  const double wsum = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (n <= kDenseLimit) {
    DenseMatrix num(n), den(n);
    for (std::size_t a = 0; a < inner.size(); ++a) {
      num(inner[a], inner[a]) += weights[a];
      for (std::size_t b = 0; b < inner.size(); ++b) num(inner[a], inner[b]) -= weights[a] * weights[b] / wsum;
    }
    for (const auto& p : pairs) {
      const double c = pair_multiplicity * p.c;
      den(p.i, p.i) += c;
      den(p.j, p.j) += c;
      den(p.i, p.j) -= c;
      den(p.j, p.i) -= c;
    }
    return max_generalized_rayleigh_dense(num, den);
  }
  if (n > kIterativeLimit) throw DomainError("quotient problem too large: " + std::to_string(n) + " sites");
  std::vector<CsrMatrix::Triplet> trip;
  trip.reserve(4 * pairs.size());
  for (const auto& p : pairs) {
    const double c = pair_multiplicity * p.c;
    trip.push_back({p.i, p.i, c});
    trip.push_back({p.j, p.j, c});
    trip.push_back({p.i, p.j, -c});
    trip.push_back({p.j, p.i, -c});
  }
  const CsrMatrix lap(n, std::move(trip));
  LinearOperator den = [&](std::span<const double> x, std::span<double> y) { lap.multiply(x, y); };
  LinearOperator num = [&](std::span<const double> x, std::span<double> y) {
    std::fill(y.begin(), y.end(), 0.0);
    double mean = 0.0;
    for (std::size_t a = 0; a < inner.size(); ++a) mean += weights[a] * x[inner[a]];
    mean /= wsum;
    for (std::size_t a = 0; a < inner.size(); ++a) y[inner[a]] = weights[a] * (x[inner[a]] - mean);
  };
  return max_generalized_rayleigh_iterative(n, num, den, 1e-10, 10000);
}

}  // namespace

QuadraticForm make_form(const ConductanceModel& model, const LatticeWindow& window, bool exterior) {
  if (model.dim() != window.dim()) throw ConfigError("model and window dimensions differ");
  QuadraticForm form{window, {}, std::vector<double>(window.size(), window.site_mass()), {}};
  std::vector<double> inside(window.size(), 0.0);
  detail::for_each_pair(model, window, detail::all_sites(window), std::numeric_limits<double>::infinity(),
                        [&](std::size_t i, std::size_t j, double c) {
                          form.pairs.push_back({i, j, c});
                          inside[i] += c;
                          inside[j] += c;
                        });
  if (exterior) {
    form.killing.resize(window.size());
    for (std::size_t i = 0; i < window.size(); ++i)
      form.killing[i] = std::max(0.0, model.total_rate(window.point(i)) - inside[i]);
  }
  return form;
}

QuadraticForm make_form(const LatticeWindow& window, std::vector<QuadraticForm::Pair> pairs) {
  for (const auto& p : pairs)
    if (p.i >= window.size() || p.j >= window.size() || p.i == p.j || !(p.c >= 0.0))
      throw ConfigError("invalid pair in explicit form");
  return QuadraticForm{window, std::move(pairs), std::vector<double>(window.size(), window.site_mass()), {}};
}

double dirichlet_energy(const QuadraticForm& form, std::span<const double> f) {
  if (f.size() != form.size()) throw DomainError("function size does not match the form's window");
  double e = 0.0;
  for (const auto& p : form.pairs) {
    const double d = f[p.j] - f[p.i];
    e += d * d * p.c;
  }
  for (std::size_t i = 0; i < form.killing.size(); ++i) e += f[i] * f[i] * form.killing[i];
  return e;
}

std::vector<std::vector<std::size_t>> components(const QuadraticForm& form) {
  UnionFind uf(form.size());
  for (const auto& p : form.pairs)
    if (p.c > 0.0) uf.unite(p.i, p.j);
  std::vector<std::vector<std::size_t>> groups;
  std::vector<std::ptrdiff_t> slot(form.size(), -1);
  for (std::size_t i = 0; i < form.size(); ++i) {
    const std::size_t r = uf.find(i);
    if (slot[r] < 0) {
      slot[r] = static_cast<std::ptrdiff_t>(groups.size());
      groups.emplace_back();
    }
    groups[static_cast<std::size_t>(slot[r])].push_back(i);
  }
  return groups;
}

PoincareResult poincare_constant_on_sets(const ConductanceModel& model, const LatticeSet& inner, const LatticeSet& outer,
                                         double r) {
  if (!(inner.window() == outer.window())) throw DomainError("inner and outer sets need a shared window");
  if (!inner.subset_of(outer)) throw DomainError("inner set must lie inside the outer set");
  const LatticeWindow& window = outer.window();
  const auto outer_idx = outer.indices();
  std::vector<std::ptrdiff_t> local(window.size(), -1);
  for (std::size_t k = 0; k < outer_idx.size(); ++k) local[outer_idx[k]] = static_cast<std::ptrdiff_t>(k);

  std::vector<QuadraticForm::Pair> pairs;
  detail::for_each_pair(model, window, outer_idx, std::numeric_limits<double>::infinity(),
                        [&](std::size_t i, std::size_t j, double c) {
                          pairs.push_back({static_cast<std::size_t>(local[i]), static_cast<std::size_t>(local[j]), c});
                        });

  PoincareResult res;
  res.sites = outer.points();
  const std::size_t n = outer_idx.size();

  UnionFind uf(n);
  for (const auto& p : pairs) uf.unite(p.i, p.j);
  std::vector<std::size_t> roots;
  for (std::size_t i = 0; i < n; ++i) roots.push_back(uf.find(i));
  std::vector<std::size_t> distinct(roots);
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() > 1) {
    res.connected = false;
    res.constant = std::numeric_limits<double>::infinity();
    res.ratio = res.constant;
    // Witness: the component not containing the first site.
    std::vector<Point> comp;
    for (std::size_t i = 0; i < n; ++i)
      if (roots[i] == distinct[1]) comp.push_back(res.sites[i]);
    res.witness = "A4 fails on this window: disconnected component " + points_to_string(comp) + " of " +
                  std::to_string(distinct.size()) + " components";
    res.method = "components";
    return res;
  }

  std::vector<std::size_t> inner_local;
  for (std::size_t i : inner.indices()) inner_local.push_back(static_cast<std::size_t>(local[i]));
  const std::vector<double> weights(inner_local.size(), window.site_mass());
  const RayleighResult rq = solve_quotient(n, pairs, inner_local, weights, 1.0);
  res.ratio = rq.value;
  res.constant = rq.value / std::pow(r, model.alpha());
  res.extremal = rq.vector;
  res.method = rq.method;
  return res;
}

PoincareResult best_poincare_constant(const ConductanceModel& model, const Point& center, double r, double kappa5) {
  if (!(kappa5 >= 1.0)) throw DomainError("kappa5 must be >= 1");
  if (!(r > 0.0)) throw DomainError("cube half-side must be positive");
  const auto outer_desc = SetDescriptor::cube(center, kappa5 * r);
  const LatticeWindow window = bounding_window(model.dim(), model.scale(), outer_desc);
  const LatticeSet outer = make_set(window, outer_desc);
  const LatticeSet inner = make_set(window, SetDescriptor::cube(center, r));
  return poincare_constant_on_sets(model, inner, outer, r);
}

double nash_ratio(const QuadraticForm& form, std::span<const double> f, double alpha, int d) {
  if (f.size() != form.size()) throw DomainError("function size does not match the form's window");
  double l1 = 0.0, l2 = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    l1 += std::abs(f[i]) * form.mass[i];
    l2 += f[i] * f[i] * form.mass[i];
  }
  if (l2 == 0.0) throw DomainError("nash_ratio of the zero function");
  const double e = dirichlet_energy(form, f);
  if (e == 0.0) return std::numeric_limits<double>::infinity();
  const double p = alpha / d;
  return std::pow(l2, 1.0 + p) / (e * std::pow(l1, 2.0 * p));
}

NashSurvey nash_survey(const ConductanceModel& model, const LatticeWindow& window, std::size_t count, std::uint64_t seed,
                       const std::vector<double>& s_grid) {
  const QuadraticForm form = make_form(model, window, true);
  const int d = model.dim();
  const double alpha = model.alpha();
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<std::vector<double>> funcs;
  funcs.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    std::vector<double> f(window.size(), 0.0);
    // Random centre and radius; the support always stays inside the window.
    Point c(d);
    double max_rad = std::numeric_limits<double>::infinity();
    for (int i = 0; i < d; ++i) {
      const auto ext = window.upper()[i] - window.lower()[i];
      c[i] = window.lower()[i] + ext / 4 + static_cast<std::int64_t>(unit(gen) * static_cast<double>(ext / 2));
      max_rad = std::min({max_rad, static_cast<double>(c[i] - window.lower()[i]),
                          static_cast<double>(window.upper()[i] - 1 - c[i])});
    }
    const double rad = 1.0 + unit(gen) * std::max(0.0, max_rad - 1.0);
    const int type = static_cast<int>(k % 3);
    for (std::size_t i = 0; i < window.size(); ++i) {
      const Point x = window.point(i);
      const double dist2 = (x - c).norm2();
      if (type == 0) f[i] = std::max(0.0, rad * rad - dist2);
      else if (type == 1) f[i] = static_cast<double>((x - c).max_norm()) < rad ? 1.0 : 0.0;
      else f[i] = dist2 < rad * rad ? unit(gen) : 0.0;
    }
    if (std::all_of(f.begin(), f.end(), [](double v) { return v == 0.0; })) f[window.index(c)] = 1.0;
    funcs.push_back(std::move(f));
  }

  NashSurvey out;
  for (std::size_t k = 0; k < funcs.size(); ++k) {
    const double q = nash_ratio(form, funcs[k], alpha, d);
    if (q > out.sup_ratio) {
      out.sup_ratio = q;
      out.argmax = k;
    }
  }
  // With c5 = 1 the Nash inequality implies the s-family with c4 = sup ratio.
  out.c4 = out.sup_ratio;
  out.c5 = 1.0;
  for (const auto& f : funcs) {
    double l1 = 0.0, l2 = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
      l1 += std::abs(f[i]) * form.mass[i];
      l2 += f[i] * f[i] * form.mass[i];
    }
    const double e = dirichlet_energy(form, f);
    for (double s : s_grid) {
      const double rhs = out.c4 * std::pow(s, alpha) * e + out.c5 * std::pow(s, -d) * l1 * l1;
      out.worst_chain_slack = std::max(out.worst_chain_slack, l2 / rhs);
    }
  }
  out.chain_holds = out.worst_chain_slack <= 1.0 + 1e-12;
  return out;
}

WeightProfile weight_phi(const Point& x0, double R, std::int64_t rho) {
  if (!(R > 0.0)) throw DomainError("weight_phi needs R > 0");
  if (rho < 1) throw DomainError("weight_phi needs a positive integer scale");
  WeightProfile w;
  w.center = x0;
  w.radius = R;
  w.scale = rho;
  w.sites = enumerate_set(x0.dim, rho, SetDescriptor::cube(x0, R));
  if (w.sites.empty()) throw DomainError("weight_phi: empty cube");
  double total = 0.0;
  for (const auto& x : w.sites) {
    const double m = static_cast<double>((x - x0).max_norm()) / static_cast<double>(rho);
    const double v = std::max(0.0, R * R - m * m);
    w.values.push_back(v);
    total += v;
  }
  const double target = std::pow(static_cast<double>(rho), x0.dim);
  w.c1 = target / total;
  for (double& v : w.values) v *= w.c1;
  return w;
}

bool weighted_radius_on_grid(double R, std::int64_t rho) {
  const double t = R * static_cast<double>(rho);
  if (t < 0.25) return false;
  const double frac = t - std::floor(t);
  return frac >= 0.25 - 1e-12 || frac <= 1e-12;
}

RayleighResult weighted_rayleigh(std::span<const double> weights, const std::vector<QuadraticForm::Pair>& pairs) {
  std::vector<std::size_t> inner(weights.size());
  std::iota(inner.begin(), inner.end(), std::size_t{0});
  return solve_quotient(weights.size(), pairs, inner, std::vector<double>(weights.begin(), weights.end()), 2.0);
}

PoincareResult weighted_poincare_constant(const ConductanceModel& model, const Point& x0, double R, std::int64_t rho) {
  const ConductanceModel scaled = model.rescaled(rho);
  const WeightProfile phi = weight_phi(x0, R, rho);
  const auto desc = SetDescriptor::cube(x0, R);
  const LatticeWindow window = bounding_window(model.dim(), rho, desc);
  const LatticeSet cube = make_set(window, desc);
  const auto idx = cube.indices();

  std::vector<double> phi_at(window.size(), 0.0);
  for (std::size_t k = 0; k < phi.sites.size(); ++k) phi_at[window.index(phi.sites[k])] = phi.values[k];
  std::vector<std::ptrdiff_t> local(window.size(), -1);
  for (std::size_t k = 0; k < idx.size(); ++k) local[idx[k]] = static_cast<std::ptrdiff_t>(k);

  std::vector<QuadraticForm::Pair> pairs;
  detail::for_each_pair(scaled, window, idx, std::numeric_limits<double>::infinity(),
                        [&](std::size_t i, std::size_t j, double c) {
                          const double k = std::min(phi_at[i], phi_at[j]) * c;
                          if (k > 0.0) pairs.push_back({static_cast<std::size_t>(local[i]), static_cast<std::size_t>(local[j]), k});
                        });
  std::vector<double> w(idx.size());
  const double mass = scaled.site_mass();
  for (std::size_t k = 0; k < idx.size(); ++k) w[k] = phi_at[idx[k]] * mass;

  PoincareResult res;
  res.sites = cube.points();
  res.on_grid = weighted_radius_on_grid(R, rho);
  if (!res.on_grid) res.witness = "R outside the admissible grid for this rho";

  UnionFind uf(idx.size());
  for (const auto& p : pairs) uf.unite(p.i, p.j);
  for (std::size_t k = 1; k < idx.size(); ++k) {
    if (uf.find(k) != uf.find(0)) {
      res.connected = false;
      res.constant = res.ratio = std::numeric_limits<double>::infinity();
      res.witness = "weighted form disconnected at " + res.sites[k].to_string();
      return res;
    }
  }
  const RayleighResult rq = weighted_rayleigh(w, pairs);
  res.ratio = rq.value;
  res.constant = rq.value / std::pow(R, model.alpha());
  res.extremal = rq.vector;
  res.method = rq.method;
  return res;
}

AssumptionReport check_A4_scaling(const ConductanceModel& model, const std::vector<double>& sides, double kappa5,
                                  double spread_cap) {
  if (sides.empty()) throw DomainError("check_A4_scaling needs at least one cube side");
  AssumptionReport rep;
  rep.assumption = AssumptionId::A4;
  rep.parameters = sides;
  rep.bound = spread_cap;
  rep.pass = true;
  const Point origin = Point::origin(model.dim());
  for (double side : sides) {
    const PoincareResult pr = best_poincare_constant(model, origin, side / 2.0, kappa5);
    rep.ratios.push_back(pr.constant);
    if (!pr.connected) {
      rep.pass = false;
      if (rep.witness.empty()) rep.witness = pr.witness;
    }
  }
  rep.constant = *std::max_element(rep.ratios.begin(), rep.ratios.end());
  const double lo = *std::min_element(rep.ratios.begin(), rep.ratios.end());
  rep.spread = lo > 0.0 ? rep.constant / lo : std::numeric_limits<double>::infinity();
  rep.growth = rep.ratios.front() > 0.0 ? rep.constant / rep.ratios.front() : std::numeric_limits<double>::infinity();
  if (!std::isfinite(rep.constant) || rep.spread > spread_cap) rep.pass = false;
  std::ostringstream os;
  os << "cubes centred at origin, kappa5=" << kappa5;
  rep.window = os.str();
  return rep;
}

}  // namespace hklab
