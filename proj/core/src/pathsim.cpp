#include "hklab/pathsim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include "hklab/linalg.hpp"

namespace hklab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::uint64_t kStreamsPerBatch = std::uint64_t{1} << 40;

double ball_point_estimate(const ConductanceModel& model, double r) {
  if (model.kind() == ModelKind::AxisStableLike) return 2.0 * model.dim() * r;
  const double d = model.dim();
  return std::pow(std::numbers::pi, d / 2.0) / std::tgamma(d / 2.0 + 1.0) * std::pow(r + 1.0, d);
}

std::vector<double> run_paths(std::size_t n, std::size_t threads, std::vector<char>& censored,
                              const std::function<double(std::size_t, bool&)>& fn) {
  std::vector<double> values(n, 0.0);
  censored.assign(n, 0);
  parallel_for(n, threads, [&](std::size_t i) {
    bool c = false;
    values[i] = fn(i, c);
    censored[i] = c ? 1 : 0;
  });
  return values;
}

EstimatorResult collect(const std::vector<double>& values, const std::vector<char>& censored, std::uint64_t seed,
                        std::uint64_t hash) {
  std::vector<double> kept;
  kept.reserve(values.size());
  std::size_t c = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (censored[i]) ++c;
    else kept.push_back(values[i]);
  }
  EstimatorResult r = summarize(kept, c, seed, hash);
  r.inconclusive = r.censored_fraction() > 0.01;
  return r;
}

}  // namespace

// ---------------------------------------------------------------------------
// alias table

AliasTable::AliasTable(std::span<const double> weights) : prob_(weights.size(), 0.0), alias_(weights.size(), 0) {
  const std::size_t n = weights.size();
  if (n == 0) throw DomainError("alias table needs at least one weight");
  if (n > std::numeric_limits<std::uint32_t>::max()) throw DomainError("alias table too large");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw DomainError("alias weights must be finite and nonnegative");
    total += w;
  }
  if (!(total > 0.0)) throw DomainError("alias weights sum to zero");
  std::vector<double> scaled(n);
  std::vector<std::uint32_t> small, large;
  for (std::size_t i = 0; i < n; ++i) {
    scaled[i] = weights[i] * static_cast<double>(n) / total;
    (scaled[i] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(i));
  }
  while (!small.empty() && !large.empty()) {
    const std::uint32_t s = small.back(), l = large.back();
    small.pop_back();
    prob_[s] = scaled[s];
    alias_[s] = l;
    scaled[l] = (scaled[l] + scaled[s]) - 1.0;
    if (scaled[l] < 1.0) {
      large.pop_back();
      small.push_back(l);
    }
  }
  for (std::uint32_t i : large) {
    prob_[i] = 1.0;
    alias_[i] = i;
  }
  for (std::uint32_t i : small) {
    prob_[i] = 1.0;
    alias_[i] = i;
  }
}

std::size_t AliasTable::sample(double u_index, double u_coin) const {
  const std::size_t n = prob_.size();
  std::size_t i = static_cast<std::size_t>(u_index * static_cast<double>(n));
  if (i >= n) i = n - 1;
  return u_coin < prob_[i] ? i : alias_[i];
}

double AliasTable::probability(std::size_t i) const {
  double p = prob_[i];
  for (std::size_t j = 0; j < prob_.size(); ++j)
    if (alias_[j] == i && j != i) p += 1.0 - prob_[j];
  return p / static_cast<double>(prob_.size());
}

// ---------------------------------------------------------------------------
// sampler

std::string_view to_string(TailPolicy p) { return p == TailPolicy::Censor ? "censor" : "reject"; }

TailPolicy parse_tail_policy(std::string_view s) {
  if (s == "censor") return TailPolicy::Censor;
  if (s == "reject") return TailPolicy::Reject;
  throw ConfigError("unknown tail policy '" + std::string(s) + "'");
}

std::string_view to_string(CensorReason r) {
  switch (r) {
    case CensorReason::None: return "none";
    case CensorReason::Tail: return "tail";
    case CensorReason::Window: return "window";
  }
  return "?";
}

std::shared_ptr<const JumpSampler::Table> JumpSampler::build_table(const ConductanceModel& model,
                                                                   const SamplerOptions& options) {
  auto t = std::make_shared<Table>();
  t->dim = model.dim();
  const bool invariant = model.translation_invariant();
  const double mass = model.site_mass();
  double radius = model.range();
  if (!std::isfinite(radius)) {
    const double v = model.total_rate(Point::origin(model.dim()));
    radius = 16.0;
    while (model.envelope_tail_bound(radius) / v >= options.tail_target) {
      const double next = radius * 1.2;
      if (ball_point_estimate(model, next) > static_cast<double>(options.max_points)) break;
      radius = next;
    }
    t->tail = model.envelope_tail_bound(radius) / mass;
  }
  t->radius = radius;
  auto push = [&](const Point& z, double c) {
    if (!(c > 0.0)) return;
    for (int i = 0; i < t->dim; ++i) t->offsets.push_back(z[i]);
    t->rates.push_back(c / mass);
  };
  if (invariant) model.for_each_displacement(radius, push);
  else model.for_each_envelope_point(radius, push);
  if (t->rates.empty()) throw ConfigError("model " + model.id() + " has no jumps to sample");
  t->alias = AliasTable(t->rates);
  for (double r : t->rates) t->enumerated += r;
  if (invariant && std::isfinite(model.range()) == false && model.total_rate_exact()) {
    // Exact total known: the tail is what the enumeration misses.
    t->tail = std::max(0.0, model.total_rate(Point::origin(model.dim())) / mass - t->enumerated);
  }
  return t;
}

JumpSampler::JumpSampler(const ConductanceModel& model, SamplerOptions options)
    : model_(model), options_(std::move(options)) {
  if (options_.window && options_.window->dim() != model.dim()) throw ConfigError("sampler window dimension mismatch");
  table_ = build_table(model_, options_);
  thinned_ = !model_.translation_invariant();
}

double JumpSampler::exit_rate(const Point& x) const {
  if (thinned_) return model_.total_rate(x) / model_.site_mass();
  return table_->enumerated + (options_.policy == TailPolicy::Censor ? table_->tail : 0.0);
}

double JumpSampler::tail_probability(const Point&) const {
  const double total = table_->enumerated + table_->tail;
  return table_->tail / total;
}

JumpSampler::Jump JumpSampler::step(const Point& x, RandomStream& rng) const {
  const Table& t = *table_;
  const bool censor = options_.policy == TailPolicy::Censor;
  const double total = t.enumerated + (censor ? t.tail : 0.0);
  Jump j;
  j.target = x;
  for (;;) {
    j.hold += rng.exponential(total);
    if (censor && t.tail > 0.0 && rng.uniform() * total < t.tail) {
      j.tail = true;
      return j;
    }
    const double ui = rng.uniform();
    const std::size_t k = t.alias.sample(ui, rng.uniform());
    Point y = x;
    for (int i = 0; i < t.dim; ++i) y[i] += t.offsets[k * static_cast<std::size_t>(t.dim) + static_cast<std::size_t>(i)];
    if (thinned_) {
      // Accept with probability C(x,y) / envelope; a rejection is a fictitious self-jump.
      const double c = model_.rate(x, y) / model_.site_mass();
      if (rng.uniform() * t.rates[k] >= c) continue;
    }
    j.target = y;
    return j;
  }
}

void JumpSampler::for_each_target(const Point& x, const std::function<void(const Point&, double)>& fn) const {
  const Table& t = *table_;
  for (std::size_t k = 0; k < t.rates.size(); ++k) {
    Point y = x;
    for (int i = 0; i < t.dim; ++i) y[i] += t.offsets[k * static_cast<std::size_t>(t.dim) + static_cast<std::size_t>(i)];
    fn(y, thinned_ ? model_.rate(x, y) / model_.site_mass() : t.rates[k]);
  }
}

// ---------------------------------------------------------------------------
// paths

PathSample sample_path(const JumpSampler& sampler, const Point& x0, double horizon, std::uint64_t seed,
                       std::uint64_t stream, const StopRule& stop) {
  if (!(horizon >= 0.0)) throw DomainError("horizon must be nonnegative");
  if (std::isinf(horizon) && !stop) throw DomainError("an infinite horizon needs a stop rule");
  const auto& window = sampler.options().window;
  if (window && !window->contains(x0)) throw DomainError("start " + x0.to_string() + " outside the window");
  PathSample p;
  p.seed = seed;
  p.stream = stream;
  p.horizon = horizon;
  p.times.push_back(0.0);
  p.states.push_back(x0);
  p.end_time = horizon;
  if (stop && stop(x0)) {
    p.stopped = true;
    p.end_time = 0.0;
    return p;
  }
  if (horizon == 0.0) return p;
  RandomStream rng(seed, stream);
  double t = 0.0;
  Point x = x0;
  for (;;) {
    const JumpSampler::Jump j = sampler.step(x, rng);
    t += j.hold;
    if (t >= horizon) break;
    if (j.tail) {
      p.censored = true;
      p.reason = CensorReason::Tail;
      p.end_time = t;
      break;
    }
    x = j.target;
    p.times.push_back(t);
    p.states.push_back(x);
    if (window && !window->contains(x)) {
      p.censored = true;
      p.reason = CensorReason::Window;
      p.end_time = t;
      break;
    }
    if (stop && stop(x)) {
      p.stopped = true;
      p.end_time = t;
      break;
    }
  }
  return p;
}

PathSample sample_path(const ConductanceModel& model, const Point& x0, double horizon, const LatticeWindow& window,
                       std::uint64_t seed) {
  SamplerOptions opt;
  opt.window = window;
  const JumpSampler sampler(model, opt);
  return sample_path(sampler, x0, horizon, seed);
}

void write_path_csv(const PathSample& path, std::ostream& os) {
  const int d = path.states.front().dim;
  os << 't';
  for (int i = 0; i < d; ++i) os << ",x" << (i + 1);
  os << '\n';
  char buf[40];
  for (std::size_t k = 0; k < path.states.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.17g", path.times[k]);
    os << buf;
    for (int i = 0; i < d; ++i) os << ',' << path.states[k][i];
    os << '\n';
  }
}

// ---------------------------------------------------------------------------
// aggregation

void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn) {
  threads = std::max<std::size_t>(1, std::min(threads, n));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  const std::size_t block = (n + threads - 1) / threads;
  for (std::size_t w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w * block; i < std::min(n, (w + 1) * block); ++i) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

EstimatorResult summarize(std::span<const double> samples, std::size_t censored, std::uint64_t seed,
                          std::uint64_t config_hash) {
  EstimatorResult r;
  r.n_samples = samples.size();
  r.censored = censored;
  r.seed = seed;
  r.config_hash = config_hash;
  if (samples.empty()) {
    r.inconclusive = true;
    return r;
  }
  const double m = static_cast<double>(samples.size());
  r.value = pairwise_sum(samples) / m;
  if (samples.size() > 1) {
    std::vector<double> dev(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) dev[i] = (samples[i] - r.value) * (samples[i] - r.value);
    r.std_error = std::sqrt(pairwise_sum(dev) / (m - 1.0) / m);
  }
  return r;
}

// ---------------------------------------------------------------------------
// estimators

EstimatorResult estimate_exit_prob(const ConductanceModel& model, const Point& x, double a, double R, double gamma,
                                   std::size_t n, std::uint64_t seed, const SimOptions& options) {
  if (!(a > 0.0) || !(R > 0.0) || !(gamma >= 0.0)) throw DomainError("exit probability needs a, R > 0 and gamma >= 0");
  const double radius = a * R;
  if (const auto& w = options.sampler.window) {
    const auto margin = static_cast<std::int64_t>(std::ceil(2.0 * radius));
    for (int i = 0; i < model.dim(); ++i)
      if (x[i] - margin < w->lower()[i] || x[i] + margin >= w->upper()[i])
        throw DomainError("window margin around B(x, aR) is smaller than aR");
  }
  if (gamma == 0.0) {
    EstimatorResult r;
    r.n_samples = n;
    r.seed = seed;
    r.config_hash = options.config_hash;
    return r;
  }
  const double horizon = gamma * std::pow(R, model.alpha());
  const JumpSampler sampler(model, options.sampler);
  const StopRule outside = [&](const Point& y) { return (y - x).norm() >= radius; };
  std::vector<char> cens;
  const auto vals = run_paths(n, options.threads, cens, [&](std::size_t i, bool& c) {
    const PathSample p = sample_path(sampler, x, horizon, seed, i, outside);
    c = p.censored;
    return p.stopped ? 1.0 : 0.0;
  });
  return collect(vals, cens, seed, options.config_hash);
}

std::vector<Point> half_ball(const Point& x, double radius) {
  std::vector<Point> out;
  for (const auto& y : enumerate_set(x.dim, 1, SetDescriptor::ball(x, radius)))
    if (y[0] > x[0]) out.push_back(y);
  return out;
}

EstimatorResult estimate_hitting_prob(const ConductanceModel& model, const Point& x, const std::vector<Point>& A,
                                      double r, std::size_t n, std::uint64_t seed, double eta,
                                      const SimOptions& options) {
  if (A.empty()) throw DomainError("target set A is empty");
  if (!(eta > 0.0 && eta < 1.0)) throw DomainError("eta must lie in (0,1)");
  std::unordered_set<Point, PointHash> target;
  for (const auto& p : A) {
    if (!((p - x).norm() < eta * r))
      throw DomainError("A must lie inside B(x, eta r); " + p.to_string() + " does not");
    target.insert(p);
  }
  const JumpSampler sampler(model, options.sampler);
  const StopRule stop = [&](const Point& y) { return target.count(y) > 0 || (y - x).norm() >= r; };
  std::vector<char> cens;
  const auto vals = run_paths(n, options.threads, cens, [&](std::size_t i, bool& c) {
    const PathSample p = sample_path(sampler, x, kInf, seed, i, stop);
    c = p.censored;
    return target.count(p.states.back()) ? 1.0 : 0.0;
  });
  return collect(vals, cens, seed, options.config_hash);
}

ExitTimeStudy expected_exit_time(const ConductanceModel& model, const Point& x, const std::vector<double>& radii,
                                 std::size_t n, std::uint64_t seed, const SimOptions& options) {
  if (radii.empty()) throw DomainError("expected_exit_time needs radii");
  for (std::size_t k = 1; k < radii.size(); ++k)
    if (!(radii[k] > radii[k - 1])) throw DomainError("radii must be increasing");
  const JumpSampler sampler(model, options.sampler);
  ExitTimeStudy study;
  study.radii = radii;
  for (std::size_t k = 0; k < radii.size(); ++k) {
    const double r = radii[k];
    const StopRule outside = [&](const Point& y) { return (y - x).norm() >= r; };
    std::vector<char> cens;
    const auto vals = run_paths(n, options.threads, cens, [&](std::size_t i, bool& c) {
      const PathSample p = sample_path(sampler, x, kInf, seed, k * kStreamsPerBatch + i, outside);
      c = p.censored;
      return p.end_time;
    });
    study.per_radius.push_back(collect(vals, cens, seed, options.config_hash));
    study.inconclusive = study.inconclusive || study.per_radius.back().inconclusive;
  }
  if (radii.size() >= 2) {
    std::vector<double> lx, ly;
    for (std::size_t k = 0; k < radii.size(); ++k) {
      lx.push_back(std::log(radii[k]));
      ly.push_back(std::log(study.per_radius[k].value));
    }
    study.slope = least_squares(lx, ly).slope;
  }
  return study;
}

double green_potential(const ConductanceModel& model, const Point& x, double r,
                       const std::function<double(const Point&)>& g) {
  const auto sites = enumerate_set(model.dim(), model.scale(), SetDescriptor::ball(x, r));
  if (sites.empty()) throw DomainError("empty ball");
  const std::size_t m = sites.size();
  const double mass = model.site_mass();
  std::vector<double> v(m), b(m);
  std::size_t origin = 0;
  for (std::size_t i = 0; i < m; ++i) {
    v[i] = model.total_rate(sites[i]) / mass;
    b[i] = g(sites[i]);
    if (sites[i] == x) origin = i;
  }
  if (m <= 2000) {
    DenseMatrix a(m);
    for (std::size_t i = 0; i < m; ++i) {
      a(i, i) = v[i];
      for (std::size_t j = 0; j < m; ++j)
        if (i != j) a(i, j) = -model.rate(sites[i], sites[j]) / mass;
    }
    return dense_spd_solve(a, b)[origin];
  }
  LinearOperator op = [&](std::span<const double> in, std::span<double> out) {
    for (std::size_t i = 0; i < m; ++i) {
      double s = v[i] * in[i];
      for (std::size_t j = 0; j < m; ++j)
        if (i != j) s -= model.rate(sites[i], sites[j]) / mass * in[j];
      out[i] = s;
    }
  };
  std::vector<double> u(m, 0.0);
  const CgResult cg = conjugate_gradient(op, b, u, 1e-12, 100000);
  if (!cg.converged) throw DomainError("green_potential: CG did not converge");
  return u[origin];
}

CheckReport levy_system_check(const ConductanceModel& model, const Point& x, const PairFunction& f, double r,
                              std::size_t n, std::uint64_t seed, const SimOptions& options) {
  const JumpSampler sampler(model, options.sampler);
  const auto ball = enumerate_set(model.dim(), 1, SetDescriptor::ball(x, r));
  std::unordered_map<Point, double, PointHash> g;
  for (const auto& z : ball) {
    double s = 0.0;
    sampler.for_each_target(z, [&](const Point& y, double q) { s += f(z, y) * q; });
    g[z] = s;
  }
  const StopRule outside = [&](const Point& y) { return (y - x).norm() >= r; };
  std::vector<double> lhs(n), rhs(n);
  std::vector<char> cens(n, 0);
  parallel_for(n, options.threads, [&](std::size_t i) {
    const PathSample p = sample_path(sampler, x, kInf, seed, i, outside);
    cens[i] = p.censored ? 1 : 0;
    double l = 0.0, rr = 0.0;
    const std::size_t m = p.states.size();
    for (std::size_t k = 1; k < m; ++k) l += f(p.states[k - 1], p.states[k]);
    // Holding intervals inside the ball; the last state is outside when the path stopped.
    const std::size_t inside = p.stopped ? m - 1 : m;
    for (std::size_t k = 0; k < inside; ++k) {
      const double until = k + 1 < m ? p.times[k + 1] : p.end_time;
      rr += (until - p.times[k]) * g.at(p.states[k]);
    }
    lhs[i] = l;
    rhs[i] = rr;
  });
  const EstimatorResult L = collect(lhs, cens, seed, options.config_hash);
  const EstimatorResult R = collect(rhs, cens, seed, options.config_hash);
  CheckReport rep;
  rep.name = "levy_system";
  rep.params = {r, static_cast<double>(n)};
  rep.values = {L.value, R.value};
  rep.estimate = L.value - R.value;
  rep.error = L.std_error + R.std_error;
  rep.bound = 3.0 * rep.error;
  rep.add("lhs", L.value);
  rep.add("rhs", R.value);
  rep.add("se_lhs", L.std_error);
  rep.add("se_rhs", R.std_error);
  rep.add("censored_fraction", L.censored_fraction());
  if (ball.size() <= 2000) rep.add("exact_rhs", green_potential(model, x, r, [&](const Point& z) { return g.at(z); }));
  rep.inconclusive = L.inconclusive;
  if (rep.inconclusive) rep.note = "censored fraction above 1%";
  rep.pass = std::abs(rep.estimate) <= rep.bound;
  return rep;
}

}  // namespace hklab
