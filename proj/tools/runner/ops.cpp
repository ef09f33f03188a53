#include "ops.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <hklab/forms.hpp>
#include <hklab/harmonic.hpp>
#include <hklab/heatkernel.hpp>
#include <hklab/pathsim.hpp>

namespace hklab::cli {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

json nums_json(const std::vector<double>& v) { return json(v); }

std::string kind_name(ParamKind k) {
  switch (k) {
    case ParamKind::Number: return "number";
    case ParamKind::Integer: return "integer";
    case ParamKind::Bool: return "bool";
    case ParamKind::String: return "string";
    case ParamKind::Point: return "point";
    case ParamKind::NumberList: return "number list";
    case ParamKind::IntegerList: return "integer list";
  }
  return "?";
}

bool is_integral(const json& v) {
  if (v.is_number_integer()) return true;
  if (!v.is_number_float()) return false;
  const double d = v.get<double>();
  return std::isfinite(d) && d == std::floor(d) && std::abs(d) < 9e15;
}

bool matches(ParamKind kind, const json& v, int dim) {
  if (v.is_null()) return kind == ParamKind::Number || kind == ParamKind::Point;
  switch (kind) {
    case ParamKind::Number: return v.is_number();
    case ParamKind::Integer: return is_integral(v);
    case ParamKind::Bool: return v.is_boolean();
    case ParamKind::String: return v.is_string();
    case ParamKind::Point:
      return v.is_array() && v.size() == static_cast<std::size_t>(dim) &&
             std::all_of(v.begin(), v.end(), [](const json& e) { return is_integral(e); });
    case ParamKind::NumberList:
      return v.is_array() && !v.empty() && std::all_of(v.begin(), v.end(), [](const json& e) { return e.is_number(); });
    case ParamKind::IntegerList:
      return v.is_array() && !v.empty() && std::all_of(v.begin(), v.end(), [](const json& e) { return is_integral(e); });
  }
  return false;
}

double number_field(const json& block, const std::string& key, const std::string& where, double fallback) {
  if (!block.contains(key)) return fallback;
  const json& v = block.at(key);
  if (!v.is_number()) throw SchemaError(where + "." + key, "expected a number");
  return v.get<double>();
}

// ---------------------------------------------------------------------------
// shared helpers for the harmonic ops

struct HarmonicEntry {
  HarmonicProblem problem;
  HarmonicSolution solution;
};

std::shared_ptr<HarmonicEntry> harmonic_for(TaskContext& ctx) {
  const ConductanceModel& m = ctx.model();
  const double radius = ctx.num("domain_radius");
  std::int64_t half = ctx.integer("half_width");
  if (half <= 0) half = required_half_width(m, radius);
  const BoundaryPreset preset = parse_boundary_preset(ctx.str("preset"));
  const std::int64_t position = ctx.integer("position");
  std::ostringstream key;
  key << "harmonic|" << m.id() << '|' << radius << '|' << half << '|' << to_string(preset) << '|' << position;
  auto& slot = ctx.cache().entries[key.str()];
  if (slot) return std::static_pointer_cast<HarmonicEntry>(slot);
  const LatticeWindow w = centered_window(m.dim(), half, m.scale());
  HarmonicProblem p = make_problem(m, w, SetDescriptor::ball(Point::origin(m.dim()), radius),
                                   boundary_preset(w, preset, position));
  HarmonicSolution s = solve_harmonic(p);
  auto entry = std::make_shared<HarmonicEntry>(HarmonicEntry{std::move(p), std::move(s)});
  slot = entry;
  return entry;
}

const std::vector<ParamSpec> kHarmonicParams = {
    {"domain_radius", ParamKind::Number, 100.0, "radius of the ball domain D around the origin"},
    {"preset", ParamKind::String, "half_space", "boundary data: half_space | far_site | linear_ramp"},
    {"position", ParamKind::Integer, 150, "half-space threshold or far-site coordinate"},
    {"half_width", ParamKind::Integer, 0, "window half-width; 0 picks the tail-threshold minimum"},
};

std::vector<ParamSpec> with_harmonic(std::vector<ParamSpec> extra) {
  std::vector<ParamSpec> all = kHarmonicParams;
  all.insert(all.end(), extra.begin(), extra.end());
  return all;
}

void fill_assumption(Row& row, const AssumptionReport& rep) {
  row.value = rep.constant;
  row.pass = rep.pass;
  row.tolerance = rep.bound;
  row.metrics["constant_aux"] = rep.constant_aux;
  row.metrics["spread"] = rep.spread;
  row.metrics["spread_aux"] = rep.spread_aux;
  row.metrics["growth"] = rep.growth;
  row.metrics["growth_aux"] = rep.growth_aux;
  row.metrics["ratios"] = rep.ratios;
  if (!rep.ratios_aux.empty()) row.metrics["ratios_aux"] = rep.ratios_aux;
  if (!rep.witness.empty()) row.note = rep.witness;
  if (!rep.note.empty()) row.note += (row.note.empty() ? "" : "; ") + rep.note;
}

void fill_check(Row& row, const CheckReport& rep) {
  row.value = rep.estimate;
  row.error = rep.error;
  row.tolerance = rep.bound;
  row.pass = rep.pass;
  row.inconclusive = rep.inconclusive;
  row.note = rep.note;
  row.metrics["values"] = rep.values;
  row.metrics["spread"] = rep.spread;
  for (const auto& [k, v] : rep.metrics) row.metrics[k] = v;
}

SimOptions sim_options(TaskContext& ctx) {
  SimOptions o;
  o.threads = ctx.threads();
  return o;
}

std::vector<OpSpec> build_registry() {
  std::vector<OpSpec> ops;

  // -- conductance ---------------------------------------------------------
  ops.push_back({"eval_conductance", "C(x,y) for the configured model",
                 {{"x", ParamKind::Point, nullptr, "first site"}, {"y", ParamKind::Point, nullptr, "second site"}},
                 false, [](TaskContext& ctx) {
                   Row r;
                   r.value = eval_conductance(ctx.model(), ctx.point("x"), ctx.point("y"));
                   ctx.emit(r);
                 }});
  ops.push_back({"vertex_rate", "sum of C(x,y) over |y-x| <= radius plus the envelope tail bound",
                 {{"x", ParamKind::Point, nullptr, "site"}, {"radius", ParamKind::Number, 64.0, "summation radius"}},
                 false, [](TaskContext& ctx) {
                   const VertexRate v = vertex_rate(ctx.model(), ctx.point("x"), ctx.num("radius"));
                   Row r;
                   r.value = v.value + v.tail_bound;
                   r.error = v.tail_bound;
                   r.metrics["value"] = v.value;
                   r.metrics["tail_bound"] = v.tail_bound;
                   r.metrics["total_rate"] = ctx.model().total_rate(ctx.point("x"));
                   ctx.emit(r);
                 }});
  ops.push_back({"check_A1", "symmetry and zero diagonal over random pairs",
                 {{"pairs", ParamKind::Integer, 10000, "number of random pairs"},
                  {"extent", ParamKind::Integer, 1000, "half-width of the sampling box"}},
                 false, [](TaskContext& ctx) {
                   const auto rep = check_A1(ctx.model(), static_cast<std::size_t>(ctx.integer("pairs")),
                                             ctx.integer("extent"), ctx.seed());
                   Row r;
                   fill_assumption(r, rep);
                   ctx.emit(r);
                 }});
  ops.push_back({"check_A2", "minimum total jump rate over sites",
                 {{"x", ParamKind::Point, nullptr, "site"}}, false, [](TaskContext& ctx) {
                   const auto rep = check_A2(ctx.model(), {ctx.point("x")});
                   Row r;
                   fill_assumption(r, rep);
                   ctx.emit(r);
                 }});
  ops.push_back({"check_A3", "tail-sum ratios S1(r) r^alpha and S2(r) r^(alpha-2)",
                 {{"radii", ParamKind::NumberList, json{2, 4, 8, 16}, "radii"},
                  {"growth_cap", ParamKind::Number, 4.0, "allowed growth of the ratios"}},
                 false, [](TaskContext& ctx) {
                   const auto rep = check_A3(ctx.model(), ctx.nums("radii"), ctx.num("growth_cap") * ctx.tol_scale());
                   Row r;
                   fill_assumption(r, rep);
                   r.csv = ctx.write_csv("", [&](std::ostream& os) {
                     os << "radius,s1_ratio,s2_ratio\n";
                     for (std::size_t i = 0; i < rep.parameters.size(); ++i)
                       os << json(rep.parameters[i]).dump() << ',' << json(rep.ratios[i]).dump() << ','
                          << json(rep.ratios_aux[i]).dump() << '\n';
                   });
                   ctx.emit(r);
                 }});
  ops.push_back({"rescale", "rho^(alpha-d) C(x,y) at labels x, y of the rescaled lattice",
                 {{"rho", ParamKind::Integer, 2, "scale"},
                  {"x", ParamKind::Point, nullptr, "first label"},
                  {"y", ParamKind::Point, nullptr, "second label"}},
                 false, [](TaskContext& ctx) {
                   const ConductanceModel s = rescale(ctx.model(), ctx.integer("rho"));
                   Row r;
                   r.value = s.rate(ctx.point("x"), ctx.point("y"));
                   r.metrics["base_rate"] = ctx.model().rate(ctx.point("x"), ctx.point("y"));
                   r.metrics["site_mass"] = s.site_mass();
                   ctx.emit(r);
                 }});

  // -- forms ---------------------------------------------------------------
  ops.push_back({"best_poincare_constant", "smallest kappa4 on the cube of the given side",
                 {{"center", ParamKind::Point, nullptr, "cube centre"},
                  {"side", ParamKind::Number, 8.0, "cube side 2r"},
                  {"kappa5", ParamKind::Number, 1.0, "enlargement factor of the energy cube"}},
                 false, [](TaskContext& ctx) {
                   const auto pr = best_poincare_constant(ctx.model(), ctx.point("center"), ctx.num("side") / 2.0,
                                                          ctx.num("kappa5"));
                   Row r;
                   r.value = pr.constant;
                   r.pass = pr.connected;
                   r.note = pr.witness;
                   r.metrics["ratio"] = pr.ratio;
                   r.metrics["sites"] = pr.sites.size();
                   r.metrics["method"] = pr.method;
                   if (!pr.extremal.empty())
                     r.csv = ctx.write_csv("", [&](std::ostream& os) {
                       const int d = ctx.model().dim();
                       for (int i = 0; i < d; ++i) os << 'x' << (i + 1) << ',';
                       os << "f\n";
                       for (std::size_t k = 0; k < pr.sites.size(); ++k) {
                         for (int i = 0; i < d; ++i) os << pr.sites[k][i] << ',';
                         os << json(pr.extremal[k]).dump() << '\n';
                       }
                     });
                   ctx.emit(r);
                 }});
  ops.push_back({"check_A4_scaling", "Poincare constants across cube sides",
                 {{"sides", ParamKind::NumberList, json{4, 8, 16}, "cube sides"},
                  {"kappa5", ParamKind::Number, 1.0, "enlargement factor"},
                  {"spread_cap", ParamKind::Number, 4.0, "allowed max/min"}},
                 false, [](TaskContext& ctx) {
                   const auto rep = check_A4_scaling(ctx.model(), ctx.nums("sides"), ctx.num("kappa5"),
                                                     ctx.num("spread_cap") * ctx.tol_scale());
                   Row r;
                   fill_assumption(r, rep);
                   ctx.emit(r);
                 }});
  ops.push_back({"nash_survey", "sup of the Nash ratio over a random ensemble and the s-grid chain",
                 {{"half_width", ParamKind::Integer, 16, "window [-h, h)^d"},
                  {"count", ParamKind::Integer, 100, "ensemble size"},
                  {"s_grid", ParamKind::NumberList, json{0.5, 1, 2, 4, 8, 16}, "values of s"}},
                 false, [](TaskContext& ctx) {
                   const int d = ctx.model().dim();
                   const std::int64_t h = ctx.integer("half_width");
                   Point lo(d), hi(d);
                   for (int i = 0; i < d; ++i) {
                     lo[i] = -h;
                     hi[i] = h;
                   }
                   const auto ns = nash_survey(ctx.model(), make_window(lo, hi, ctx.model().scale()),
                                               static_cast<std::size_t>(ctx.integer("count")), ctx.seed(),
                                               ctx.nums("s_grid"));
                   Row r;
                   r.value = ns.sup_ratio;
                   r.pass = ns.chain_holds;
                   r.tolerance = 1.0;
                   r.metrics["argmax"] = ns.argmax;
                   r.metrics["c4"] = ns.c4;
                   r.metrics["c5"] = ns.c5;
                   r.metrics["worst_chain_slack"] = ns.worst_chain_slack;
                   ctx.emit(r);
                 }});
  ops.push_back({"weight_phi", "cut paraboloid weight on B[x0, R] at scale rho",
                 {{"x0", ParamKind::Point, nullptr, "centre label"},
                  {"R", ParamKind::Number, 1.5, "radius"},
                  {"rho", ParamKind::Integer, 1, "scale"}},
                 false, [](TaskContext& ctx) {
                   const auto w = weight_phi(ctx.point("x0"), ctx.num("R"), ctx.integer("rho"));
                   double total = 0.0;
                   for (double v : w.values) total += v;
                   const double normalized = total * std::pow(static_cast<double>(w.scale), -w.center.dim);
                   Row r;
                   r.value = w.c1;
                   r.error = std::abs(normalized - 1.0);
                   r.tolerance = 1e-12;
                   r.pass = r.error <= r.tolerance;
                   r.metrics["sites"] = w.sites.size();
                   r.metrics["normalized_mass"] = normalized;
                   r.csv = ctx.write_csv("", [&](std::ostream& os) {
                     const int d = w.center.dim;
                     for (int i = 0; i < d; ++i) os << 'x' << (i + 1) << ',';
                     os << "phi\n";
                     for (std::size_t k = 0; k < w.sites.size(); ++k) {
                       for (int i = 0; i < d; ++i) os << w.sites[k][i] << ',';
                       os << json(w.values[k]).dump() << '\n';
                     }
                   });
                   ctx.emit(r);
                 }});
  ops.push_back({"weighted_poincare_constant", "weighted Poincare constant at several scales",
                 {{"x0", ParamKind::Point, nullptr, "centre label"},
                  {"R", ParamKind::Number, 3.0, "radius"},
                  {"rhos", ParamKind::IntegerList, json{1, 2, 4}, "scales"},
                  {"spread_cap", ParamKind::Number, 4.0, "allowed max/min across scales"}},
                 false, [](TaskContext& ctx) {
                   std::vector<double> consts;
                   bool grid = true, connected = true;
                   for (std::int64_t rho : ctx.ints("rhos")) {
                     const auto pr = weighted_poincare_constant(ctx.model(), ctx.point("x0"), ctx.num("R"), rho);
                     consts.push_back(pr.constant);
                     grid = grid && pr.on_grid;
                     connected = connected && pr.connected;
                   }
                   Row r;
                   r.value = *std::max_element(consts.begin(), consts.end());
                   r.tolerance = ctx.num("spread_cap") * ctx.tol_scale();
                   r.metrics["constants"] = consts;
                   r.metrics["spread"] = spread_of(consts);
                   r.metrics["on_grid"] = grid;
                   r.pass = connected && spread_of(consts) <= r.tolerance;
                   if (!grid) r.note = "R outside the admissible grid for some rho";
                   ctx.emit(r);
                 }});

  // -- heat kernel ---------------------------------------------------------
  ops.push_back({"build_generator", "generator statistics on the config window",
                 {{"lambda", ParamKind::Number, nullptr, "jump truncation (null: none)"}}, true,
                 [](TaskContext& ctx) {
                   GeneratorOptions opt;
                   if (!std::isnan(ctx.num("lambda"))) opt.lambda_cut = ctx.num("lambda");
                   const auto g = build_generator(ctx.model(), ctx.window(), opt);
                   Row r;
                   r.value = g.uniformization;
                   r.metrics["sites"] = g.size();
                   r.metrics["nonzeros"] = g.jumps.nonzeros();
                   r.metrics["max_exit_rate"] = *std::max_element(g.exit_rate.begin(), g.exit_rate.end());
                   r.metrics["max_routed"] = *std::max_element(g.routed.begin(), g.routed.end());
                   const double asym = g.jumps.asymmetry();
                   r.metrics["asymmetry"] = asym;
                   r.pass = asym <= 1e-12 * g.uniformization;
                   ctx.emit(r);
                 }});
  ops.push_back({"transition_density", "p(t, x, .) on the config window by uniformization",
                 {{"t", ParamKind::Number, 1.0, "time"},
                  {"x", ParamKind::Point, nullptr, "source"},
                  {"tol", ParamKind::Number, 1e-10, "Poisson truncation tolerance"},
                  {"lambda", ParamKind::Number, nullptr, "jump truncation (null: none)"}},
                 true, [](TaskContext& ctx) {
                   GeneratorOptions opt;
                   if (!std::isnan(ctx.num("lambda"))) opt.lambda_cut = ctx.num("lambda");
                   const auto g = build_generator(ctx.model(), ctx.window(), opt);
                   const auto s = transition_density(g, ctx.num("t"), ctx.point("x"), ctx.num("tol"));
                   Row r;
                   r.value = s.at(ctx.point("x"));
                   r.error = s.poisson_truncation_error;
                   r.metrics["lost_mass"] = s.lost_mass();
                   r.metrics["variant"] = std::string(to_string(s.variant));
                   r.csv = ctx.write_csv("", [&](std::ostream& os) { write_slice_csv(s, os); });
                   ctx.emit(r);
                 }});
  ops.push_back({"killed_density", "density killed on leaving the open cube B[0, R] at scale rho",
                 {{"R", ParamKind::Number, 2.0, "cube half-side"},
                  {"rho", ParamKind::Integer, 1, "scale"},
                  {"t", ParamKind::Number, 1.0, "time"},
                  {"x", ParamKind::Point, nullptr, "source label"},
                  {"tol", ParamKind::Number, 1e-10, "Poisson truncation tolerance"}},
                 false, [](TaskContext& ctx) {
                   const auto s = killed_density(ctx.model(), SetDescriptor::cube(Point::origin(ctx.model().dim()), ctx.num("R")),
                                                 ctx.integer("rho"), ctx.num("t"), ctx.point("x"), ctx.num("tol"));
                   Row r;
                   r.value = s.at(ctx.point("x"));
                   r.error = s.poisson_truncation_error;
                   r.metrics["lost_mass"] = s.lost_mass();
                   r.csv = ctx.write_csv("", [&](std::ostream& os) { write_slice_csv(s, os); });
                   ctx.emit(r);
                 }});
  ops.push_back({"spectral_check", "uniformization against the eigen-expansion on a killed cube",
                 {{"R", ParamKind::Number, 4.0, "cube half-side"},
                  {"rho", ParamKind::Integer, 1, "scale"},
                  {"times", ParamKind::NumberList, json{0.5, 1, 2}, "times"},
                  {"tol", ParamKind::Number, 1e-12, "Poisson truncation tolerance"},
                  {"bound", ParamKind::Number, 1e-8, "allowed max deviation"}},
                 false, [](TaskContext& ctx) {
                   const std::int64_t rho = ctx.integer("rho");
                   const auto cube = SetDescriptor::cube(Point::origin(ctx.model().dim()), ctx.num("R"));
                   const LatticeWindow w = bounding_window(ctx.model().dim(), rho, cube);
                   GeneratorOptions opt;
                   opt.mode = BoundaryMode::KillInside;
                   opt.domain = make_set(w, cube);
                   const auto g = build_generator(ctx.model().rescaled(rho), w, opt);
                   const auto oracle = spectral_oracle(g);
                   double worst = 0.0;
                   for (double t : ctx.nums("times")) {
                     for (std::size_t i : oracle.sites) {
                       const Point x = w.point(i);
                       const auto s = transition_density(g, t, x, ctx.num("tol"));
                       const auto row = oracle.density_row(t, x);
                       for (std::size_t j = 0; j < row.size(); ++j) worst = std::max(worst, std::abs(row[j] - s.density[j]));
                     }
                   }
                   Row r;
                   r.value = worst;
                   r.tolerance = ctx.num("bound") * ctx.tol_scale();
                   r.pass = worst <= r.tolerance;
                   r.metrics["sites"] = oracle.sites.size();
                   ctx.emit(r);
                 }});
  ops.push_back({"kernel_consistency", "symmetry and Chapman-Kolmogorov defects on the config window",
                 {{"times", ParamKind::NumberList, json{0.5, 1, 2}, "times"},
                  {"tol", ParamKind::Number, 1e-10, "Poisson truncation tolerance"},
                  {"symmetry_bound", ParamKind::Number, 2e-10, "allowed symmetry defect"},
                  {"ck_bound", ParamKind::Number, 5e-10, "allowed Chapman-Kolmogorov defect"}},
                 true, [](TaskContext& ctx) {
                   const auto g = build_generator(ctx.model(), ctx.window());
                   const LatticeWindow& w = ctx.window();
                   std::vector<Point> sources;
                   for (std::size_t k = 0; k < 5; ++k) sources.push_back(w.point((w.size() - 1) * (2 * k + 1) / 10));
                   const auto times = ctx.nums("times");
                   double sym = 0.0, ck = 0.0;
                   for (double t : times) {
                     sym = std::max(sym, symmetry_defect(g, t, sources, ctx.num("tol")));
                     for (double s : times) ck = std::max(ck, chapman_kolmogorov_defect(g, s, t, w.center(), ctx.num("tol")));
                   }
                   Row r;
                   r.value = std::max(sym, ck);
                   r.metrics["symmetry_defect"] = sym;
                   r.metrics["ck_defect"] = ck;
                   r.tolerance = ctx.num("ck_bound") * ctx.tol_scale();
                   r.pass = sym <= ctx.num("symmetry_bound") * ctx.tol_scale() && ck <= r.tolerance;
                   ctx.emit(r);
                 }});
  ops.push_back({"near_diagonal_lower_check", "min of p(t,0,y) t^(d/alpha) over |y| <= 2 t^(1/alpha)",
                 {{"times", ParamKind::NumberList, json{1, 2, 4, 8}, "times"},
                  {"half_width", ParamKind::Integer, 512, "window [-h, h]^d"},
                  {"spread_cap", ParamKind::Number, 3.0, "allowed max/min across times"},
                  {"min_epsilon", ParamKind::Number, 0.0, "required lower bound on epsilon"}},
                 false, [](TaskContext& ctx) {
                   const auto rep = near_diagonal_lower_check(ctx.model(), ctx.nums("times"), ctx.integer("half_width"),
                                                              ctx.num("spread_cap") * ctx.tol_scale());
                   Row r;
                   fill_check(r, rep);
                   r.pass = rep.pass && rep.estimate >= ctx.num("min_epsilon");
                   ctx.emit(r);
                 }});
  ops.push_back({"killed_lower_check", "min of p^rho_B(t,.,.) over B(0, 3R/4)^2 per scale",
                 {{"rhos", ParamKind::IntegerList, json{1, 2}, "scales"},
                  {"R", ParamKind::Number, 2.0, "cube half-side"},
                  {"t", ParamKind::Number, 1.0, "time"},
                  {"spread_cap", ParamKind::Number, 3.0, "allowed max/min across scales"}},
                 false, [](TaskContext& ctx) {
                   const auto rep = killed_lower_check(ctx.model(), ctx.ints("rhos"), ctx.num("R"), ctx.num("t"),
                                                       ctx.num("spread_cap") * ctx.tol_scale());
                   Row r;
                   fill_check(r, rep);
                   ctx.emit(r);
                 }});
  ops.push_back({"upper_bound_check", "max of p(t,0,y) (t^(d/alpha) v 1) across times",
                 {{"times", ParamKind::NumberList, json{1, 2, 4, 8, 16}, "times"},
                  {"half_width", ParamKind::Integer, 512, "window [-h, h]^d"},
                  {"spread_cap", ParamKind::Number, 3.0, "allowed max/min across times"}},
                 false, [](TaskContext& ctx) {
                   const auto rep = upper_bound_check(ctx.model(), ctx.nums("times"), ctx.integer("half_width"),
                                                      ctx.num("spread_cap") * ctx.tol_scale());
                   Row r;
                   fill_check(r, rep);
                   ctx.emit(r);
                 }});
  ops.push_back({"truncated_decay_check", "off-diagonal slope of the jump-truncated kernel",
                 {{"rho", ParamKind::Integer, 1, "scale"},
                  {"lambda", ParamKind::Number, 4.0, "truncation length"},
                  {"t", ParamKind::Number, 1.0, "time"},
                  {"half_width", ParamKind::Integer, 256, "window [-h, h]^d in labels"},
                  {"slope_cap", ParamKind::Number, -0.75, "required upper bound on the slope"}},
                 false, [](TaskContext& ctx) {
                   const auto rep = truncated_decay_check(ctx.model(), ctx.integer("rho"), ctx.num("lambda"), ctx.num("t"),
                                                          ctx.integer("half_width"), ctx.num("slope_cap"));
                   Row r;
                   fill_check(r, rep);
                   ctx.emit(r);
                 }});
  ops.push_back({"scaling_identity_check", "rescaled kernel against rho^d p(rho^alpha t, rho x, rho y)",
                 {{"rho", ParamKind::Integer, 2, "scale"},
                  {"t", ParamKind::Number, 1.0, "time"},
                  {"x", ParamKind::Point, nullptr, "first point"},
                  {"y", ParamKind::Point, nullptr, "second point"},
                  {"half_width", ParamKind::Integer, 256, "label window [-h, h]^d"}},
                 false, [](TaskContext& ctx) {
                   const auto rep = scaling_identity_check(ctx.model(), ctx.integer("rho"), ctx.num("t"), ctx.point("x"),
                                                           ctx.point("y"), ctx.integer("half_width"));
                   Row r;
                   fill_check(r, rep);
                   r.tolerance = rep.bound * ctx.tol_scale();
                   r.pass = rep.estimate <= r.tolerance;
                   ctx.emit(r);
                 }});

  // -- paths ---------------------------------------------------------------
  ops.push_back({"sample_path", "one trajectory on the config window",
                 {{"x0", ParamKind::Point, nullptr, "start"}, {"horizon", ParamKind::Number, 10.0, "time horizon"}},
                 true, [](TaskContext& ctx) {
                   const auto p = sample_path(ctx.model(), ctx.point("x0"), ctx.num("horizon"), ctx.window(), ctx.seed());
                   Row r;
                   r.value = static_cast<double>(p.states.size() - 1);
                   r.metrics["end_time"] = p.end_time;
                   r.metrics["censored"] = p.censored;
                   r.metrics["reason"] = std::string(to_string(p.reason));
                   r.csv = ctx.write_csv("", [&](std::ostream& os) { write_path_csv(p, os); });
                   ctx.emit(r);
                 }});
  ops.push_back({"estimate_exit_prob", "P^x(exit B(x, aR) before gamma R^alpha) across R",
                 {{"x", ParamKind::Point, nullptr, "start"},
                  {"a", ParamKind::Number, 1.0, "ball factor"},
                  {"R_values", ParamKind::NumberList, json{8, 16, 32}, "radii R"},
                  {"gamma", ParamKind::Number, 0.1, "time factor"},
                  {"n", ParamKind::Integer, 100000, "paths per radius"},
                  {"spread_cap", ParamKind::Number, 2.0, "allowed max/min across R"}},
                 false, [](TaskContext& ctx) {
                   std::vector<double> est, se;
                   bool inconclusive = false;
                   std::size_t k = 0;
                   for (double R : ctx.nums("R_values")) {
                     const auto e = estimate_exit_prob(ctx.model(), ctx.point("x"), ctx.num("a"), R, ctx.num("gamma"),
                                                       static_cast<std::size_t>(ctx.integer("n")), ctx.seed() + k++,
                                                       sim_options(ctx));
                     est.push_back(e.value);
                     se.push_back(e.std_error);
                     inconclusive = inconclusive || e.inconclusive;
                   }
                   Row r;
                   r.value = *std::max_element(est.begin(), est.end());
                   r.error = *std::max_element(se.begin(), se.end());
                   r.tolerance = ctx.num("spread_cap") * ctx.tol_scale();
                   r.metrics["estimates"] = est;
                   r.metrics["std_errors"] = se;
                   const double spread = spread_of(est);
                   r.metrics["spread"] = spread;
                   r.inconclusive = inconclusive;
                   r.pass = r.value < 1.0 && spread <= r.tolerance;
                   ctx.emit(r);
                 }});
  ops.push_back({"estimate_hitting_prob", "P^x(hit A before leaving B(x,r)) with A the positive half of B(x, eta r)",
                 {{"x", ParamKind::Point, nullptr, "start"},
                  {"radii", ParamKind::NumberList, json{16, 32}, "radii r"},
                  {"eta", ParamKind::Number, 0.25, "target ball factor"},
                  {"n", ParamKind::Integer, 100000, "paths per radius"},
                  {"min_prob", ParamKind::Number, 0.05, "required lower bound"},
                  {"ratio_cap", ParamKind::Number, 2.0, "allowed max/min across radii"}},
                 false, [](TaskContext& ctx) {
                   std::vector<double> est, se;
                   bool inconclusive = false;
                   std::size_t k = 0;
                   const Point x = ctx.point("x");
                   for (double rr : ctx.nums("radii")) {
                     const auto A = half_ball(x, ctx.num("eta") * rr);
                     const auto e = estimate_hitting_prob(ctx.model(), x, A, rr, static_cast<std::size_t>(ctx.integer("n")),
                                                          ctx.seed() + k++, ctx.num("eta"), sim_options(ctx));
                     est.push_back(e.value);
                     se.push_back(e.std_error);
                     inconclusive = inconclusive || e.inconclusive;
                   }
                   Row r;
                   r.value = *std::min_element(est.begin(), est.end());
                   r.error = *std::max_element(se.begin(), se.end());
                   r.tolerance = ctx.num("ratio_cap") * ctx.tol_scale();
                   r.metrics["estimates"] = est;
                   r.metrics["std_errors"] = se;
                   r.metrics["spread"] = spread_of(est);
                   r.inconclusive = inconclusive;
                   r.pass = r.value >= ctx.num("min_prob") && spread_of(est) <= r.tolerance;
                   ctx.emit(r);
                 }});
  ops.push_back({"expected_exit_time", "E^x tau_B(x,r) per radius and the log-log slope",
                 {{"x", ParamKind::Point, nullptr, "start"},
                  {"radii", ParamKind::NumberList, json{4, 8, 16}, "radii"},
                  {"n", ParamKind::Integer, 100000, "paths per radius"},
                  {"target_slope", ParamKind::Number, nullptr, "expected slope (null: alpha)"},
                  {"slope_tol", ParamKind::Number, 0.3, "allowed deviation of the slope"}},
                 false, [](TaskContext& ctx) {
                   const Point x = ctx.point("x");
                   const auto radii = ctx.nums("radii");
                   const auto st = expected_exit_time(ctx.model(), x, radii, static_cast<std::size_t>(ctx.integer("n")),
                                                      ctx.seed(), sim_options(ctx));
                   const double target = std::isnan(ctx.num("target_slope")) ? ctx.model().alpha() : ctx.num("target_slope");
                   const double exact = green_potential(ctx.model(), x, radii.front(), [](const Point&) { return 1.0; });
                   const auto& first = st.per_radius.front();
                   Row r;
                   r.value = st.slope;
                   r.tolerance = ctx.num("slope_tol") * ctx.tol_scale();
                   r.inconclusive = st.inconclusive;
                   std::vector<double> means, ses, cens;
                   for (const auto& e : st.per_radius) {
                     means.push_back(e.value);
                     ses.push_back(e.std_error);
                     cens.push_back(e.censored_fraction());
                   }
                   r.metrics["means"] = means;
                   r.metrics["std_errors"] = ses;
                   r.metrics["censored_fractions"] = cens;
                   r.metrics["target_slope"] = target;
                   r.metrics["exact_mean_smallest"] = exact;
                   const bool cross = std::abs(first.value - exact) <= 3.0 * first.std_error * ctx.tol_scale();
                   r.metrics["cross_check"] = cross;
                   r.pass = std::abs(st.slope - target) <= r.tolerance && cross;
                   r.csv = ctx.write_csv("", [&](std::ostream& os) {
                     os << "radius,mean,std_error,censored_fraction\n";
                     for (std::size_t k = 0; k < radii.size(); ++k)
                       os << json(radii[k]).dump() << ',' << json(means[k]).dump() << ',' << json(ses[k]).dump() << ','
                          << json(cens[k]).dump() << '\n';
                   });
                   ctx.emit(r);
                 }});
  ops.push_back({"levy_system_check", "both sides of the Levy system identity for f = 1{|y-x| >= jump_min}",
                 {{"x", ParamKind::Point, nullptr, "start"},
                  {"r", ParamKind::Number, 8.0, "stopping ball radius"},
                  {"n", ParamKind::Integer, 100000, "paths"},
                  {"jump_min", ParamKind::Number, 2.0, "f(u,v) = 1{|v-u| >= jump_min}; 0 or less gives f = 0"}},
                 false, [](TaskContext& ctx) {
                   const double jm = ctx.num("jump_min");
                   const PairFunction f = [jm](const Point& u, const Point& v) {
                     return jm > 0.0 && (v - u).norm() >= jm ? 1.0 : 0.0;
                   };
                   const auto rep = levy_system_check(ctx.model(), ctx.point("x"), f, ctx.num("r"),
                                                      static_cast<std::size_t>(ctx.integer("n")), ctx.seed(), sim_options(ctx));
                   Row r;
                   fill_check(r, rep);
                   r.tolerance = rep.bound * ctx.tol_scale();
                   r.pass = std::abs(rep.estimate) <= r.tolerance;
                   ctx.emit(r);
                 }});

  // -- harmonic ------------------------------------------------------------
  ops.push_back({"solve_harmonic", "harmonic function on a ball domain with preset boundary data",
                 kHarmonicParams, false, [](TaskContext& ctx) {
                   const auto e = harmonic_for(ctx);
                   const auto& p = e->problem;
                   const auto& s = e->solution;
                   double gmin = 0.0, gmax = 0.0, hmin = std::numeric_limits<double>::infinity(), hmax = -hmin;
                   bool first = true;
                   for (std::size_t i = 0; i < p.window.size(); ++i) {
                     if (p.domain.contains_index(i)) {
                       hmin = std::min(hmin, s.h[i]);
                       hmax = std::max(hmax, s.h[i]);
                     } else if (first) {
                       gmin = gmax = p.boundary[i];
                       first = false;
                     } else {
                       gmin = std::min(gmin, p.boundary[i]);
                       gmax = std::max(gmax, p.boundary[i]);
                     }
                   }
                   gmin = std::min(gmin, p.outside_value);
                   gmax = std::max(gmax, p.outside_value);
                   const double scale = std::max(std::abs(gmin), std::abs(gmax));
                   Row r;
                   r.value = s.h[p.window.index(Point::origin(p.window.dim()))];
                   r.error = s.residual;
                   r.tolerance = 1e-10 * scale * ctx.tol_scale();
                   r.metrics["bias_bound"] = s.bias_bound;
                   r.metrics["h_min"] = hmin;
                   r.metrics["h_max"] = hmax;
                   r.metrics["iterations"] = s.iterations;
                   r.metrics["method"] = s.method;
                   r.metrics["window_sites"] = p.window.size();
                   r.pass = s.residual <= r.tolerance && hmin >= gmin - r.tolerance && hmax <= gmax + r.tolerance;
                   r.csv = ctx.write_csv("", [&](std::ostream& os) { write_harmonic_csv(p, s.h, os); });
                   ctx.emit(r);
                 }});
  ops.push_back({"oscillation_profile", "oscillation of h over nested balls and the fitted exponent",
                 with_harmonic({{"radius", ParamKind::Number, 64.0, "outer ball radius"},
                                {"contraction", ParamKind::Number, 0.5, "ratio between nested radii"},
                                {"levels", ParamKind::Integer, 6, "number of balls"},
                                {"beta_slack", ParamKind::Number, 0.2, "accept beta in (0, alpha + slack)"}}),
                 false, [](TaskContext& ctx) {
                   const auto e = harmonic_for(ctx);
                   const auto prof = oscillation_profile(e->problem, e->solution.h, Point::origin(ctx.model().dim()),
                                                         ctx.num("radius"), ctx.num("contraction"),
                                                         static_cast<int>(ctx.integer("levels")));
                   Row r;
                   r.value = prof.beta;
                   r.tolerance = ctx.model().alpha() + ctx.num("beta_slack");
                   r.inconclusive = prof.inconclusive;
                   r.note = prof.note;
                   r.pass = !prof.inconclusive && prof.beta > 0.0 && prof.beta < r.tolerance;
                   std::vector<double> osc;
                   for (const auto& l : prof.levels) osc.push_back(l.osc);
                   r.metrics["osc"] = osc;
                   r.csv = ctx.write_csv("", [&](std::ostream& os) {
                     os << "radius,sites,sup,inf,osc,used\n";
                     for (const auto& l : prof.levels)
                       os << json(l.radius).dump() << ',' << l.sites << ',' << json(l.sup).dump() << ','
                          << json(l.inf).dump() << ',' << json(l.osc).dump() << ',' << (l.used ? 1 : 0) << '\n';
                   });
                   ctx.emit(r);
                 }});
  ops.push_back({"martingale_check", "E^x h(X_{t ^ tau_D}) against h(x)",
                 with_harmonic({{"x", ParamKind::Point, nullptr, "start"},
                                {"t", ParamKind::Number, 4.0, "time"},
                                {"n", ParamKind::Integer, 100000, "paths"}}),
                 false, [](TaskContext& ctx) {
                   const auto e = harmonic_for(ctx);
                   const auto rep = martingale_check(e->problem, e->solution, ctx.point("x"), ctx.num("t"),
                                                     static_cast<std::size_t>(ctx.integer("n")), ctx.seed(), sim_options(ctx));
                   Row r;
                   fill_check(r, rep);
                   r.tolerance = 3.0 * rep.error * ctx.tol_scale() + rep.metric("bias_bound");
                   r.pass = std::abs(rep.estimate) <= r.tolerance;
                   ctx.emit(r);
                 }});
  ops.push_back({"theoretical_exponent", "gamma, rho and beta from the oscillation recursion",
                 {{"c1", ParamKind::Number, 0.5, "support constant in (0,1)"},
                  {"c2", ParamKind::Number, 1.0, "exit constant > 0"},
                  {"eta", ParamKind::Number, 0.25, "ball factor in (0,1)"},
                  {"alpha", ParamKind::Number, nullptr, "alpha (null: model alpha)"}},
                 false, [](TaskContext& ctx) {
                   const double a = std::isnan(ctx.num("alpha")) ? ctx.model().alpha() : ctx.num("alpha");
                   const auto e = theoretical_exponent(ctx.num("c1"), ctx.num("c2"), ctx.num("eta"), a);
                   Row r;
                   r.value = e.beta;
                   r.tolerance = a;
                   r.pass = e.in_range;
                   r.metrics["gamma"] = e.gamma;
                   r.metrics["rho"] = e.rho;
                   ctx.emit(r);
                 }});
  return ops;
}

}  // namespace

json point_json(const Point& p) {
  json a = json::array();
  for (int i = 0; i < p.dim; ++i) a.push_back(p[i]);
  return a;
}

const std::vector<OpSpec>& op_registry() {
  static const std::vector<OpSpec> ops = build_registry();
  return ops;
}

const OpSpec* find_op(const std::string& name) {
  for (const auto& op : op_registry())
    if (op.name == name) return &op;
  return nullptr;
}

ConductanceModel model_from_config(const json& block, const std::filesystem::path& base_dir) {
  const std::string where = "model";
  if (!block.is_object()) throw SchemaError(where, "expected an object");
  static const std::vector<std::string> known = {"kind", "alpha", "dim", "c_lo", "c_hi", "weight",
                                                 "table", "table_csv", "a_seq", "b_seq"};
  for (const auto& [k, v] : block.items())
    if (std::find(known.begin(), known.end(), k) == known.end()) throw SchemaError(where + "." + k, "unknown field");
  if (!block.contains("kind") || !block["kind"].is_string()) throw SchemaError(where + ".kind", "expected a string");
  ModelKind kind;
  try {
    kind = parse_model_kind(block["kind"].get<std::string>());
  } catch (const ConfigError& e) {
    throw SchemaError(where + ".kind", e.what());
  }
  if (!block.contains("dim") || !is_integral(block["dim"])) throw SchemaError(where + ".dim", "expected an integer");
  const int dim = block["dim"].get<int>();
  try {
    switch (kind) {
      case ModelKind::StableLike:
      case ModelKind::AxisStableLike: {
        if (!block.contains("alpha")) throw SchemaError(where + ".alpha", "required for " + block["kind"].get<std::string>());
        const double alpha = number_field(block, "alpha", where, 1.0);
        const double lo = number_field(block, "c_lo", where, 1.0);
        const double hi = number_field(block, "c_hi", where, lo);
        if (!(lo > 0.0 && lo <= hi && std::isfinite(hi))) throw SchemaError(where + ".c_lo", "need 0 < c_lo <= c_hi < inf");
        std::string shape = lo == hi ? "constant" : "oscillating";
        if (block.contains("weight")) {
          if (!block["weight"].is_string()) throw SchemaError(where + ".weight", "expected a string");
          shape = block["weight"].get<std::string>();
        }
        WeightFunction w;
        if (shape == "constant") {
          if (lo != hi) throw SchemaError(where + ".weight", "constant weight needs c_lo == c_hi");
          w = WeightFunction::constant(lo);
        } else if (shape == "oscillating") {
          w = WeightFunction::oscillating(lo, hi);
        } else {
          throw SchemaError(where + ".weight", "expected 'constant' or 'oscillating'");
        }
        return kind == ModelKind::StableLike ? ConductanceModel::stable_like(dim, alpha, w)
                                             : ConductanceModel::axis_stable_like(dim, alpha, w);
      }
      case ModelKind::SparseLongRange: {
        if (block.contains("a_seq") != block.contains("b_seq")) throw SchemaError(where + ".a_seq", "a_seq and b_seq go together");
        if (!block.contains("a_seq")) return ConductanceModel::sparse_long_range(dim);
        const json& a = block["a_seq"];
        const json& b = block["b_seq"];
        if (!a.is_array() || !std::all_of(a.begin(), a.end(), [](const json& e) { return e.is_number(); }))
          throw SchemaError(where + ".a_seq", "expected a number list");
        if (!b.is_array() || !std::all_of(b.begin(), b.end(), [](const json& e) { return is_integral(e); }))
          throw SchemaError(where + ".b_seq", "expected an integer list");
        return ConductanceModel::sparse_long_range(dim, a.get<std::vector<double>>(), b.get<std::vector<std::int64_t>>());
      }
      case ModelKind::Table: {
        if (!block.contains("alpha")) throw SchemaError(where + ".alpha", "required for Table");
        const double alpha = number_field(block, "alpha", where, 2.0);
        std::vector<TableEntry> entries;
        if (block.contains("table")) {
          const json& t = block["table"];
          if (!t.is_array()) throw SchemaError(where + ".table", "expected a list of rows");
          for (std::size_t i = 0; i < t.size(); ++i) {
            const json& row = t[i];
            const std::string rw = where + ".table[" + std::to_string(i) + "]";
            if (!row.is_array() || row.size() != static_cast<std::size_t>(dim) + 1)
              throw SchemaError(rw, "expected " + std::to_string(dim + 1) + " numbers");
            TableEntry e{Point(dim), 0.0};
            for (int k = 0; k < dim; ++k) {
              if (!is_integral(row[static_cast<std::size_t>(k)])) throw SchemaError(rw, "offsets must be integers");
              e.offset[k] = row[static_cast<std::size_t>(k)].get<std::int64_t>();
            }
            if (!row[static_cast<std::size_t>(dim)].is_number()) throw SchemaError(rw, "rate must be a number");
            e.rate = row[static_cast<std::size_t>(dim)].get<double>();
            entries.push_back(e);
          }
        } else if (block.contains("table_csv")) {
          if (!block["table_csv"].is_string()) throw SchemaError(where + ".table_csv", "expected a path");
          std::filesystem::path p = block["table_csv"].get<std::string>();
          if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
          std::ifstream in(p);
          if (!in) throw SchemaError(where + ".table_csv", "cannot read " + p.string());
          std::stringstream ss;
          ss << in.rdbuf();
          entries = parse_table_csv(ss.str(), dim);
        } else {
          throw SchemaError(where + ".table", "Table models need table or table_csv");
        }
        return ConductanceModel::table(dim, alpha, std::move(entries));
      }
    }
  } catch (const ConfigError& e) {
    throw SchemaError(where, e.what());
  }
  throw SchemaError(where, "unsupported model");
}

std::optional<LatticeWindow> window_from_config(const json& config, int dim) {
  if (!config.contains("window")) return std::nullopt;
  const json& w = config["window"];
  if (!w.is_object()) throw SchemaError("window", "expected an object");
  for (const auto& [k, v] : w.items())
    if (k != "lower" && k != "upper" && k != "scale") throw SchemaError("window." + k, "unknown field");
  auto corner = [&](const char* key) {
    if (!w.contains(key) || !matches(ParamKind::Point, w[key], dim))
      throw SchemaError(std::string("window.") + key, "expected " + std::to_string(dim) + " integers");
    Point p(dim);
    for (int i = 0; i < dim; ++i) p[i] = w[key][static_cast<std::size_t>(i)].get<std::int64_t>();
    return p;
  };
  const Point lo = corner("lower"), hi = corner("upper");
  std::int64_t scale = 1;
  if (w.contains("scale")) {
    if (!is_integral(w["scale"]) || w["scale"].get<std::int64_t>() < 1) throw SchemaError("window.scale", "expected a positive integer");
    scale = w["scale"].get<std::int64_t>();
  }
  try {
    return make_window(lo, hi, scale);
  } catch (const std::exception& e) {
    throw SchemaError("window", e.what());
  }
}

void validate_params(const OpSpec& op, const json& params, int dim, const std::string& where) {
  if (!params.is_object()) throw SchemaError(where, "expected an object");
  for (const auto& [k, v] : params.items()) {
    const auto it = std::find_if(op.params.begin(), op.params.end(), [&](const ParamSpec& s) { return s.name == k; });
    if (it == op.params.end()) throw SchemaError(where + "." + k, "unknown parameter for " + op.name);
    if (!matches(it->kind, v, dim)) throw SchemaError(where + "." + k, "expected " + kind_name(it->kind));
  }
}

TaskContext::TaskContext(const OpSpec& op, const json& params, const ConductanceModel& model,
                         std::optional<LatticeWindow> window, std::uint64_t seed, std::size_t index, std::string config_hash,
                         const RunOptions& options, RunCache& cache)
    : op_(op), resolved_(json::object()), model_(model), window_(std::move(window)), seed_(seed), index_(index),
      hash_(std::move(config_hash)), options_(options), cache_(cache) {
  for (const auto& spec : op.params) {
    json v = params.contains(spec.name) ? params[spec.name] : spec.fallback;
    if (spec.kind == ParamKind::Point && v.is_null()) v = point_json(Point::origin(model.dim()));
    resolved_[spec.name] = v;
  }
}

const LatticeWindow& TaskContext::window() const {
  if (!window_) throw SchemaError("window", op_.name + " needs a window block");
  return *window_;
}

double TaskContext::num(const std::string& name) const {
  const json& v = resolved_.at(name);
  return v.is_null() ? kNaN : v.get<double>();
}
std::int64_t TaskContext::integer(const std::string& name) const {
  const json& v = resolved_.at(name);
  return v.is_number_integer() ? v.get<std::int64_t>() : static_cast<std::int64_t>(v.get<double>());
}
bool TaskContext::flag(const std::string& name) const { return resolved_.at(name).get<bool>(); }
std::string TaskContext::str(const std::string& name) const { return resolved_.at(name).get<std::string>(); }
Point TaskContext::point(const std::string& name) const {
  const json& v = resolved_.at(name);
  Point p(model_.dim());
  for (int i = 0; i < model_.dim(); ++i) p[i] = v[static_cast<std::size_t>(i)].get<std::int64_t>();
  return p;
}
std::vector<double> TaskContext::nums(const std::string& name) const { return resolved_.at(name).get<std::vector<double>>(); }
std::vector<std::int64_t> TaskContext::ints(const std::string& name) const {
  std::vector<std::int64_t> out;
  for (const auto& e : resolved_.at(name))
    out.push_back(e.is_number_integer() ? e.get<std::int64_t>() : static_cast<std::int64_t>(e.get<double>()));
  return out;
}

std::string TaskContext::write_csv(const std::string& suffix, const std::function<void(std::ostream&)>& body) {
  const std::string name = "task" + std::to_string(index_) + "_" + op_.name + suffix + ".csv";
  if (options_.write_files) {
    const std::filesystem::path dir = options_.out_dir.value_or("out");
    std::filesystem::create_directories(dir);
    std::ofstream os(dir / name, std::ios::binary);
    body(os);
  }
  return name;
}

void TaskContext::emit(Row row) {
  json params = resolved_;
  for (const auto& [k, v] : row.extra_params.items()) params[k] = v;
  json j = {{"task", index_},
            {"label", label_},
            {"op", op_.name},
            {"model", model_.id()},
            {"params", params},
            {"value", row.value},
            {"error", row.error},
            {"tolerance", row.tolerance},
            {"seed", seed_},
            {"config_hash", hash_},
            {"pass", row.pass},
            {"inconclusive", row.inconclusive},
            {"metrics", row.metrics}};
  if (!row.note.empty()) j["note"] = row.note;
  if (!row.csv.empty()) j["csv"] = row.csv;
  rows_.push_back(std::move(j));
}

}  // namespace hklab::cli
