#include "hklab/conductance.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <sstream>
#include <unordered_map>

#include "hklab/special.hpp"

namespace hklab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Visits every z in Z^d with 0 < |z| <= r.
void for_each_lattice_point(int dim, double r, const std::function<void(const Point&)>& fn) {
  const auto reach = static_cast<std::int64_t>(std::floor(r));
  const double r2 = r * r;
  Point z(dim);
  // Odometer over the box [-reach, reach]^d with early pruning on the partial norm.
  std::function<void(int, double)> rec = [&](int axis, double partial) {
    if (axis == dim) {
      if (partial > 0.0) fn(z);
      return;
    }
    for (std::int64_t k = -reach; k <= reach; ++k) {
      const double next = partial + static_cast<double>(k) * static_cast<double>(k);
      if (next > r2) continue;
      z[axis] = k;
      rec(axis + 1, next);
    }
    z[axis] = 0;
  };
  rec(0, 0.0);
}

// Index of the unique nonzero coordinate, or -1.
int single_axis(const Point& z) {
  int axis = -1;
  for (int i = 0; i < z.dim; ++i) {
    if (z[i] != 0) {
      if (axis >= 0) return -1;
      axis = i;
    }
  }
  return axis;
}

std::int64_t checked_pow(std::int64_t base, std::int64_t exp, std::int64_t cap) {
  std::int64_t r = 1;
  for (std::int64_t i = 0; i < exp; ++i) {
    if (r > cap / base) return -1;
    r *= base;
  }
  return r;
}

std::string fmt_num(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

}  // namespace

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::StableLike: return "StableLike";
    case ModelKind::AxisStableLike: return "AxisStableLike";
    case ModelKind::SparseLongRange: return "SparseLongRange";
    case ModelKind::Table: return "Table";
  }
  return "?";
}

ModelKind parse_model_kind(std::string_view name) {
  if (name == "StableLike") return ModelKind::StableLike;
  if (name == "AxisStableLike") return ModelKind::AxisStableLike;
  if (name == "SparseLongRange") return ModelKind::SparseLongRange;
  if (name == "Table") return ModelKind::Table;
  throw ConfigError("unknown model kind '" + std::string(name) + "'");
}

std::string_view to_string(AssumptionId id) {
  switch (id) {
    case AssumptionId::A1: return "A1";
    case AssumptionId::A2: return "A2";
    case AssumptionId::A3: return "A3";
    case AssumptionId::A4: return "A4";
  }
  return "?";
}

double WeightFunction::operator()(const Point& x, const Point& y) const {
  if (is_constant()) return lo;
  double s = 0.0;
  for (int i = 0; i < x.dim; ++i) s += static_cast<double>(x[i] + y[i]);
  return lo + (hi - lo) * 0.5 * (1.0 + std::cos(s));
}

// ---------------------------------------------------------------------------
// construction

ConductanceModel ConductanceModel::stable_like(int dim, double alpha, WeightFunction weight) {
  ConductanceModel m;
  m.kind_ = ModelKind::StableLike;
  m.dim_ = dim;
  m.alpha_ = alpha;
  m.weight_ = weight;
  m.finalize();
  return m;
}

ConductanceModel ConductanceModel::axis_stable_like(int dim, double alpha, WeightFunction weight) {
  ConductanceModel m;
  m.kind_ = ModelKind::AxisStableLike;
  m.dim_ = dim;
  m.alpha_ = alpha;
  m.weight_ = weight;
  m.finalize();
  return m;
}

ConductanceModel ConductanceModel::sparse_long_range(int dim) {
  constexpr std::int64_t kCap = std::int64_t{1} << 62;
  std::vector<double> a;
  std::vector<std::int64_t> b;
  for (std::int64_t n = 1;; ++n) {
    const std::int64_t nn = checked_pow(n, n, kCap);
    if (nn < 0) break;
    const std::int64_t bn = checked_pow(n, nn, kCap);
    if (bn < 0) break;
    b.push_back(bn);
    const double bd = static_cast<double>(bn);
    a.push_back(std::ldexp(1.0, static_cast<int>(-n - 4)) / (bd * bd));
  }
  return sparse_long_range(dim, std::move(a), std::move(b));
}

ConductanceModel ConductanceModel::sparse_long_range(int dim, std::vector<double> a, std::vector<std::int64_t> b) {
  ConductanceModel m;
  m.kind_ = ModelKind::SparseLongRange;
  m.dim_ = dim;
  m.alpha_ = 2.0;
  m.a_ = std::move(a);
  m.b_ = std::move(b);
  m.finalize();
  return m;
}

ConductanceModel ConductanceModel::table(int dim, double alpha, std::vector<TableEntry> entries) {
  ConductanceModel m;
  m.kind_ = ModelKind::Table;
  m.dim_ = dim;
  m.alpha_ = alpha;
  m.table_ = std::move(entries);
  m.finalize();
  return m;
}

ConductanceModel ConductanceModel::nearest_neighbor(int dim) {
  std::vector<TableEntry> entries;
  for (int i = 0; i < dim; ++i) {
    entries.push_back({Point::unit(dim, i, 1), 1.0});
    entries.push_back({Point::unit(dim, i, -1), 1.0});
  }
  return table(dim, 2.0, std::move(entries));
}

void ConductanceModel::finalize() {
  if (dim_ < 1 || dim_ > kMaxDim) throw ConfigError("model dim must be in [1," + std::to_string(kMaxDim) + "]");
  if (!(alpha_ > 0.0 && alpha_ <= 2.0)) throw ConfigError("model alpha must lie in (0,2]");
  switch (kind_) {
    case ModelKind::StableLike:
    case ModelKind::AxisStableLike:
      if (!(weight_.lo > 0.0 && weight_.lo <= weight_.hi && std::isfinite(weight_.hi)))
        throw ConfigError("weight bounds must satisfy 0 < c_lo <= c_hi < inf");
      if (kind_ == ModelKind::AxisStableLike && dim_ < 2) throw ConfigError("AxisStableLike requires dim >= 2");
      break;
    case ModelKind::SparseLongRange: {
      if (dim_ < 3) throw ConfigError("SparseLongRange requires dim >= 3");
      if (a_.empty() || a_.size() != b_.size()) throw ConfigError("SparseLongRange needs equally long a/b sequences");
      double sa = 0.0, sab = 0.0;
      for (std::size_t i = 0; i < a_.size(); ++i) {
        if (!(a_[i] > 0.0) || b_[i] < 1) throw ConfigError("SparseLongRange sequences must be positive");
        sa += a_[i];
        sab += a_[i] * static_cast<double>(b_[i]) * static_cast<double>(b_[i]);
      }
      if (sa > 0.125) throw ConfigError("SparseLongRange requires sum a_n <= 1/8");
      if (!std::isfinite(sab)) throw ConfigError("SparseLongRange requires sum a_n b_n^2 < inf");
      break;
    }
    case ModelKind::Table: {
      std::unordered_map<Point, double, PointHash> lookup;
      for (const auto& e : table_) {
        if (e.offset.dim != dim_) throw ConfigError("table offset dimension mismatch");
        if (e.offset == Point::origin(dim_)) throw ConfigError("table contains a zero offset");
        if (!(e.rate >= 0.0) || !std::isfinite(e.rate)) throw ConfigError("table rates must be finite and >= 0");
        if (!lookup.emplace(e.offset, e.rate).second) throw ConfigError("duplicate table offset " + e.offset.to_string());
      }
      for (const auto& e : table_) {
        auto it = lookup.find(-e.offset);
        if (it == lookup.end() || it->second != e.rate)
          throw ConfigError("nonsymmetric table: C(0," + e.offset.to_string() + ") has no matching reverse entry");
        table_range_ = std::max(table_range_, e.offset.norm());
      }
      table_lookup_ = std::move(lookup);
      break;
    }
  }

  rate_factor_ = std::pow(static_cast<double>(scale_), alpha_ - dim_);
  site_mass_ = std::pow(static_cast<double>(scale_), -static_cast<double>(dim_));

  // Unscaled total rate for translation-invariant models.
  unit_total_ = -1.0;
  const double s_full = dim_ + alpha_;
  switch (kind_) {
    case ModelKind::StableLike:
      if (weight_.is_constant()) {
        const double closed = special::lattice_zeta_closed_form(dim_, s_full);
        if (closed > 0.0) unit_total_ = weight_.lo * closed;
      }
      break;
    case ModelKind::AxisStableLike:
      if (weight_.is_constant()) unit_total_ = weight_.lo * 2.0 * dim_ * special::riemann_zeta(1.0 + alpha_);
      break;
    case ModelKind::SparseLongRange: {
      double s = 0.0;
      for (double an : a_) s += 2.0 * an;
      const double eps = s;
      s += 2.0 * (dim_ - 1) * ((1.0 - eps) / (2.0 * (dim_ - 1)));
      unit_total_ = s;
      break;
    }
    case ModelKind::Table: {
      double s = 0.0;
      for (const auto& e : table_) s += e.rate;
      unit_total_ = s;
      break;
    }
  }
}

ConductanceModel ConductanceModel::rescaled(std::int64_t rho) const {
  if (rho < 1) throw ConfigError("rescaling factor must be a positive integer");
  ConductanceModel m(*this);
  m.scale_ = scale_ * rho;
  m.rate_factor_ = std::pow(static_cast<double>(m.scale_), alpha_ - dim_);
  m.site_mass_ = std::pow(static_cast<double>(m.scale_), -static_cast<double>(dim_));
  return m;
}

ConductanceModel rescale(const ConductanceModel& model, std::int64_t rho) { return model.rescaled(rho); }

// ---------------------------------------------------------------------------
// evaluation

double ConductanceModel::base_rate_of_offset(const Point& z) const {
  switch (kind_) {
    case ModelKind::StableLike:
      return std::pow(z.norm2(), -0.5 * (dim_ + alpha_));
    case ModelKind::AxisStableLike: {
      const int axis = single_axis(z);
      if (axis < 0) return 0.0;
      const double k = std::abs(static_cast<double>(z[axis]));
      return std::pow(k, -1.0 - alpha_);
    }
    case ModelKind::SparseLongRange: {
      const int axis = single_axis(z);
      if (axis < 0) return 0.0;
      const std::int64_t k = z[axis] < 0 ? -z[axis] : z[axis];
      if (axis == 0) {
        for (std::size_t n = 0; n < b_.size(); ++n)
          if (b_[n] == k) return a_[n];
        return 0.0;
      }
      if (k != 1) return 0.0;
      double eps = 0.0;
      for (double an : a_) eps += 2.0 * an;
      return (1.0 - eps) / (2.0 * (dim_ - 1));
    }
    case ModelKind::Table: {
      auto it = table_lookup_.find(z);
      return it == table_lookup_.end() ? 0.0 : it->second;
    }
  }
  return 0.0;
}

double ConductanceModel::rate(const Point& x, const Point& y) const {
  if (x.dim != dim_ || y.dim != dim_)
    throw ConfigError("dimension mismatch: model has d=" + std::to_string(dim_) + ", points have d=" +
                      std::to_string(x.dim) + "," + std::to_string(y.dim));
  if (x == y) return 0.0;
  const Point z = y - x;
  double r = base_rate_of_offset(z);
  if (r == 0.0) return 0.0;
  if (kind_ == ModelKind::StableLike || kind_ == ModelKind::AxisStableLike) r *= weight_(x, y);
  return r * rate_factor_;
}

double eval_conductance(const ConductanceModel& model, const Point& x, const Point& y) { return model.rate(x, y); }

double ConductanceModel::envelope(const Point& z) const {
  if (z == Point::origin(dim_)) return 0.0;
  switch (kind_) {
    case ModelKind::StableLike:
    case ModelKind::AxisStableLike:
      return weight_.hi * base_rate_of_offset(z) * rate_factor_;
    case ModelKind::SparseLongRange:
      return base_rate_of_offset(z) * rate_factor_;
    case ModelKind::Table: {
      const double n2 = z.norm2();
      double best = 0.0;
      for (const auto& e : table_)
        if (e.offset.norm2() == n2) best = std::max(best, e.rate);
      return best * rate_factor_;
    }
  }
  return 0.0;
}

double ConductanceModel::envelope_tail_bound(double r) const {
  switch (kind_) {
    case ModelKind::StableLike: {
      const double s = dim_ + alpha_;
      const double rmin = special::lattice_tail_min_radius(dim_);
      double explicit_part = 0.0;
      double from = r;
      if (r < rmin) {
        // Sum the shell r < |z| <= rmin explicitly, then bound beyond.
        from = std::ceil(rmin);
        for_each_lattice_point(dim_, from, [&](const Point& z) {
          if (z.norm() > r) explicit_part += std::pow(z.norm2(), -0.5 * s);
        });
      }
      return weight_.hi * rate_factor_ * (explicit_part + special::lattice_tail_bound(dim_, from, s));
    }
    case ModelKind::AxisStableLike:
      return weight_.hi * rate_factor_ * 2.0 * dim_ * special::power_tail_bound_1d(r, 1.0 + alpha_);
    case ModelKind::SparseLongRange:
    case ModelKind::Table: {
      double s = 0.0;
      for_each_envelope_point(kInf, [&](const Point& z, double phi) {
        if (z.norm() > r) s += phi;
      });
      return s;
    }
  }
  return kInf;
}

void ConductanceModel::for_each_displacement(double r, const std::function<void(const Point&, double)>& fn) const {
  const bool exact = translation_invariant();
  switch (kind_) {
    case ModelKind::StableLike:
      for_each_lattice_point(dim_, r, [&](const Point& z) {
        fn(z, (exact ? weight_.lo : weight_.hi) * base_rate_of_offset(z) * rate_factor_);
      });
      break;
    case ModelKind::AxisStableLike: {
      const auto reach = static_cast<std::int64_t>(std::floor(r));
      const double c = exact ? weight_.lo : weight_.hi;
      for (int axis = 0; axis < dim_; ++axis) {
        for (std::int64_t k = 1; k <= reach; ++k) {
          const double v = c * std::pow(static_cast<double>(k), -1.0 - alpha_) * rate_factor_;
          fn(Point::unit(dim_, axis, k), v);
          fn(Point::unit(dim_, axis, -k), v);
        }
      }
      break;
    }
    case ModelKind::SparseLongRange: {
      double eps = 0.0;
      for (double an : a_) eps += 2.0 * an;
      for (std::size_t n = 0; n < b_.size(); ++n) {
        if (static_cast<double>(b_[n]) > r) continue;
        fn(Point::unit(dim_, 0, b_[n]), a_[n] * rate_factor_);
        fn(Point::unit(dim_, 0, -b_[n]), a_[n] * rate_factor_);
      }
      if (r >= 1.0) {
        const double w = (1.0 - eps) / (2.0 * (dim_ - 1)) * rate_factor_;
        for (int j = 1; j < dim_; ++j) {
          fn(Point::unit(dim_, j, 1), w);
          fn(Point::unit(dim_, j, -1), w);
        }
      }
      break;
    }
    case ModelKind::Table:
      for (const auto& e : table_)
        if (e.offset.norm() <= r && e.rate > 0.0) fn(e.offset, e.rate * rate_factor_);
      break;
  }
}

void ConductanceModel::for_each_envelope_point(double r, const std::function<void(const Point&, double)>& fn) const {
  if (kind_ != ModelKind::Table) {
    if (kind_ == ModelKind::SparseLongRange) {
      for_each_displacement(r, fn);
      return;
    }
    // Stable-like families: envelope uses c_hi.
    if (kind_ == ModelKind::StableLike) {
      for_each_lattice_point(dim_, r, [&](const Point& z) { fn(z, envelope(z)); });
    } else {
      const auto reach = static_cast<std::int64_t>(std::floor(r));
      for (int axis = 0; axis < dim_; ++axis)
        for (std::int64_t k = 1; k <= reach; ++k) {
          fn(Point::unit(dim_, axis, k), envelope(Point::unit(dim_, axis, k)));
          fn(Point::unit(dim_, axis, -k), envelope(Point::unit(dim_, axis, -k)));
        }
    }
    return;
  }
  // Radial maximum of the table: every lattice point sharing the norm of some entry.
  std::map<double, double> radial;
  for (const auto& e : table_) {
    auto& slot = radial[e.offset.norm2()];
    slot = std::max(slot, e.rate);
  }
  const double reach = std::min(r, table_range_);
  for_each_lattice_point(dim_, reach, [&](const Point& z) {
    auto it = radial.find(z.norm2());
    if (it != radial.end() && it->second > 0.0) fn(z, it->second * rate_factor_);
  });
}

bool ConductanceModel::translation_invariant() const {
  if (kind_ == ModelKind::StableLike || kind_ == ModelKind::AxisStableLike) return weight_.is_constant();
  return true;
}

double ConductanceModel::range() const {
  switch (kind_) {
    case ModelKind::StableLike:
    case ModelKind::AxisStableLike:
      return kInf;
    case ModelKind::SparseLongRange:
      return static_cast<double>(std::max(b_.back(), std::int64_t{1}));
    case ModelKind::Table:
      return table_range_;
  }
  return kInf;
}

bool ConductanceModel::total_rate_exact() const { return unit_total_ >= 0.0; }

double ConductanceModel::total_rate(const Point& x) const {
  if (x.dim != dim_) throw ConfigError("dimension mismatch in total_rate");
  if (unit_total_ >= 0.0) return unit_total_ * rate_factor_;
  const double radius = dim_ == 1 ? 4096.0 : (dim_ == 2 ? 64.0 : 12.0);
  const VertexRate vr = vertex_rate(*this, x, radius);
  return vr.value + vr.tail_bound;
}

std::string ConductanceModel::id() const {
  std::string s(to_string(kind_));
  s += "(d=" + std::to_string(dim_) + ",alpha=" + fmt_num(alpha_);
  if (kind_ == ModelKind::StableLike || kind_ == ModelKind::AxisStableLike) {
    s += ",c=[" + fmt_num(weight_.lo) + "," + fmt_num(weight_.hi) + "]";
    if (!weight_.is_constant()) s += ",oscillating";
  }
  if (kind_ == ModelKind::Table) s += ",entries=" + std::to_string(table_.size());
  if (kind_ == ModelKind::SparseLongRange) s += ",terms=" + std::to_string(a_.size());
  s += ")";
  if (scale_ != 1) s += "@rho=" + std::to_string(scale_);
  return s;
}

// ---------------------------------------------------------------------------
// operations

VertexRate vertex_rate(const ConductanceModel& model, const Point& x, double radius) {
  if (x.dim != model.dim()) throw ConfigError("dimension mismatch in vertex_rate");
  VertexRate out;
  if (model.translation_invariant()) {
    model.for_each_displacement(radius, [&](const Point&, double c) { out.value += c; });
  } else {
    model.for_each_displacement(radius, [&](const Point& z, double) { out.value += model.rate(x, x + z); });
  }
  out.tail_bound = model.envelope_tail_bound(radius);
  return out;
}

AssumptionReport check_A3(const ConductanceModel& model, const std::vector<double>& radii, double growth_cap) {
  if (radii.empty()) throw DomainError("check_A3 needs at least one radius");
  for (double r : radii)
    if (!(r >= 1.0)) throw DomainError("check_A3 radii must be >= 1");

  AssumptionReport rep;
  rep.assumption = AssumptionId::A3;
  rep.parameters = radii;
  rep.bound = growth_cap;

  const double alpha = model.alpha();
  const int d = model.dim();
  const double rmax = *std::max_element(radii.begin(), radii.end());
  double far = d == 1 ? 1e6 : (d == 2 ? 1000.0 : (d == 3 ? 100.0 : 30.0));
  if (model.kind() == ModelKind::AxisStableLike) far = 1e6;
  far = std::max(far, 4.0 * rmax);
  if (model.kind() == ModelKind::Table) far = std::max(model.range(), 4.0 * rmax);

  const double tail = model.envelope_tail_bound(far);
  std::vector<double> s1(radii.size(), 0.0), s2(radii.size(), 0.0);
  model.for_each_envelope_point(far, [&](const Point& z, double phi) {
    const double n = z.norm();
    for (std::size_t i = 0; i < radii.size(); ++i) {
      if (n >= radii[i]) s1[i] += phi;
      else s2[i] += n * n * phi;
    }
  });

  for (std::size_t i = 0; i < radii.size(); ++i) {
    s1[i] += tail;
    rep.ratios.push_back(s1[i] * std::pow(radii[i], alpha));
    rep.ratios_aux.push_back(s2[i] * std::pow(radii[i], alpha - 2.0));
  }

  auto summarize = [&](const std::vector<double>& v, double& sup, double& spread, double& growth) {
    sup = *std::max_element(v.begin(), v.end());
    const double lo = *std::min_element(v.begin(), v.end());
    spread = lo > 0.0 ? sup / lo : (sup > 0.0 ? kInf : 1.0);
    // Growth is measured from the smallest radius.
    const auto first = static_cast<std::size_t>(std::min_element(radii.begin(), radii.end()) - radii.begin());
    growth = v[first] > 0.0 ? sup / v[first] : (sup > 0.0 ? kInf : 1.0);
  };
  summarize(rep.ratios, rep.constant, rep.spread, rep.growth);
  summarize(rep.ratios_aux, rep.constant_aux, rep.spread_aux, rep.growth_aux);

  const bool finite = std::isfinite(rep.constant) && std::isfinite(rep.constant_aux);
  rep.pass = finite && rep.growth <= growth_cap && rep.growth_aux <= growth_cap;
  if (!std::isfinite(tail)) rep.note = "envelope not summable";
  if (!rep.pass) {
    const auto worst = static_cast<std::size_t>(std::max_element(rep.ratios.begin(), rep.ratios.end()) - rep.ratios.begin());
    rep.witness = "r=" + fmt_num(radii[worst]);
  }
  rep.window = "|z| <= " + fmt_num(far) + " + envelope tail";
  return rep;
}

AssumptionReport check_A2(const ConductanceModel& model, const std::vector<Point>& sites) {
  AssumptionReport rep;
  rep.assumption = AssumptionId::A2;
  double kappa1 = kInf;
  std::string witness;
  for (const auto& x : sites) {
    const double v = model.total_rate(x);
    rep.ratios.push_back(v);
    if (v < kappa1) {
      kappa1 = v;
      witness = x.to_string();
    }
  }
  rep.constant = kappa1;
  rep.pass = kappa1 > 0.0 && std::isfinite(kappa1);
  rep.witness = witness;
  return rep;
}

AssumptionReport check_A1(const ConductanceModel& model, std::size_t pairs, std::int64_t extent, std::uint64_t seed) {
  AssumptionReport rep;
  rep.assumption = AssumptionId::A1;
  std::mt19937_64 gen(seed);
  std::uniform_int_distribution<std::int64_t> coord(-extent, extent);
  double worst = 0.0;
  rep.pass = true;
  for (std::size_t i = 0; i < pairs; ++i) {
    Point x(model.dim()), y(model.dim());
    for (int k = 0; k < model.dim(); ++k) {
      x[k] = coord(gen);
      y[k] = coord(gen);
    }
    const double cxy = model.rate(x, y);
    const double cyx = model.rate(y, x);
    const double dev = std::abs(cxy - cyx);
    if (dev > worst || cxy < 0.0 || model.rate(x, x) != 0.0) {
      worst = std::max(worst, dev);
      if (dev != 0.0 || cxy < 0.0 || model.rate(x, x) != 0.0) {
        rep.pass = false;
        rep.witness = x.to_string() + "," + y.to_string();
      }
    }
  }
  rep.constant = worst;
  return rep;
}

std::vector<TableEntry> parse_table_csv(std::string_view text, int dim) {
  std::vector<TableEntry> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    std::string line(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos || line[line.find_first_not_of(" \t")] == '#') {
      if (end == text.size()) break;
      continue;
    }
    std::vector<double> cells;
    std::stringstream ss(line);
    std::string cell;
    bool numeric = true;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        cells.push_back(std::stod(cell, &used));
        if (cell.find_first_not_of(" \t", used) != std::string::npos) numeric = false;
      } catch (const std::exception&) {
        numeric = false;
      }
    }
    if (!numeric) {
      if (out.empty() && line_no == 1) continue;  // header row
      throw ConfigError("table csv line " + std::to_string(line_no) + ": non-numeric cell");
    }
    if (cells.size() != static_cast<std::size_t>(dim) + 1)
      throw ConfigError("table csv line " + std::to_string(line_no) + ": expected " + std::to_string(dim + 1) + " columns");
    TableEntry e{Point(dim), cells.back()};
    for (int i = 0; i < dim; ++i) {
      if (cells[static_cast<std::size_t>(i)] != std::floor(cells[static_cast<std::size_t>(i)]))
        throw ConfigError("table csv line " + std::to_string(line_no) + ": offsets must be integers");
      e.offset[i] = static_cast<std::int64_t>(cells[static_cast<std::size_t>(i)]);
    }
    out.push_back(e);
    if (end == text.size()) break;
  }
  return out;
}

}  // namespace hklab
