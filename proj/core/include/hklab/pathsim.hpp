#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "hklab/conductance.hpp"
#include "hklab/lattice.hpp"
#include "hklab/report.hpp"
#include "hklab/rng.hpp"

namespace hklab {

/// Walker/Vose alias table; sampling is O(1) with two uniforms.
class AliasTable {
 public:
  explicit AliasTable(std::span<const double> weights);
  std::size_t size() const { return prob_.size(); }
  std::size_t sample(double u_index, double u_coin) const;
  /// Probability that sample() returns i (reconstructed from the table).
  double probability(std::size_t i) const;

 private:
  std::vector<double> prob_;
  std::vector<std::uint32_t> alias_;
};

enum class TailPolicy { Censor, Reject };
std::string_view to_string(TailPolicy p);
TailPolicy parse_tail_policy(std::string_view s);

struct SamplerOptions {
  TailPolicy policy = TailPolicy::Censor;
  double tail_target = 1e-6;  // enumerate until tail mass / v_x drops below this
  std::size_t max_points = 2'000'000;
  std::optional<LatticeWindow> window;  // leaving it censors the path
};

/// Draws holding times and jump targets of the chain. Translation-invariant models use one
/// displacement table; other models are thinned from the envelope table, which keeps the jump
/// kernel exact.
class JumpSampler {
 public:
  explicit JumpSampler(const ConductanceModel& model, SamplerOptions options = {});

  const ConductanceModel& model() const { return model_; }
  const SamplerOptions& options() const { return options_; }
  double enumeration_radius() const { return table_->radius; }
  std::size_t table_size() const { return table_->alias.size(); }
  /// v_x: total jump rate out of x.
  double exit_rate(const Point& x) const;
  /// Probability that a jump from x lands beyond the enumeration radius.
  double tail_probability(const Point& x) const;

  struct Jump {
    Point target;
    double hold = 0.0;
    bool tail = false;
  };
  Jump step(const Point& x, RandomStream& rng) const;

  /// Calls fn(y, jump rate) for every enumerated target y of x.
  void for_each_target(const Point& x, const std::function<void(const Point&, double)>& fn) const;

 private:
  struct Table {
    double radius = 0.0;
    int dim = 1;
    std::vector<std::int64_t> offsets;  // flat, dim entries per displacement
    std::vector<double> rates;          // jump rate (or envelope) per displacement
    AliasTable alias{std::vector<double>{1.0}};
    double enumerated = 0.0;            // sum of rates
    double tail = 0.0;                  // rate mass beyond the radius
  };
  static std::shared_ptr<const Table> build_table(const ConductanceModel& model, const SamplerOptions& options);

  ConductanceModel model_;
  SamplerOptions options_;
  std::shared_ptr<const Table> table_;
  bool thinned_ = false;
};

enum class CensorReason { None, Tail, Window };
std::string_view to_string(CensorReason r);

/// One trajectory: times[k] is the time of the k-th jump (times[0] = 0), states[k] the state
/// entered at that time.
struct PathSample {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  double horizon = 0.0;
  std::vector<double> times;
  std::vector<Point> states;
  bool censored = false;
  CensorReason reason = CensorReason::None;
  bool stopped = false;  // the stop rule fired at states.back()
  double end_time = 0.0;  // horizon, stopping time or censoring time
};

using StopRule = std::function<bool(const Point&)>;

/// Simulates from x0 until the horizon, the stop rule, or censoring. The stop rule is also
/// applied to x0.
PathSample sample_path(const JumpSampler& sampler, const Point& x0, double horizon, std::uint64_t seed,
                       std::uint64_t stream = 0, const StopRule& stop = {});

PathSample sample_path(const ConductanceModel& model, const Point& x0, double horizon, const LatticeWindow& window,
                       std::uint64_t seed);

void write_path_csv(const PathSample& path, std::ostream& os);

struct SimOptions {
  SamplerOptions sampler;
  std::size_t threads = 1;
  std::uint64_t config_hash = 0;
};

struct EstimatorResult {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t n_samples = 0;  // uncensored paths used
  std::size_t censored = 0;
  std::uint64_t seed = 0;
  std::uint64_t config_hash = 0;
  bool inconclusive = false;
  double censored_fraction() const {
    const double total = static_cast<double>(n_samples + censored);
    return total > 0 ? static_cast<double>(censored) / total : 0.0;
  }
};

/// Sum of values in a fixed pairwise order, independent of thread count.
double pairwise_sum(std::span<const double> values);

/// Mean and normal-approximation standard error over the given samples.
EstimatorResult summarize(std::span<const double> samples, std::size_t censored, std::uint64_t seed,
                          std::uint64_t config_hash);

/// P^x(tau_{B(x, aR)} < gamma R^alpha).
EstimatorResult estimate_exit_prob(const ConductanceModel& model, const Point& x, double a, double R, double gamma,
                                   std::size_t n, std::uint64_t seed, const SimOptions& options = {});

/// P^x(T_A < tau_{B(x,r)}) for A inside B(x, eta r).
EstimatorResult estimate_hitting_prob(const ConductanceModel& model, const Point& x, const std::vector<Point>& A,
                                      double r, std::size_t n, std::uint64_t seed, double eta = 0.25,
                                      const SimOptions& options = {});

/// The positive half {y in B(x, eta r) : y_1 > x_1} used as the default target set.
std::vector<Point> half_ball(const Point& x, double radius);

struct ExitTimeStudy {
  std::vector<double> radii;
  std::vector<EstimatorResult> per_radius;
  double slope = 0.0;
  bool inconclusive = false;
};

/// Monte Carlo E^x tau_{B(x,r)} per radius and the log-log slope.
ExitTimeStudy expected_exit_time(const ConductanceModel& model, const Point& x, const std::vector<double>& radii,
                                 std::size_t n, std::uint64_t seed, const SimOptions& options = {});

/// Solves (v - C_BB) u = g on B(x, r) (jump rates); u(x) is E^x int_0^tau g(X_s) ds.
/// With g = 1 this is the expected exit time.
double green_potential(const ConductanceModel& model, const Point& x, double r, const std::function<double(const Point&)>& g);

using PairFunction = std::function<double(const Point&, const Point&)>;

/// Both sides of the Levy system identity up to the exit time of B(x, r). g(z) = sum_y f(z,y)
/// C(z,y) is summed over the sampler's enumerated targets; the exact expectation of the right
/// side (Green potential of g) is reported alongside when the ball is small.
CheckReport levy_system_check(const ConductanceModel& model, const Point& x, const PairFunction& f, double r,
                              std::size_t n, std::uint64_t seed, const SimOptions& options = {});

/// Runs fn(i) for i in [0, n) on up to `threads` threads (static contiguous blocks).
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn);

}  // namespace hklab
