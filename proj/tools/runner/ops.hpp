#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <hklab/conductance.hpp>
#include <hklab/lattice.hpp>

#include "runner.hpp"

namespace hklab::cli {

enum class ParamKind { Number, Integer, Bool, String, Point, NumberList, IntegerList };

struct ParamSpec {
  std::string name;
  ParamKind kind;
  json fallback;  // null for points means the origin
  std::string help;
};

class TaskContext;

struct OpSpec {
  std::string name;
  std::string summary;
  std::vector<ParamSpec> params;
  bool needs_window = false;
  std::function<void(TaskContext&)> run;
};

const std::vector<OpSpec>& op_registry();
const OpSpec* find_op(const std::string& name);

/// Model built from the config's model block; throws SchemaError naming the field.
ConductanceModel model_from_config(const json& block, const std::filesystem::path& base_dir = {});
std::optional<LatticeWindow> window_from_config(const json& config, int dim);

/// Checks a task's params against the op's spec; throws SchemaError.
void validate_params(const OpSpec& op, const json& params, int dim, const std::string& where);

/// One report row under construction.
struct Row {
  double value = 0.0;
  double error = 0.0;
  double tolerance = 0.0;
  bool pass = true;
  bool inconclusive = false;
  std::string note;
  std::string csv;
  json metrics = json::object();
  json extra_params = json::object();
};

/// Shared state across the tasks of one run (harmonic solutions are reused between tasks).
struct RunCache {
  std::map<std::string, std::shared_ptr<void>> entries;
};

class TaskContext {
 public:
  TaskContext(const OpSpec& op, const json& params, const ConductanceModel& model, std::optional<LatticeWindow> window,
              std::uint64_t seed, std::size_t index, std::string config_hash, const RunOptions& options, RunCache& cache);

  const ConductanceModel& model() const { return model_; }
  const LatticeWindow& window() const;
  std::uint64_t seed() const { return seed_; }
  std::size_t threads() const { return options_.threads; }
  double tol_scale() const { return options_.tolerance_scale.value_or(1.0); }
  RunCache& cache() { return cache_; }

  double num(const std::string& name) const;
  std::int64_t integer(const std::string& name) const;
  bool flag(const std::string& name) const;
  std::string str(const std::string& name) const;
  Point point(const std::string& name) const;
  std::vector<double> nums(const std::string& name) const;
  std::vector<std::int64_t> ints(const std::string& name) const;
  const json& resolved() const { return resolved_; }

  /// Writes task<index>_<op><suffix>.csv into the output dir; returns the file name.
  std::string write_csv(const std::string& suffix, const std::function<void(std::ostream&)>& body);

  void set_label(std::string label) { label_ = std::move(label); }
  const std::string& label() const { return label_; }

  void emit(Row row);
  std::vector<json>& rows() { return rows_; }

 private:
  const OpSpec& op_;
  json resolved_;
  const ConductanceModel& model_;
  std::optional<LatticeWindow> window_;
  std::uint64_t seed_;
  std::size_t index_;
  std::string hash_;
  std::string label_;
  const RunOptions& options_;
  RunCache& cache_;
  std::vector<json> rows_;
};

json point_json(const Point& p);

}  // namespace hklab::cli
