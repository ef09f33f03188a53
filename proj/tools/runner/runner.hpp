#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

namespace hklab::cli {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

/// Config or report that does not match the schema. `where` is a field path such as
/// "tasks[2].params.radii" or "line 7, column 3".
class SchemaError : public std::runtime_error {
 public:
  SchemaError(std::string where, const std::string& what)
      : std::runtime_error(where + ": " + what), where_(std::move(where)) {}
  const std::string& where() const { return where_; }

 private:
  std::string where_;
};

/// Unset overrides fall back to the config (then to "out", seed 0 and scale 1).
struct RunOptions {
  std::optional<std::filesystem::path> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<double> tolerance_scale;
  std::size_t threads = 1;
  bool write_files = true;
};

struct RunResult {
  int exit_code = 0;
  json report;
};

/// Parses JSON text; syntax errors become SchemaError with line and column.
json parse_json_text(const std::string& text);
json load_json_file(const std::filesystem::path& path);

/// FNV-1a 64 over the canonical (sorted-key, compact) serialization.
std::uint64_t config_hash(const json& config);
std::string hash_hex(std::uint64_t h);

/// Checks the config against the schema, applies the seed and tolerance-scale overrides and
/// resolves relative table_csv paths against base_dir. Throws SchemaError.
json normalize_config(json config, const RunOptions& options, const std::filesystem::path& base_dir = {});

/// Runs every task of a normalized config. Writes report.json, per-task CSVs and metadata.json
/// when options.write_files is set.
RunResult run_config(const json& config, const RunOptions& options, std::ostream& log);

/// run: 0 when every conclusive check passes, 1 on a failed check or task error, 2 on a
/// schema violation.
int run(const std::filesystem::path& config_path, const RunOptions& options, std::ostream& log);

/// Re-executes the report's config and compares; 0 when identical, 1 naming the first drift.
int replay(const std::filesystem::path& report_path, const RunOptions& options, std::ostream& log);

/// First differing JSON path between two documents, or empty when equal.
std::string first_difference(const json& expected, const json& actual, const std::string& path = "");

void list_models(std::ostream& os);
/// 0 on success, 2 for an unknown op.
int describe_op(const std::string& name, std::ostream& os);
void list_ops(std::ostream& os);

}  // namespace hklab::cli
