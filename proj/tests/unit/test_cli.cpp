#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "runner/ops.hpp"
#include "runner/runner.hpp"

using namespace hklab::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("hklab_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write_config(const fs::path& dir, const std::string& text) {
  const fs::path p = dir / "config.json";
  std::ofstream(p) << text;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* kA3Config = R"({
  "schema_version": 1,
  "seed": 3,
  "model": {"kind": "StableLike", "dim": 1, "alpha": 1},
  "tasks": [
    {"op": "check_A3", "params": {"radii": [2, 4, 8, 16]}},
    {"op": "estimate_exit_prob", "params": {"R_values": [4, 8], "n": 2000}}
  ]
})";

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("empty task list") {
  const auto dir = scratch("empty");
  const auto cfg = write_config(dir, R"({"schema_version": 1, "model": {"kind": "StableLike", "dim": 1, "alpha": 1},
                                        "tasks": []})");
  RunOptions opt;
  opt.out_dir = dir / "out";
  std::ostringstream log;
  CHECK(run(cfg, opt, log) == 0);
  const auto report = load_json_file(dir / "out" / "report.json");
  CHECK(report["rows"].empty());
}

TEST_CASE("check_A3 row passes and carries provenance") {
  const auto dir = scratch("a3");
  const auto cfg = write_config(dir, kA3Config);
  RunOptions opt;
  opt.out_dir = dir / "out";
  std::ostringstream log;
  CHECK(run(cfg, opt, log) == 0);
  const auto report = load_json_file(dir / "out" / "report.json");
  const auto& row = report["rows"][0];
  CHECK(row["pass"] == true);
  for (const char* key : {"op", "model", "params", "value", "tolerance", "seed", "config_hash"}) CHECK(row.contains(key));
  CHECK(row["config_hash"] == report["config_hash"]);
  CHECK(fs::exists(dir / "out" / "task0_check_A3.csv"));
  CHECK(fs::exists(dir / "out" / "metadata.json"));
}

TEST_CASE("malformed model kind is a schema error naming the field") {
  const auto dir = scratch("kind");
  const auto cfg = write_config(dir, R"({"schema_version": 1, "model": {"kind": "Stable", "dim": 1}, "tasks": []})");
  RunOptions opt;
  opt.out_dir = dir / "out";
  std::ostringstream log;
  CHECK(run(cfg, opt, log) == 2);
  CHECK(log.str().find("model.kind") != std::string::npos);
}

TEST_CASE("syntax errors report line and column") {
  CHECK_THROWS_WITH_AS(parse_json_text("{\n  \"a\": 1,\n  \"b\" 2\n}"), doctest::Contains("line 3"), SchemaError);
}

TEST_CASE("unknown parameters and ops are schema errors") {
  RunOptions opt;
  json cfg = parse_json_text(R"({"schema_version": 1, "model": {"kind": "StableLike", "dim": 1, "alpha": 1},
                                 "tasks": [{"op": "check_A3", "params": {"radius": 3}}]})");
  CHECK_THROWS_WITH_AS(normalize_config(cfg, opt), doctest::Contains("tasks[0].params.radius"), SchemaError);
  cfg["tasks"][0] = {{"op", "nope"}};
  CHECK_THROWS_WITH_AS(normalize_config(cfg, opt), doctest::Contains("tasks[0].op"), SchemaError);
  cfg["tasks"][0] = {{"op", "transition_density"}};
  CHECK_THROWS_WITH_AS(normalize_config(cfg, opt), doctest::Contains("window"), SchemaError);
}

TEST_CASE("failing task still lets later tasks run") {
  const auto dir = scratch("fail");
  const auto cfg = write_config(dir, R"({"schema_version": 1, "model": {"kind": "StableLike", "dim": 1, "alpha": 1},
    "tasks": [{"op": "theoretical_exponent", "params": {"c1": 2}}, {"op": "eval_conductance", "params": {"y": [2]}}]})");
  RunOptions opt;
  opt.out_dir = dir / "out";
  std::ostringstream log;
  CHECK(run(cfg, opt, log) == 1);
  const auto report = load_json_file(dir / "out" / "report.json");
  REQUIRE(report["rows"].size() == 2);
  CHECK(report["rows"][0].contains("error_message"));
  CHECK(report["rows"][1]["value"] == 0.25);
}

TEST_CASE("same config gives a byte-identical report and replay matches") {
  const auto dir = scratch("replay");
  const auto cfg = write_config(dir, kA3Config);
  RunOptions a, b;
  a.out_dir = dir / "a";
  b.out_dir = dir / "b";
  b.threads = 3;
  std::ostringstream log;
  REQUIRE(run(cfg, a, log) == 0);
  REQUIRE(run(cfg, b, log) == 0);
  CHECK(slurp(dir / "a" / "report.json") == slurp(dir / "b" / "report.json"));
  CHECK(replay(dir / "a" / "report.json", {}, log) == 0);
}

TEST_CASE("replay detects edits") {
  const auto dir = scratch("edit");
  const auto cfg = write_config(dir, kA3Config);
  RunOptions opt;
  opt.out_dir = dir / "a";
  std::ostringstream log;
  REQUIRE(run(cfg, opt, log) == 0);
  const auto original = load_json_file(dir / "a" / "report.json");

  auto seed_edit = original;
  seed_edit["config"]["seed"] = 4;
  std::ofstream(dir / "seed.json") << seed_edit.dump(2);
  CHECK(replay(dir / "seed.json", {}, log) == 1);

  auto row_seed = original;
  row_seed["rows"][1]["seed"] = 12345;
  std::ofstream(dir / "rowseed.json") << row_seed.dump(2);
  CHECK(replay(dir / "rowseed.json", {}, log) == 1);

  auto value_edit = original;
  value_edit["rows"][1]["value"] = value_edit["rows"][1]["value"].get<double>() + 1e-9;
  std::ofstream(dir / "value.json") << value_edit.dump(2);
  std::ostringstream drift;
  CHECK(replay(dir / "value.json", {}, drift) == 1);
  CHECK(drift.str().find("$.rows[1].value") != std::string::npos);
}

TEST_CASE("seed override changes the hash") {
  RunOptions opt;
  const json cfg = parse_json_text(kA3Config);
  opt.seed = 99;
  const json a = normalize_config(cfg, opt);
  CHECK(a["seed"] == 99);
  CHECK(config_hash(a) != config_hash(normalize_config(cfg, {})));
}

TEST_CASE("first difference") {
  CHECK(first_difference(json{{"a", {1, 2}}}, json{{"a", {1, 3}}}) == "$.a[1]");
  CHECK(first_difference(json{{"a", 1}}, json{{"a", 1}}).empty());
  CHECK(first_difference(json{{"a", 1}}, json{{"b", 1}}) == "$.a");
}

TEST_CASE("model blocks") {
  CHECK(model_from_config(parse_json_text(R"({"kind": "SparseLongRange", "dim": 3})")).total_rate({0, 0, 0}) ==
        doctest::Approx(1.0).epsilon(1e-12));
  const auto t = model_from_config(parse_json_text(R"({"kind": "Table", "dim": 1, "alpha": 2, "table": [[1, 0.5], [-1, 0.5]]})"));
  CHECK(t.rate({0}, {1}) == 0.5);
  CHECK_THROWS_AS(model_from_config(parse_json_text(R"({"kind": "StableLike", "dim": 1})")), SchemaError);
  CHECK_THROWS_AS(model_from_config(parse_json_text(R"({"kind": "StableLike", "dim": 1, "alpha": 1, "c_lo": 2, "c_hi": 1})")),
                  SchemaError);
}

TEST_CASE("every op is documented") {
  for (const auto& op : op_registry()) {
    std::ostringstream os;
    CHECK(describe_op(op.name, os) == 0);
    CHECK_FALSE(op.summary.empty());
  }
  std::ostringstream os;
  CHECK(describe_op("no_such_op", os) == 2);
}

}  // TEST_SUITE
