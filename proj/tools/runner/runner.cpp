#include "runner.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "ops.hpp"

namespace hklab::cli {

namespace {

constexpr const char* kTool = "hklab";

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t task_seed(std::uint64_t seed, std::size_t index) {
  return splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(index) + 1));
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << text;
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

std::string compiler_id() {
#if defined(__clang__)
  return "clang " __clang_version__;
#elif defined(__GNUC__)
  return "gcc " __VERSION__;
#else
  return "unknown";
#endif
}

bool row_failed(const json& row) { return !row.value("pass", false) && !row.value("inconclusive", false); }

}  // namespace

json parse_json_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    const std::size_t stop = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < stop; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::string msg = e.what();
    if (const auto p = msg.find("syntax error"); p != std::string::npos) msg = msg.substr(p);
    throw SchemaError("line " + std::to_string(line) + ", column " + std::to_string(col), msg);
  }
}

json load_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError(path.string(), "cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_json_text(ss.str());
  } catch (const SchemaError& e) {
    throw SchemaError(path.string() + ": " + e.where(), std::string(e.what()).substr(e.where().size() + 2));
  }
}

std::uint64_t config_hash(const json& config) {
  const std::string canon = config.dump();  // object keys are kept sorted
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canon) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hash_hex(std::uint64_t h) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

json normalize_config(json config, const RunOptions& options, const std::filesystem::path& base_dir) {
  if (!config.is_object()) throw SchemaError("config", "expected an object");
  for (const auto& [k, v] : config.items())
    if (k != "schema_version" && k != "seed" && k != "model" && k != "window" && k != "tasks" && k != "output_dir" &&
        k != "tolerance_scale")
      throw SchemaError(k, "unknown field");
  if (!config.contains("schema_version") || !config["schema_version"].is_number_integer())
    throw SchemaError("schema_version", "expected an integer");
  if (config["schema_version"].get<int>() != kSchemaVersion)
    throw SchemaError("schema_version", "unsupported version " + config["schema_version"].dump() + " (expected " +
                                            std::to_string(kSchemaVersion) + ")");
  if (options.seed) {
    config["seed"] = *options.seed;
  } else if (!config.contains("seed")) {
    config["seed"] = 0;
  } else if (!config["seed"].is_number_unsigned()) {
    throw SchemaError("seed", "expected a non-negative integer");
  }
  if (options.tolerance_scale) {
    config["tolerance_scale"] = *options.tolerance_scale;
  } else if (!config.contains("tolerance_scale")) {
    config["tolerance_scale"] = 1.0;
  } else if (!config["tolerance_scale"].is_number() || !(config["tolerance_scale"].get<double>() > 0.0)) {
    throw SchemaError("tolerance_scale", "expected a positive number");
  }
  if (config.contains("output_dir") && !config["output_dir"].is_string())
    throw SchemaError("output_dir", "expected a path");
  if (!config.contains("model")) throw SchemaError("model", "missing");
  json& model = config["model"];
  if (model.is_object() && model.contains("table_csv") && model["table_csv"].is_string()) {
    std::filesystem::path p = model["table_csv"].get<std::string>();
    if (p.is_relative() && !base_dir.empty()) model["table_csv"] = (base_dir / p).lexically_normal().string();
  }
  const ConductanceModel m = model_from_config(model);
  const auto window = window_from_config(config, m.dim());
  if (!config.contains("tasks")) config["tasks"] = json::array();
  if (!config["tasks"].is_array()) throw SchemaError("tasks", "expected a list");
  for (std::size_t i = 0; i < config["tasks"].size(); ++i) {
    json& task = config["tasks"][i];
    const std::string where = "tasks[" + std::to_string(i) + "]";
    if (!task.is_object()) throw SchemaError(where, "expected an object");
    for (const auto& [k, v] : task.items())
      if (k != "op" && k != "params" && k != "model" && k != "label") throw SchemaError(where + "." + k, "unknown field");
    if (!task.contains("op") || !task["op"].is_string()) throw SchemaError(where + ".op", "expected a string");
    const OpSpec* op = find_op(task["op"].get<std::string>());
    if (!op) throw SchemaError(where + ".op", "unknown op '" + task["op"].get<std::string>() + "'");
    if (task.contains("label") && !task["label"].is_string()) throw SchemaError(where + ".label", "expected a string");
    int dim = m.dim();
    if (task.contains("model")) {
      json& tm = task["model"];
      if (tm.is_object() && tm.contains("table_csv") && tm["table_csv"].is_string()) {
        std::filesystem::path p = tm["table_csv"].get<std::string>();
        if (p.is_relative() && !base_dir.empty()) tm["table_csv"] = (base_dir / p).lexically_normal().string();
      }
      try {
        dim = model_from_config(tm).dim();
      } catch (const SchemaError& e) {
        throw SchemaError(where + "." + e.where(), std::string(e.what()).substr(e.where().size() + 2));
      }
    }
    if (!task.contains("params")) task["params"] = json::object();
    validate_params(*op, task["params"], dim, where + ".params");
    if (op->needs_window && !window) throw SchemaError(where + ".op", op->name + " needs a window block");
    if (op->needs_window && window->dim() != dim) throw SchemaError(where + ".model", "dimension differs from the window");
  }
  return config;
}

RunResult run_config(const json& config, const RunOptions& run_options, std::ostream& log) {
  RunOptions options = run_options;
  options.tolerance_scale = config.value("tolerance_scale", 1.0);
  if (!options.out_dir) options.out_dir = config.value("output_dir", std::string("out"));
  const ConductanceModel model = model_from_config(config["model"]);
  const auto window = window_from_config(config, model.dim());
  const std::uint64_t seed = config["seed"].get<std::uint64_t>();
  const std::string hash = hash_hex(config_hash(config));
  if (options.write_files) std::filesystem::create_directories(*options.out_dir);

  RunCache cache;
  json rows = json::array();
  std::size_t failed = 0, inconclusive = 0, errors = 0;
  const json& tasks = config["tasks"];
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const OpSpec& op = *find_op(tasks[i]["op"].get<std::string>());
    const std::optional<ConductanceModel> own =
        tasks[i].contains("model") ? std::optional<ConductanceModel>(model_from_config(tasks[i]["model"])) : std::nullopt;
    const ConductanceModel& task_model = own ? *own : model;
    TaskContext ctx(op, tasks[i]["params"], task_model, window, task_seed(seed, i), i, hash, options, cache);
    if (tasks[i].contains("label")) ctx.set_label(tasks[i]["label"].get<std::string>());
    try {
      op.run(ctx);
    } catch (const std::exception& e) {
      ctx.rows().clear();
      ctx.rows().push_back({{"task", i},
                            {"label", ctx.label()},
                            {"op", op.name},
                            {"model", task_model.id()},
                            {"params", ctx.resolved()},
                            {"seed", ctx.seed()},
                            {"config_hash", hash},
                            {"pass", false},
                            {"inconclusive", false},
                            {"error_message", e.what()}});
      ++errors;
    }
    for (auto& row : ctx.rows()) {
      const bool bad = row_failed(row);
      if (bad) ++failed;
      if (row.value("inconclusive", false)) ++inconclusive;
      log << "[" << i << "] " << op.name << ": "
          << (row.contains("error_message") ? "ERROR " + row["error_message"].get<std::string>()
              : row.value("inconclusive", false) ? std::string("INCONCLUSIVE")
              : bad                              ? std::string("FAIL")
                                                 : std::string("PASS"));
      if (row.contains("value")) log << " value=" << row["value"].dump();
      log << '\n';
      rows.push_back(std::move(row));
    }
  }

  RunResult result;
  result.report = {{"schema_version", kSchemaVersion},
                   {"tool", kTool},
                   {"config_hash", hash},
                   {"config", config},
                   {"rows", rows},
                   {"summary",
                    {{"tasks", tasks.size()},
                     {"rows", rows.size()},
                     {"failed", failed},
                     {"inconclusive", inconclusive},
                     {"errors", errors}}}};
  result.exit_code = failed > 0 ? 1 : 0;
  if (options.write_files) {
    write_text(*options.out_dir / "report.json", result.report.dump(2) + "\n");
    json meta = {{"tool", kTool},
                 {"finished_utc", utc_now()},
                 {"compiler", compiler_id()},
                 {"threads", options.threads},
                 {"tolerance_scale", *options.tolerance_scale},
                 {"config_hash", hash}};
    write_text(*options.out_dir / "metadata.json", meta.dump(2) + "\n");
  }
  return result;
}

int run(const std::filesystem::path& config_path, const RunOptions& options, std::ostream& log) {
  json config;
  try {
    config = normalize_config(load_json_file(config_path), options, config_path.parent_path());
  } catch (const SchemaError& e) {
    log << "schema error: " << e.what() << '\n';
    return 2;
  }
  return run_config(config, options, log).exit_code;
}

std::string first_difference(const json& expected, const json& actual, const std::string& path) {
  const std::string here = path.empty() ? "$" : path;
  if (expected.is_number() && actual.is_number()) return expected == actual ? "" : here;
  if (expected.type() != actual.type()) return here;
  if (expected.is_object()) {
    for (const auto& [k, v] : expected.items()) {
      if (!actual.contains(k)) return here + "." + k;
      if (auto d = first_difference(v, actual[k], here + "." + k); !d.empty()) return d;
    }
    for (const auto& [k, v] : actual.items())
      if (!expected.contains(k)) return here + "." + k;
    return "";
  }
  if (expected.is_array()) {
    const std::size_t n = std::min(expected.size(), actual.size());
    for (std::size_t i = 0; i < n; ++i)
      if (auto d = first_difference(expected[i], actual[i], here + "[" + std::to_string(i) + "]"); !d.empty()) return d;
    if (expected.size() != actual.size()) return here + "[" + std::to_string(n) + "]";
    return "";
  }
  return expected == actual ? "" : here;
}

int replay(const std::filesystem::path& report_path, const RunOptions& options, std::ostream& log) {
  json report;
  json config;
  try {
    report = load_json_file(report_path);
    if (!report.is_object() || !report.contains("config") || !report.contains("config_hash"))
      throw SchemaError(report_path.string(), "not a report (missing config or config_hash)");
    RunOptions plain = options;
    plain.seed.reset();
    plain.tolerance_scale.reset();
    config = normalize_config(report["config"], plain);
  } catch (const SchemaError& e) {
    log << "schema error: " << e.what() << '\n';
    return 2;
  }
  const std::string hash = hash_hex(config_hash(config));
  if (report["config_hash"] != hash) {
    log << "drift at $.config_hash: report says " << report["config_hash"].dump() << ", config hashes to \"" << hash
        << "\"\n";
    return 1;
  }
  RunOptions quiet = options;
  quiet.write_files = false;
  std::ostringstream sink;
  const RunResult fresh = run_config(config, quiet, sink);
  const std::string diff = first_difference(report, fresh.report);
  if (!diff.empty()) {
    log << "drift at " << diff << '\n';
    return 1;
  }
  log << "replay matches " << report_path.string() << '\n';
  return 0;
}

void list_models(std::ostream& os) {
  os << "StableLike       C(x,y) = c(x,y) |x-y|^{-d-alpha}; params alpha, dim, c_lo, c_hi, weight\n"
     << "AxisStableLike   c(x,y) |x-y|^{-1-alpha} along coordinate axes only; same params\n"
     << "SparseLongRange  nearest neighbours plus rare jumps of length b_n with weight a_n; params dim, a_seq, b_seq\n"
     << "Table            explicit translation-invariant rates; params dim, alpha, table or table_csv\n";
}

void list_ops(std::ostream& os) {
  for (const auto& op : op_registry()) os << std::left << std::setw(28) << op.name << op.summary << '\n';
}

int describe_op(const std::string& name, std::ostream& os) {
  const OpSpec* op = find_op(name);
  if (!op) return 2;
  os << op->name << ": " << op->summary << '\n';
  if (op->needs_window) os << "requires a window block\n";
  for (const auto& p : op->params) {
    os << "  " << std::left << std::setw(16) << p.name << std::setw(24)
       << ("default " + (p.fallback.is_null() ? std::string(p.kind == ParamKind::Point ? "origin" : "null")
                                              : p.fallback.dump()))
       << p.help << '\n';
  }
  return 0;
}

}  // namespace hklab::cli
