#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>

#include "json.hpp"

#include "cmcmc/errors.hpp"
#include "cmcmc/harness.hpp"

namespace cmcmc {
namespace {

using nlohmann::json;

void append_number(std::string& out, double value) {
  if (std::isnan(value)) {
    out += "nan";
    return;
  }
  if (std::isinf(value)) {
    out += value > 0 ? "inf" : "-inf";
    return;
  }
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  out.append(buf, ptr);
}

std::string param_label(const RunConfig& c) {
  const double value =
      c.optimizer.kind == OptimizerKind::adam ? c.optimizer.lr : c.optimizer.r;
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

// Non-finite doubles have no JSON literal.
json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

std::string output_stem(const RunConfig& c) {
  std::string stem = std::string(to_string(c.model.kind)) + "_" +
                     std::string(to_string(c.optimizer.kind)) + "_" +
                     param_label(c) + "_M" + std::to_string(c.coreset_size);
  const bool default_gate = c.optimizer.kind == OptimizerKind::hotdog;
  if (c.hot_start_enabled() != default_gate) {
    stem += c.hot_start_enabled() ? "_hs" : "_nohs";
  }
  return stem + "_seed" + std::to_string(c.seed);
}

std::string record_to_csv(const RunRecord& record) {
  std::string out = "iter,avg_sq_z,grad_norm,test_stat,hot_started,wall_ms\n";
  for (const auto& row : record.rows) {
    out += std::to_string(row.iter);
    out += ',';
    append_number(out, row.avg_sq_z);
    out += ',';
    append_number(out, row.grad_norm);
    out += ',';
    append_number(out, row.test_stat);
    out += ',';
    out += row.hot_started ? '1' : '0';
    out += ',';
    append_number(out, row.wall_ms);
    out += '\n';
  }
  return out;
}

std::string record_to_json(const RunRecord& record) {
  json j;
  j["config"] = json::parse(config_to_json(record.config));
  j["seed"] = record.config.seed;
  j["hot_start_iter"] =
      record.hot_start_iter ? json(*record.hot_start_iter) : json(nullptr);
  j["hot_start_threshold"] = record.config.hot_start_config.threshold;
  j["final_metric"] = number_or_null(record.final_metric);
  j["optimizer_steps"] = record.optimizer_steps;
  j["kernel_steps"] = record.kernel_steps;
  j["coreset_indices"] = record.coreset_indices;
  j["final_weights"] = std::vector<double>(record.final_weights.begin(),
                                           record.final_weights.end());
  if (!record.kl_trace.empty()) j["final_kl"] = number_or_null(record.kl_trace.back().second);
  j["status"] = record.ok ? "ok" : "error";
  if (!record.ok) {
    j["error_kind"] = record.error_kind;
    j["error"] = record.error;
  }
  return j.dump(2);
}

std::pair<std::filesystem::path, std::filesystem::path> emit_outputs(
    const RunRecord& record, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  const auto stem = output_stem(record.config);
  const auto csv = dir / (stem + ".csv");
  const auto sidecar = dir / (stem + ".json");
  write_file(csv, record_to_csv(record));
  write_file(sidecar, record_to_json(record));
  return {csv, sidecar};
}

std::filesystem::path resolve_output_dir(const std::string& out) {
  if (!out.empty()) return out;
  if (const char* env = std::getenv("CMCMC_OUTPUT_DIR"); env && *env) return env;
  return "runs";
}

}  // namespace cmcmc
