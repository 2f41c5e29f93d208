#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

#include "json.hpp"

#include "cmcmc/errors.hpp"
#include "cmcmc/harness.hpp"

namespace cmcmc {
namespace {

using nlohmann::json;

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

double to_double(const std::string& key, std::string_view text) {
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end || text.empty()) {
    throw InvalidArgument("setting '" + key + "': expected a number, got '" +
                          std::string(text) + "'");
  }
  return value;
}

std::uint64_t to_unsigned(const std::string& key, std::string_view text) {
  std::uint64_t value = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end || text.empty()) {
    throw InvalidArgument("setting '" + key +
                          "': expected a nonnegative integer, got '" +
                          std::string(text) + "'");
  }
  return value;
}

bool to_bool(const std::string& key, std::string_view text) {
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  throw InvalidArgument("setting '" + key + "': expected a boolean, got '" +
                        std::string(text) + "'");
}

std::string shortest(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

}  // namespace

bool RunConfig::hot_start_enabled() const {
  return hot_start.value_or(optimizer.kind == OptimizerKind::hotdog);
}

std::size_t RunConfig::effective_subsample_size() const {
  return subsample_size == 0 ? coreset_size : subsample_size;
}

void RunConfig::validate() const {
  if (chains < 2) throw InvalidArgument("need at least K = 2 chains");
  if (iters < 1) throw InvalidArgument("need at least one iteration");
  if (coreset_size < 1) throw InvalidArgument("coreset size must be positive");
  if (metric_stride < 1) throw InvalidArgument("metric stride must be positive");
  if (!(hot_start_config.threshold > 0.0)) {
    throw InvalidArgument("hot-start threshold must be positive");
  }
  if (hot_start_config.min_iters < 9) {
    throw InvalidArgument("hot-start min_iters must be at least 9");
  }
  if (optimizer.kind == OptimizerKind::adam && !(optimizer.lr > 0.0)) {
    throw InvalidArgument("ADAM learning rate must be positive");
  }
  if (!(optimizer.r > 0.0)) throw InvalidArgument("r must be positive");
  if (!(optimizer.beta1 >= 0.0 && optimizer.beta1 < 1.0) ||
      !(optimizer.beta2 >= 0.0 && optimizer.beta2 < 1.0)) {
    throw InvalidArgument("decay rates must lie in [0, 1)");
  }
  if (!(optimizer.eps > 0.0)) throw InvalidArgument("eps must be positive");
}

void apply_setting(RunConfig& c, const std::string& key,
                   const std::string& raw) {
  const auto value = std::string(trim(raw));
  if (key == "model") {
    c.model.kind = parse_model_kind(value);
  } else if (key == "dataset") {
    c.dataset = value;
  } else if (key == "response_column") {
    c.response_column = value;
  } else if (key == "n") {
    c.synthetic.n = to_unsigned(key, value);
  } else if (key == "dim") {
    c.synthetic.dim = to_unsigned(key, value);
  } else if (key == "noise_sd") {
    c.synthetic.noise_sd = to_double(key, value);
  } else if (key == "data_seed") {
    c.data_seed = to_unsigned(key, value);
  } else if (key == "coreset_size") {
    c.coreset_size = to_unsigned(key, value);
  } else if (key == "chains") {
    c.chains = to_unsigned(key, value);
  } else if (key == "subsample_size") {
    c.subsample_size = to_unsigned(key, value);
  } else if (key == "balance") {
    c.balance = to_bool(key, value);
  } else if (key == "optimizer") {
    c.optimizer.kind = parse_optimizer_kind(value);
  } else if (key == "lr") {
    c.optimizer.lr = to_double(key, value);
  } else if (key == "r") {
    c.optimizer.r = to_double(key, value);
  } else if (key == "beta1") {
    c.optimizer.beta1 = to_double(key, value);
  } else if (key == "beta2") {
    c.optimizer.beta2 = to_double(key, value);
  } else if (key == "eps") {
    c.optimizer.eps = to_double(key, value);
  } else if (key == "hot_start") {
    if (value == "auto") {
      c.hot_start.reset();
    } else {
      c.hot_start = to_bool(key, value);
    }
  } else if (key == "hot_start_threshold") {
    c.hot_start_config.threshold = to_double(key, value);
  } else if (key == "hot_start_min_iters") {
    c.hot_start_config.min_iters = to_unsigned(key, value);
  } else if (key == "iters") {
    c.iters = to_unsigned(key, value);
  } else if (key == "seed") {
    c.seed = to_unsigned(key, value);
  } else if (key == "metric_stride") {
    c.metric_stride = to_unsigned(key, value);
  } else if (key == "out") {
    c.out = value;
  } else if (key == "init_offset") {
    c.init_offset = to_double(key, value);
  } else if (key == "slice_width") {
    c.slice.initial_width = to_double(key, value);
  } else if (key == "slice_max_doublings") {
    c.slice.max_doublings = static_cast<int>(to_unsigned(key, value));
  } else if (key == "reference_path") {
    c.reference_path = value;
  } else if (key == "reference_iters") {
    c.reference_iters = to_unsigned(key, value);
  } else if (key == "record_wall_time") {
    c.record_wall_time = to_bool(key, value);
  } else if (key == "sparse_nu") {
    c.model.sparse.nu = to_double(key, value);
  } else if (key == "sparse_lambda") {
    c.model.sparse.lambda = to_double(key, value);
  } else if (key == "sparse_q") {
    c.model.sparse.q = to_double(key, value);
  } else if (key == "sparse_tau") {
    c.model.sparse.tau = to_double(key, value);
  } else if (key == "sparse_c") {
    c.model.sparse.c = to_double(key, value);
  } else {
    throw InvalidArgument("unknown setting '" + key + "'");
  }
}

RunConfig parse_config_text(const std::string& text, RunConfig base) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto view = std::string_view(line);
    if (const auto hash = view.find('#'); hash != std::string_view::npos) {
      view = view.substr(0, hash);
    }
    view = trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw InvalidArgument("config line " + std::to_string(line_no) +
                            ": expected key = value");
    }
    apply_setting(base, std::string(trim(view.substr(0, eq))),
                  std::string(trim(view.substr(eq + 1))));
  }
  return base;
}

RunConfig read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

std::string config_to_json(const RunConfig& c) {
  json j;
  j["model"] = std::string(to_string(c.model.kind));
  j["dataset"] = c.dataset;
  j["response_column"] = c.response_column;
  j["n"] = c.synthetic.n;
  j["dim"] = c.synthetic.dim;
  j["noise_sd"] = c.synthetic.noise_sd;
  j["data_seed"] = c.data_seed;
  j["coreset_size"] = c.coreset_size;
  j["chains"] = c.chains;
  j["subsample_size"] = c.subsample_size;
  j["balance"] = c.balance;
  j["optimizer"] = std::string(to_string(c.optimizer.kind));
  j["lr"] = c.optimizer.lr;
  j["r"] = c.optimizer.r;
  j["beta1"] = c.optimizer.beta1;
  j["beta2"] = c.optimizer.beta2;
  j["eps"] = c.optimizer.eps;
  j["hot_start"] = c.hot_start ? json(*c.hot_start) : json("auto");
  j["hot_start_threshold"] = c.hot_start_config.threshold;
  j["hot_start_min_iters"] = c.hot_start_config.min_iters;
  j["iters"] = c.iters;
  j["seed"] = c.seed;
  j["metric_stride"] = c.metric_stride;
  j["out"] = c.out;
  j["init_offset"] = c.init_offset;
  j["slice_width"] = c.slice.initial_width;
  j["slice_max_doublings"] = c.slice.max_doublings;
  j["reference_path"] = c.reference_path;
  j["reference_iters"] = c.reference_iters;
  j["record_wall_time"] = c.record_wall_time;
  j["sparse_nu"] = c.model.sparse.nu;
  j["sparse_lambda"] = c.model.sparse.lambda;
  j["sparse_q"] = c.model.sparse.q;
  j["sparse_tau"] = c.model.sparse.tau;
  j["sparse_c"] = c.model.sparse.c;
  return j.dump(2);
}

namespace {

RunConfig config_from_object(const json& obj) {
  RunConfig c;
  for (const auto& [key, value] : obj.items()) {
    std::string text;
    if (value.is_string()) {
      text = value.get<std::string>();
    } else if (value.is_boolean()) {
      text = value.get<bool>() ? "true" : "false";
    } else if (value.is_number_unsigned()) {
      text = std::to_string(value.get<std::uint64_t>());
    } else if (value.is_number_integer()) {
      text = std::to_string(value.get<std::int64_t>());
    } else if (value.is_number_float()) {
      text = shortest(value.get<double>());
    } else {
      throw InvalidArgument("config key '" + key + "' has an unsupported type");
    }
    apply_setting(c, key, text);
  }
  return c;
}

}  // namespace

RunConfig config_from_json(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("invalid JSON: ") + e.what());
  }
  // Accept either a bare config object or a run sidecar.
  if (j.contains("config") && j["config"].is_object()) {
    return config_from_object(j["config"]);
  }
  return config_from_object(j);
}

std::string reference_to_json(const ReferencePosterior& ref) {
  json j;
  j["mu"] = std::vector<double>(ref.mu.begin(), ref.mu.end());
  j["sigma"] = std::vector<double>(ref.sigma.begin(), ref.sigma.end());
  return j.dump(2);
}

ReferencePosterior reference_from_json(const std::string& json_text) {
  try {
    const auto j = json::parse(json_text);
    const auto mu = j.at("mu").get<std::vector<double>>();
    const auto sigma = j.at("sigma").get<std::vector<double>>();
    ReferencePosterior ref;
    ref.mu = Eigen::Map<const Vector>(mu.data(), static_cast<Eigen::Index>(mu.size()));
    ref.sigma = Eigen::Map<const Vector>(sigma.data(),
                                         static_cast<Eigen::Index>(sigma.size()));
    ref.validate();
    return ref;
  } catch (const json::exception& e) {
    throw InvalidReference(std::string("invalid reference JSON: ") + e.what());
  }
}

}  // namespace cmcmc
