#include "sifrian/config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "sifrian/errors.hpp"

namespace sifrian {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used == v.size()) return d;
  } catch (const std::exception&) {
  }
  throw ConfigError(key + ": '" + v + "' is not a number");
}

std::uint64_t to_uint(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    if (!v.empty() && v[0] != '-') {
      const unsigned long long u = std::stoull(v, &used);
      if (used == v.size()) return u;
    }
  } catch (const std::exception&) {
  }
  throw ConfigError(key + ": '" + v + "' is not a non-negative integer");
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError(key + ": '" + v + "' is not a boolean");
}

}  // namespace

RegSchedule RunConfig::fixed_schedule() const {
  RegSchedule s;
  const std::size_t hidden = layers() - 1;
  s.lambdas = lambdas.size() == 1 ? std::vector<double>(hidden, lambdas[0]) : lambdas;
  s.lambda_out = lambda_out;
  s.mu = mu;
  s.mode = LambdaMode::fixed;
  return s;
}

StepOptions RunConfig::step_options() const {
  StepOptions o;
  o.kind = optimizer;
  o.mode = lambda_mode;
  o.fixed = fixed_schedule();
  o.lr = lr;
  o.step_scale = step_scale;
  return o;
}

std::filesystem::path RunConfig::resolve(const std::filesystem::path& p) const {
  return p.is_absolute() ? p : data_dir / p;
}

void RunConfig::validate() const {
  if (sizes.size() < 2) throw ConfigError("sizes needs at least two entries");
  for (std::size_t s : sizes)
    if (s == 0) throw ConfigError("sizes entries must be positive");
  if (optimizer != DirectionKind::sgd &&
      activation.kind != ActivationKind::leaky_relu)
    throw ConfigError(to_string(optimizer) + " needs the leaky-relu activation, got " +
                      activation.name());
  if (optimizer != DirectionKind::sgd && lambda_mode == LambdaMode::fixed) {
    const std::size_t hidden = layers() - 1;
    if (lambdas.size() != 1 && lambdas.size() != hidden)
      throw ConfigError("lambdas has " + std::to_string(lambdas.size()) +
                        " entries, expected 1 or " + std::to_string(hidden));
    for (double l : lambdas)
      if (!(l > 0.0)) throw ConfigError("fixed lambdas must be positive");
    if (!(lambda_out > 0.0)) throw ConfigError("lambda_out must be positive");
  }
  if (!(mu >= 0.0)) throw ConfigError("mu must be >= 0");
  if (!(lr > 0.0)) throw ConfigError("lr must be positive");
  if (!(step_scale > 0.0)) throw ConfigError("step_scale must be positive");
}

void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value) {
  const std::string& v = value;
  if (key == "sizes") {
    cfg.sizes.clear();
    for (const auto& s : split_list(v)) cfg.sizes.push_back(to_uint(key, s));
  } else if (key == "activation") {
    cfg.activation = Activation::parse(v, cfg.activation.slope > 0 ? cfg.activation.slope : 0.01);
  } else if (key == "slope") {
    const double slope = to_double(key, v);
    cfg.activation = cfg.activation.kind == ActivationKind::leaky_relu
                         ? Activation::leaky_relu(slope)
                         : Activation{cfg.activation.kind, slope};
  } else if (key == "optimizer") {
    cfg.optimizer = parse_direction_kind(v);
  } else if (key == "lambda_mode") {
    if (v == "spectral" || v == "spectral-adaptive") cfg.lambda_mode = LambdaMode::spectral_adaptive;
    else if (v == "fixed") cfg.lambda_mode = LambdaMode::fixed;
    else throw ConfigError("lambda_mode: expected fixed or spectral, got '" + v + "'");
  } else if (key == "lambdas") {
    cfg.lambdas.clear();
    for (const auto& s : split_list(v)) cfg.lambdas.push_back(to_double(key, s));
  } else if (key == "lambda_out") {
    cfg.lambda_out = to_double(key, v);
  } else if (key == "mu") {
    cfg.mu = to_double(key, v);
  } else if (key == "lr") {
    cfg.lr = to_double(key, v);
  } else if (key == "step_scale") {
    cfg.step_scale = to_double(key, v);
  } else if (key == "epochs") {
    cfg.epochs = to_uint(key, v);
  } else if (key == "seed") {
    cfg.seed = to_uint(key, v);
  } else if (key == "white_layer") {
    cfg.white_layer = to_bool(key, v);
  } else if (key == "data_dir") {
    cfg.data_dir = v;
  } else if (key == "train_images") {
    cfg.train_images = v;
  } else if (key == "train_labels") {
    cfg.train_labels = v;
  } else if (key == "test_images") {
    cfg.test_images = v;
  } else if (key == "test_labels") {
    cfg.test_labels = v;
  } else if (key == "train_subset") {
    cfg.train_subset = to_uint(key, v);
  } else if (key == "test_subset") {
    cfg.test_subset = to_uint(key, v);
  } else if (key == "metrics") {
    cfg.metrics = v;
  } else if (key == "params_out") {
    cfg.params_out = v;
  } else if (key == "plot_script") {
    if (v.empty()) cfg.plot_script.reset();
    else cfg.plot_script = v;
  } else if (key == "record_wall_time") {
    cfg.record_wall_time = to_bool(key, v);
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

void apply_override(RunConfig& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos)
    throw ConfigError("override '" + assignment + "' is not key=value");
  apply_setting(cfg, trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::set<std::string> seen;
  std::stringstream ss(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const std::string t = trim(line.substr(0, line.find('#')));
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(t.substr(0, eq));
    if (!seen.insert(key).second)
      throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    try {
      apply_setting(cfg, key, trim(t.substr(eq + 1)));
    } catch (const Error& e) {
      throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path,
                      const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  RunConfig cfg = parse_config(buf.str());
  if (!path.parent_path().empty() && cfg.data_dir.is_relative())
    cfg.data_dir = path.parent_path() / cfg.data_dir;
  apply_environment(cfg);
  for (const auto& o : overrides) apply_override(cfg, o);
  cfg.validate();
  return cfg;
}

void apply_environment(RunConfig& cfg) {
  if (const char* dir = std::getenv(kDataDirEnv); dir && *dir) cfg.data_dir = dir;
}

}  // namespace sifrian
