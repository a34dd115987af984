#include "homolab/config_io.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace homolab {

namespace {

using nlohmann::json;

std::size_t line_of(const YAML::Node& node) {
  const YAML::Mark mark = node.Mark();
  return mark.is_null() ? 1 : static_cast<std::size_t>(mark.line) + 1;
}

class Reader {
 public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const YAML::Node& at, const std::string& message) const {
    throw ConfigError(source_, line_of(at), message);
  }

  double number(const YAML::Node& node, const std::string& what) const {
    if (!node.IsScalar()) fail(node, what + " must be a number");
    double value = 0.0;
    try {
      value = node.as<double>();
    } catch (const YAML::Exception&) {
      fail(node, what + " must be a number, got '" + node.Scalar() + "'");
    }
    if (!std::isfinite(value)) fail(node, what + " must be finite");
    return value;
  }

  double positive(const YAML::Node& node, const std::string& what) const {
    const double value = number(node, what);
    if (!(value > 0.0)) fail(node, what + " must be positive");
    return value;
  }

  std::size_t count(const YAML::Node& node, const std::string& what) const {
    if (!node.IsScalar()) fail(node, what + " must be an integer");
    long long value = 0;
    try {
      value = node.as<long long>();
    } catch (const YAML::Exception&) {
      fail(node, what + " must be an integer, got '" + node.Scalar() + "'");
    }
    if (value < 1) fail(node, what + " must be at least 1");
    return static_cast<std::size_t>(value);
  }

  std::vector<double> vectors(const YAML::Node& node, const std::string& what, std::size_t n, std::size_t dim) const {
    if (!node.IsSequence()) fail(node, what + " must be an array of " + std::to_string(n) + " arrays");
    if (node.size() != n) {
      fail(node, what + " has " + std::to_string(node.size()) + " entries but there are " + std::to_string(n) +
                     " masses");
    }
    std::vector<double> out;
    out.reserve(n * dim);
    for (std::size_t k = 0; k < n; ++k) {
      const YAML::Node row = node[k];
      const std::string label = what + "[" + std::to_string(k) + "]";
      if (!row.IsSequence()) fail(row, label + " must be an array of " + std::to_string(dim) + " numbers");
      if (row.size() != dim) {
        fail(row, label + " has " + std::to_string(row.size()) + " components but dim is " + std::to_string(dim));
      }
      for (std::size_t c = 0; c < dim; ++c) out.push_back(number(row[c], label + "[" + std::to_string(c) + "]"));
    }
    return out;
  }

 private:
  std::string source_;
};

const std::set<std::string> kTopLevelKeys = {"alpha",  "dim",  "masses",        "positions",  "velocities", "integrator",
                                             "t",      "type", "lambda",        "residual_norm", "iterations"};
const std::set<std::string> kIntegratorKeys = {"rel_tol", "abs_tol", "sample_dt", "max_step"};

}  // namespace

ConfigError::ConfigError(const std::string& source, std::size_t line, const std::string& message)
    : std::runtime_error(source + ":" + std::to_string(line) + ": " + message), line_(line) {}

SystemConfig parse_system_config(std::string_view text, const std::string& source) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::ParserException& e) {
    throw ConfigError(source, static_cast<std::size_t>(e.mark.line) + 1, e.msg);
  }
  const Reader read(source);
  if (!root.IsMap()) read.fail(root, "configuration must be a mapping of keys to values");

  for (const auto& entry : root) {
    const std::string key = entry.first.as<std::string>();
    if (!kTopLevelKeys.contains(key)) read.fail(entry.first, "unknown key '" + key + "'");
  }
  for (const char* key : {"alpha", "dim", "masses"}) {
    if (!root[key]) read.fail(root, std::string("missing required key '") + key + "'");
  }

  const double alpha = read.positive(root["alpha"], "alpha");
  const std::size_t dim = read.count(root["dim"], "dim");
  const YAML::Node masses_node = root["masses"];
  if (!masses_node.IsSequence()) read.fail(masses_node, "masses must be an array of numbers");
  if (masses_node.size() < 2) read.fail(masses_node, "masses must list at least two bodies");
  std::vector<double> masses;
  for (std::size_t k = 0; k < masses_node.size(); ++k) {
    masses.push_back(read.positive(masses_node[k], "masses[" + std::to_string(k) + "]"));
  }
  const std::size_t n = masses.size();

  SystemConfig config{.system = BodySystem(std::move(masses), alpha, dim)};

  const double t0 = root["t"] ? read.number(root["t"], "t") : 0.0;
  if (root["positions"]) {
    std::vector<double> q = read.vectors(root["positions"], "positions", n, dim);
    std::vector<double> v(q.size(), 0.0);
    if (root["velocities"]) v = read.vectors(root["velocities"], "velocities", n, dim);
    config.state = PhaseState(t0, dim, std::move(q), std::move(v));
  } else if (root["velocities"]) {
    read.fail(root["velocities"], "velocities given without positions");
  }

  if (const YAML::Node block = root["integrator"]) {
    if (!block.IsMap()) read.fail(block, "integrator must be a mapping");
    for (const auto& entry : block) {
      const std::string key = entry.first.as<std::string>();
      if (!kIntegratorKeys.contains(key)) read.fail(entry.first, "unknown integrator key '" + key + "'");
    }
    if (block["rel_tol"]) config.integrator.rel_tol = read.positive(block["rel_tol"], "integrator.rel_tol");
    if (block["abs_tol"]) config.integrator.abs_tol = read.positive(block["abs_tol"], "integrator.abs_tol");
    if (block["sample_dt"]) config.integrator.sample_dt = read.positive(block["sample_dt"], "integrator.sample_dt");
    if (block["max_step"]) config.integrator.max_step = read.positive(block["max_step"], "integrator.max_step");
  }

  if (const YAML::Node lambda = root["lambda"]) {
    if (!config.state) read.fail(root, "a central configuration needs positions");
    if (dim != 2) read.fail(root["dim"], "central configurations are planar (dim must be 2)");
    CentralConfiguration cc{.system = config.system, .positions = config.state->positions};
    cc.lambda = read.positive(lambda, "lambda");
    cc.residual_norm = root["residual_norm"] ? read.number(root["residual_norm"], "residual_norm")
                                             : cc_residual(config.system, cc.positions).norm;
    if (root["iterations"]) cc.iterations = static_cast<std::size_t>(read.number(root["iterations"], "iterations"));
    config.central_configuration = std::move(cc);
  }
  return config;
}

SystemConfig load_system_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), 0, "cannot open file");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_system_config(buffer.str(), path.string());
}

namespace {

json rows(std::span<const double> flat, std::size_t dim) {
  json out = json::array();
  for (std::size_t k = 0; k < flat.size() / dim; ++k) {
    out.push_back(std::vector<double>(flat.begin() + static_cast<std::ptrdiff_t>(k * dim),
                                      flat.begin() + static_cast<std::ptrdiff_t>((k + 1) * dim)));
  }
  return out;
}

json system_json(const BodySystem& system) {
  json doc;
  doc["alpha"] = system.alpha();
  doc["dim"] = system.dim();
  doc["masses"] = std::vector<double>(system.masses().begin(), system.masses().end());
  return doc;
}

}  // namespace

std::string central_config_to_json(const CentralConfiguration& cc) {
  json doc = system_json(cc.system);
  doc["type"] = "central_configuration";
  doc["positions"] = rows(cc.positions, cc.system.dim());
  doc["lambda"] = cc.lambda;
  doc["residual_norm"] = cc.residual_norm;
  doc["iterations"] = cc.iterations;
  return doc.dump(2) + "\n";
}

std::string system_config_to_json(const BodySystem& system, const PhaseState& state) {
  json doc = system_json(system);
  if (state.t != 0.0) doc["t"] = state.t;
  doc["positions"] = rows(state.positions, state.dim);
  doc["velocities"] = rows(state.velocities, state.dim);
  return doc.dump(2) + "\n";
}

}  // namespace homolab
