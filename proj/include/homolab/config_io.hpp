#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "homolab/central_config.hpp"
#include "homolab/integrator.hpp"
#include "homolab/types.hpp"

namespace homolab {

/// Schema or syntax problem in a configuration document. what() reads
/// "<source>:<line>: <message>".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& source, std::size_t line, const std::string& message);

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A parsed system configuration. JSON documents are accepted as well as
/// block-style YAML; see schema/system-config.schema.json.
struct SystemConfig {
  BodySystem system;
  std::optional<PhaseState> state;
  IntegratorSpec integrator;
  /// Present when the document is a certified central configuration
  /// (it carries a "lambda" key).
  std::optional<CentralConfiguration> central_configuration;
};

SystemConfig parse_system_config(std::string_view text, const std::string& source = "<input>");
SystemConfig load_system_config(const std::filesystem::path& path);

/// Pretty-printed JSON documents that parse back through parse_system_config
/// to bit-identical values.
std::string central_config_to_json(const CentralConfiguration& cc);
std::string system_config_to_json(const BodySystem& system, const PhaseState& state);

}  // namespace homolab
