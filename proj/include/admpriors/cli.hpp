#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace admpriors::cli {

/// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitInconclusive = 2;
inline constexpr int kExitPostCheckFailed = 3;

/// The published run-configuration schema.
const nlohmann::json& run_config_schema();

/// Validates `doc` against a JSON Schema subset (type, enum, properties,
/// required, additionalProperties, items, min/maxItems, minLength,
/// minimum/maximum and their exclusive forms, local $ref).  Returns one
/// message per violation, each prefixed by its JSON pointer.
std::vector<std::string> validate(const nlohmann::json& doc, const nlohmann::json& schema);

struct Overrides {
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<double> residual_tol;
};

struct RunConfig {
  nlohmann::json doc;            // effective configuration after overrides
  std::filesystem::path base;    // directory that relative paths resolve against
  std::string hash;              // hash of doc.dump()
};

/// Parses and validates a configuration (throws Error(Config) listing every
/// violation before anything is computed), then applies the overrides.
RunConfig load_config(const std::string& text, const std::filesystem::path& base, const Overrides& overrides = {});
RunConfig load_config_file(const std::filesystem::path& path, const Overrides& overrides = {});

struct CommandResult {
  int exit_code = kExitOk;
  std::vector<std::filesystem::path> outputs;
  nlohmann::json summary;
};

CommandResult run_risk_map(const RunConfig& cfg);
CommandResult run_check(const RunConfig& cfg);
CommandResult run_mixture(const RunConfig& cfg);
CommandResult run_beat_uniform(const RunConfig& cfg);
CommandResult run_fk(const RunConfig& cfg);

}  // namespace admpriors::cli
