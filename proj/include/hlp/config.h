#ifndef HLP_CONFIG_H_
#define HLP_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <optional>

#include <json.hpp>

#include "hlp/demos.h"
#include "hlp/experiments.h"
#include "hlp/planner.h"
#include "hlp/sto.h"

namespace hlp {

struct RunPaths {
  std::filesystem::path models;
  std::filesystem::path scenes;
  std::filesystem::path demos;
  std::filesystem::path output;
};

// Everything a CLI run can be configured with. The arm parameters and the
// planner's alpha / n_lines are the knobs of the feature normalisation.
struct RunConfig {
  std::optional<std::uint64_t> seed;
  RunPaths paths;
  PlannerConfig planner;
  STOConfig sto;
  TrainConfig train;
  PolicyParams policy;
};

// Document: {"format": "hlp-run-config", "version": 1, ...}. Absent fields keep
// their defaults; unknown fields and a wrong version are rejected with
// kSchemaError / kFormatVersion.
RunConfig run_config_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const RunConfig& cfg);
RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace hlp

#endif  // HLP_CONFIG_H_
