// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "risim/harness.hpp"

namespace risim {

/// Schema violation. `field` is the dotted path of the offending key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

enum class SweepKind { gain_size, efficiency };

struct SweepSpec {
  SweepKind kind = SweepKind::gain_size;
  std::vector<ArraySize> sizes{{2, 2, RisMode::active}, {4, 4, RisMode::active},
                               {8, 8, RisMode::active}, {16, 16, RisMode::active}};
  std::vector<double> gains_db{6.0, 12.0, 18.0, 24.0};
  std::vector<Algorithm> algorithms{Algorithm::bg, Algorithm::csm, Algorithm::mpc};
};

struct MapSpec {
  Vec3 min = Vec3(0.5, 0.5, 1.0);
  Vec3 max = Vec3(2.5, 2.5, 1.0);
  int nx = 3;
  int ny = 3;

  std::vector<Vec3> grid() const { return make_grid(min, max, nx, ny); }
};

struct RunConfig {
  ScenarioConfig scenario;
  SweepSpec sweep;
  std::optional<MapSpec> map;  ///< also the sweep's test area when set
  std::optional<PhaseCodeword> codeword;
  nlohmann::json effective;  ///< config after overrides, echoed to manifests
};

/// Validate `j` against the schema and build a RunConfig. Unknown keys are
/// rejected. Throws ConfigError.
RunConfig parse_config(const nlohmann::json& j);

/// Apply `key.path=value` overrides. The value is parsed as JSON when it
/// parses, else taken as a string.
void apply_override(nlohmann::json& j, const std::string& assignment);

/// Read a JSON file, apply overrides, parse.
RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides = {});

}  // namespace risim
