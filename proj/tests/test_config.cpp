// SPDX-License-Identifier: Apache-2.0
#include <cstdio>
#include <fstream>

#include "doctest.h"
#include "risim/config.hpp"

using namespace risim;
using nlohmann::json;

namespace {

json minimal() {
  return json::parse(R"({
    "seed": 7,
    "ris": {"mode": "active", "rows": 2, "cols": 2},
    "noise": {"sigma_z2": 1e-9}
  })");
}

std::string error_field(const json& j) {
  try {
    parse_config(j);
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "";
}

}  // namespace

TEST_CASE("minimal config") {
  const RunConfig rc = parse_config(minimal());
  CHECK(rc.scenario.seed == 7);
  CHECK(rc.scenario.ris.k_ris == 4);
  CHECK(rc.scenario.ris.mode == RisMode::active);
  CHECK(rc.scenario.noise.sigma_v2 == 1e-9);
  CHECK(rc.scenario.algorithm == Algorithm::bg);
  CHECK_FALSE(rc.map.has_value());
  CHECK_FALSE(rc.codeword.has_value());
  CHECK(rc.effective == minimal());
}

TEST_CASE("missing required fields are named") {
  for (const std::string key : {"seed", "ris", "noise"}) {
    json j = minimal();
    j.erase(key);
    CHECK(error_field(j) == key);
  }
  json j = minimal();
  j["ris"].erase("rows");
  CHECK(error_field(j) == "ris.rows");
  j = minimal();
  j["noise"].erase("sigma_z2");
  CHECK(error_field(j) == "noise.sigma_z2");
}

TEST_CASE("unknown keys and bad values are rejected") {
  json j = minimal();
  j["ris"]["rwos"] = 3;
  CHECK(error_field(j) == "ris.rwos");
  j = minimal();
  j["frobnicate"] = true;
  CHECK(error_field(j) == "frobnicate");
  j = minimal();
  j["ris"]["mode"] = "semi";
  CHECK(error_field(j) == "ris.mode");
  j = minimal();
  j["ris"]["rows"] = "two";
  CHECK(error_field(j) == "ris.rows");
  j = minimal();
  j["tx"] = {{"position", {1, 2}}};
  CHECK(error_field(j) == "tx.position");
  j = minimal();
  j["algorithm"] = {{"name", "annealing"}};
  CHECK(error_field(j) == "algorithm.name");
  j = minimal();
  j["noise"]["sigma_z2"] = -1.0;
  CHECK(error_field(j) == "noise");
  j = minimal();
  j["seed"] = -3;
  CHECK(error_field(j) == "seed");
  j = minimal();
  j["codeword"] = {0, 1, 0};
  CHECK(error_field(j) == "codeword");
  j = minimal();
  j["ofdm"] = {{"subcarriers", 4096}};
  CHECK(error_field(j) == "ofdm");
}

TEST_CASE("full config") {
  const json j = json::parse(R"({
    "seed": 3, "trials": 5,
    "tx": {"position": [0, 0, 1], "antennas": 2},
    "rx": {"position": [1, 1, 1], "antennas": 2, "axis": [0, 1, 0]},
    "ris": {"mode": "passive", "rows": 4, "cols": 4, "phase_levels": 4, "n_d": 2,
            "position": [0, 0, 1.5], "normal": [1, 0, 0]},
    "environment": {"los_blocked": false, "sm_gain_db": -3,
                    "scatterers": {"fixed": [{"position": [1, 2, 1]}, {"position": [2, 2, 1], "gain_db": 0}]}},
    "ofdm": {"subcarriers": 16, "spacing_hz": 30000},
    "noise": {"sigma_z2": 1e-8, "sigma_v2": 1e-6},
    "link": {"qam": 16, "frames": 3, "objective": "snr"},
    "algorithm": {"name": "csm", "csm_samples": 40, "csm_basis": "K_ris"},
    "gain_budget_db": 36,
    "sweep": {"kind": "efficiency", "sizes": [[2, 2]], "passive_sizes": [[8, 8]], "algorithms": ["bg", "mpc"]},
    "map": {"min": [0, 0, 1], "max": [1, 1, 1], "nx": 2, "ny": 4},
    "codeword": [0, 1, 2, 3, 0, 1, 2, 3, 0, 1, 2, 3, 0, 1, 2, 3]
  })");
  const RunConfig rc = parse_config(j);
  const ScenarioConfig& s = rc.scenario;
  CHECK(s.trials == 5);
  CHECK(s.rx.axis == Vec3::UnitY());
  CHECK(s.ris.n_d == 1);  // passive surfaces have no splitter
  CHECK(s.ris.shifter.levels == 4);
  CHECK(s.effective_noise().sigma_v2 == 0.0);
  CHECK(s.scatterers.fixed.size() == 2);
  CHECK(s.scatterers.fixed[0].gain_db == 40.0);
  CHECK(s.scatterers.fixed[1].gain_db == 0.0);
  CHECK(s.objective == ObjectiveKind::snr);
  CHECK(s.algorithm == Algorithm::csm);
  CHECK(s.csm_basis == CsmBasis::k_ris);
  CHECK(*s.gain_budget_db == 36.0);
  CHECK(rc.sweep.kind == SweepKind::efficiency);
  REQUIRE(rc.sweep.sizes.size() == 2);
  CHECK(rc.sweep.sizes[1].mode == RisMode::passive);
  CHECK(rc.sweep.algorithms == std::vector<Algorithm>{Algorithm::bg, Algorithm::mpc});
  CHECK(rc.map->grid().size() == 8);
  CHECK(rc.codeword->size() == 16);
}

TEST_CASE("overrides") {
  json j = minimal();
  apply_override(j, "seed=99");
  apply_override(j, "ris.mode=passive");
  apply_override(j, "link.qam=16");
  apply_override(j, "ris.position=[1,2,3]");
  const RunConfig rc = parse_config(j);
  CHECK(rc.scenario.seed == 99);
  CHECK(rc.scenario.ris.mode == RisMode::passive);
  CHECK(rc.scenario.qam_order == 16);
  CHECK(rc.scenario.placement.position == Vec3(1, 2, 3));
  CHECK(rc.effective["seed"] == 99);
  CHECK_THROWS_AS(apply_override(j, "noequals"), ConfigError);
  CHECK_THROWS_AS(apply_override(j, "=3"), ConfigError);
}

TEST_CASE("loading from disk") {
  const std::string path = "test_config_tmp.json";
  {
    std::ofstream out(path);
    out << minimal().dump();
  }
  const RunConfig rc = load_config(path, {"trials=2"});
  CHECK(rc.scenario.trials == 2);
  {
    std::ofstream out(path);
    out << "{ not json";
  }
  CHECK_THROWS_AS(load_config(path), ConfigError);
  std::remove(path.c_str());
  CHECK_THROWS_AS(load_config("does/not/exist.json"), std::ios_base::failure);
}
