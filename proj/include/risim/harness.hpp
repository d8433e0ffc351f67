// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "risim/channel.hpp"
#include "risim/control.hpp"
#include "risim/link.hpp"
#include "risim/ris_model.hpp"

namespace risim {

enum class Algorithm { none, bg, csm, mpc, exhaustive };

std::string to_string(Algorithm a);
Algorithm parse_algorithm(const std::string& s);

struct LinearArraySpec {
  Vec3 position = Vec3::Zero();
  int antennas = 4;
  Vec3 axis = Vec3::UnitX();
};

struct ScattererSpec {
  int count = 8;  ///< drawn per trial inside [region_min, region_max] when `fixed` is empty
  /// Added to the product of the two hop Friis gains. About +40 dB makes a
  /// reflector at a few metres behave like a specular wall.
  double gain_db = 40.0;
  Vec3 region_min = Vec3(-3.0, 0.5, 0.0);
  Vec3 region_max = Vec3(3.0, 5.0, 2.5);
  std::vector<Scatterer> fixed;
};

/// Surface placement: rows stack along +z, columns run along normal x z.
struct RisPlacement {
  Vec3 position = Vec3(0.0, 0.0, 1.0);
  Vec3 normal = Vec3::UnitY();
  int rows = 4;
  int cols = 4;
};

struct CodebookSpec {
  double radius_m = 2.0;
  double step_deg = 5.0;
  std::string path;  ///< optional codebook file for mpc
};

/// Everything that defines one experiment. Plain data; see config.hpp for
/// the JSON schema.
struct ScenarioConfig {
  // Surface 2 m from the transmitter and 1.5 m from the receiver.
  LinearArraySpec tx{Vec3(-1.5, 1.3229, 1.0), 4, Vec3::UnitX()};
  LinearArraySpec rx{Vec3(1.2, 0.9, 1.0), 4, Vec3::UnitX()};
  RisPlacement placement;
  bool los_blocked = true;
  ScattererSpec scatterers;
  double sm_gain_db = -6.0;

  RisArrayConfig ris;  ///< k_ris is kept equal to rows * cols
  FrequencyGrid ofdm;
  NoiseSpec noise{1e-9, 1e-9};
  int qam_order = 64;
  int n_frames = 16;
  ObjectiveKind objective = ObjectiveKind::capacity;

  Algorithm algorithm = Algorithm::bg;
  int rms_samples = 0;  ///< 0: max(16, K)
  int csm_samples = 0;  ///< 0: 8 x basis
  CsmBasis csm_basis = CsmBasis::k;
  CodebookSpec codebook;

  std::uint64_t seed = 1;
  int trials = 20;
  std::optional<double> gain_budget_db;
  bool baseline_includes_sm = true;
  bool no_ris = false;

  /// Re-derive k_ris from the placement and check every invariant.
  void normalize();
  /// `noise` with sigma_v2 zeroed for passive surfaces, which add no noise.
  NoiseSpec effective_noise() const;
  LinkSettings link_settings(std::uint64_t seed) const;
};

/// Seed of the channel realization at grid position `position`, trial `trial`.
std::uint64_t realization_seed(std::uint64_t master, std::uint64_t position, std::uint64_t trial);

/// Geometry of one realization; scatterers drawn from `rng` when not fixed.
ScenarioGeometry build_scenario(const ScenarioConfig& cfg, Rng& rng,
                                const std::optional<Vec3>& rx_position = std::nullopt);

/// Channel set of the realization seeded by `channel_seed`.
ChannelSet build_channels(const ScenarioConfig& cfg, std::uint64_t channel_seed,
                          const std::optional<Vec3>& rx_position = std::nullopt);

/// Free-space SISO channel with the receiver on the codebook half circle.
ChannelSet build_codebook_channel(const ScenarioConfig& cfg, double angle_deg);

Codebook build_codebook(const ScenarioConfig& cfg);

/// Runs cfg.algorithm against `oracle`. `codebook` is required for mpc.
OptimizationResult run_algorithm(const ScenarioConfig& cfg, ProbeOracle& oracle, Rng& rng,
                                 const Codebook* codebook);

/// Probe count the configured algorithm will spend.
std::uint64_t expected_probes(const ScenarioConfig& cfg, std::size_t codebook_size = 37);

struct StateDiff {
  double capacity = 0.0;  ///< best - worst
  double snr_db = 0.0;    ///< best - worst
  double uncoded_ber = 0.0;  ///< worst - best
};

struct StateReport {
  LinkMetrics without_ris;
  LinkMetrics initial;
  LinkMetrics best;
  LinkMetrics worst;
  StateDiff diff;
  std::uint64_t probes = 0;
};

struct StateStudy {
  StateReport report;
  OptimizationResult optimization;
};

/// Baseline, initial, best and worst states of one optimization run on the
/// realization for `trial`.
StateStudy run_state_study(const ScenarioConfig& cfg, int trial = 0,
                           const Codebook* codebook = nullptr);

struct IcdfStat {
  double level = 0.68;
  double value = 0.0;
};

/// Largest sample value met or exceeded by at least `level` of the samples.
IcdfStat icdf(std::vector<double> samples, double level = 0.68);

double median(std::vector<double> samples);

struct ResultRecord {
  std::string scenario_id;
  std::uint64_t seed = 0;
  Algorithm algorithm = Algorithm::bg;
  std::uint64_t probes = 0;
  LinkMetrics metrics;
  double capacity_increase = 0.0;
  double power_mw = 0.0;
};

/// Optimize one realization and compare against the surface-free baseline.
ResultRecord evaluate_realization(const ScenarioConfig& cfg, std::uint64_t channel_seed,
                                  const std::optional<Vec3>& rx_position,
                                  const Codebook* codebook, const std::string& id);

/// Regular grid on the plane z = z, inclusive of both ends.
std::vector<Vec3> make_grid(const Vec3& lo, const Vec3& hi, int nx, int ny);

/// Per-position increase records, trial 0 per position.
std::vector<ResultRecord> capacity_increase_map(const ScenarioConfig& cfg,
                                                const std::vector<Vec3>& rx_grid,
                                                int threads = 1);

struct ArraySize {
  int rows = 2;
  int cols = 2;
  RisMode mode = RisMode::active;
};

struct SweepCell {
  ArraySize size;
  double gain_db = 0.0;
  Algorithm algorithm = Algorithm::bg;
  std::uint64_t probes = 0;
  double icdf_delta_c = 0.0;
  double mean_capacity = 0.0;
  double power_mw = 0.0;
  std::vector<ResultRecord> samples;
};

/// Configuration for one cell: placement resized, gain applied, passive
/// cells forced to unit reflection (and, via effective_noise, no surface noise).
ScenarioConfig cell_config(const ScenarioConfig& base, const ArraySize& size, double gain_db);

/// ICDF-68 capacity increase for every (size, gain). Samples are trials x
/// positions; passive sizes produce one cell regardless of `gains_db`.
std::vector<SweepCell> gain_size_sweep(const ScenarioConfig& cfg, const std::vector<ArraySize>& sizes,
                                       const std::vector<double>& gains_db,
                                       const std::vector<Vec3>& rx_grid, int threads = 1);

/// Probe count and ICDF-68 increase per (algorithm, size) on shared
/// realizations. Active gains follow cfg.gain_budget_db when set.
std::vector<SweepCell> algorithm_efficiency(const ScenarioConfig& cfg,
                                            const std::vector<Algorithm>& algorithms,
                                            const std::vector<ArraySize>& sizes,
                                            const std::vector<Vec3>& rx_grid, int threads = 1);

/// Run fn(i) for i in [0, n) on up to `threads` workers. Results must be
/// written by index; completion order is unspecified.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace risim
