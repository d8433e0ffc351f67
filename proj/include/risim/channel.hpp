// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <vector>

#include "risim/random.hpp"
#include "risim/ris_model.hpp"
#include "risim/types.hpp"

namespace risim {

/// Isotropic antenna array. Steering phases are taken relative to the
/// element centroid.
struct ArrayGeometry {
  std::vector<Vec3> element_positions;
  double carrier_freq = 3.5e9;
  Vec3 orientation = Vec3::UnitY();  ///< boresight

  Eigen::Index size() const { return static_cast<Eigen::Index>(element_positions.size()); }
  Vec3 centroid() const;
};

inline double wavelength(double freq) { return kSpeedOfLight / freq; }

/// `n` elements spaced `spacing` apart along `axis`, centred on `center`.
ArrayGeometry make_linear_array(int n, double spacing, const Vec3& center, const Vec3& axis,
                                double carrier_freq = 3.5e9);

/// rows x cols grid spanning `row_axis` and `col_axis`, centred on `center`.
/// Element (r, c) is stored at index r * cols + c.
ArrayGeometry make_planar_array(int rows, int cols, double spacing, const Vec3& center,
                                const Vec3& row_axis, const Vec3& col_axis,
                                double carrier_freq = 3.5e9);

struct Scatterer {
  Vec3 position = Vec3::Zero();
  double gain_db = 40.0;
};

struct ScenarioGeometry {
  ArrayGeometry tx;
  ArrayGeometry rx;
  ArrayGeometry ris_r;  ///< K_ris receive antennas
  ArrayGeometry ris_t;  ///< K transmit antennas
  bool los_blocked = false;
  std::vector<Scatterer> scatterers;
  double sm_gain_db = -6.0;
};

/// One ray. `aod` is the unit propagation direction leaving the first
/// array; `aoa` the unit propagation direction arriving at the second.
struct PathComponent {
  Complex complex_gain;
  double delay = 0.0;
  Vec3 aod = Vec3::UnitX();
  Vec3 aoa = Vec3::UnitX();
};

using PathList = std::vector<PathComponent>;

struct ScenarioPaths {
  PathList direct;      ///< tx -> rx, not touching the surface
  PathList tx_to_ris;   ///< tx -> receive elements
  PathList ris_to_rx;   ///< transmit elements -> rx
  PathList structural;  ///< tx -> surface plate -> rx
};

struct FrequencyGrid {
  int n_sc = 64;
  double scs = 60e3;
  double center = 3.5e9;
  double max_bandwidth = 100e6;

  void validate() const;
  /// Baseband offset of subcarrier i from the centre frequency.
  double offset(int i) const { return (i - 0.5 * (n_sc - 1)) * scs; }
};

/// Per-subcarrier matrices of the three path classes.
///
/// los holds every ray that does not touch the surface, so it is zero
/// only for a blocked LoS without scatterers.
struct ChannelSet {
  std::vector<Cmat> los;   ///< N_r x N_t
  std::vector<Cmat> sm;    ///< N_r x N_t
  std::vector<Cmat> am_r;  ///< N_r x K
  std::vector<Cmat> am_t;  ///< K_ris x N_t
  int n_d = 1;

  int n_subcarriers() const { return static_cast<int>(los.size()); }
  Eigen::Index n_r() const { return los.front().rows(); }
  Eigen::Index n_t() const { return los.front().cols(); }
  Eigen::Index k() const { return am_r.front().cols(); }
  Eigen::Index k_ris() const { return am_t.front().rows(); }

  void validate() const;
};

Cvec steering_vector(const ArrayGeometry& array, const Vec3& direction, double freq);

/// Free-space amplitude lambda / (4 pi d).
double friis_gain(double distance, double freq);

/// Rays for every link of the scenario. Scatterer reflections get a
/// uniform random phase from `rng`.
ScenarioPaths generate_paths(const ScenarioGeometry& scenario, Rng& rng);

/// H[f] = sum_p g_p a_rx(aoa_p) a_tx(aod_p)^H exp(-j 2 pi f tau_p).
std::vector<Cmat> cfr_from_paths(const PathList& paths, const ArrayGeometry& tx,
                                 const ArrayGeometry& rx, const FrequencyGrid& grid);

ChannelSet generate_channels(const ScenarioGeometry& scenario, const FrequencyGrid& grid,
                             int n_d, Rng& rng);

/// 1_{n_d} (x) H_t: vertical replication to K rows.
Cmat replicate_rows(const Cmat& am_t, int n_d);

/// Antenna-mode matrix H_r diag(phi) (1_{n_d} (x) H_t).
Cmat antenna_mode(const Cmat& am_r, const Cvec& phi, const Cmat& am_t, int n_d);

/// H_los + H_sm + antenna_mode on one subcarrier; `phi` is the diagonal of Phi.
Cmat compose_channel(const ChannelSet& cs, const Cvec& phi, int subcarrier);

/// The channel with the surface's antenna mode removed.
Cmat channel_without_ris(const ChannelSet& cs, int subcarrier, bool include_sm);

/// Text dump: header line, then one line per matrix entry group.
void write_channel_set(std::ostream& os, const ChannelSet& cs);
ChannelSet read_channel_set(std::istream& is);

}  // namespace risim
