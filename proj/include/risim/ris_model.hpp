// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "risim/random.hpp"
#include "risim/types.hpp"

namespace risim {

enum class RisMode { active, passive };

/// Digital phase shifter with `levels` equally spaced states over 2*pi.
struct PhaseShifterSpec {
  int levels = 2;
  double insertion_loss_db = 0.0;

  double step() const { return 2.0 * kPi / levels; }
};

/// Element amplifier. Power draw is referenced to p_ref_mw at g_ref_db.
struct AmplifierSpec {
  double gain_db = 20.0;
  double noise_var = 0.0;  ///< sigma_v^2 per tRIS branch
  double p_ref_mw = 300.0;
  double g_ref_db = 20.0;
};

/// An active or passive surface made of k_ris receive elements, each
/// feeding n_d transmit branches through its own phase shifter.
///
/// Transmit branch k is fed by receive element k % k_ris, so branches are
/// ordered in n_d blocks of k_ris (the vertical replication 1_{n_d} (x) H_t).
struct RisArrayConfig {
  RisMode mode = RisMode::passive;
  int k_ris = 16;
  int n_d = 1;
  double splitter_loss_db = 0.0;
  PhaseShifterSpec shifter;
  AmplifierSpec amp;
  double p_dps_mw = 0.005;
  double element_spacing = 0.0;  ///< meters; 0 selects half a wavelength

  int k() const { return k_ris * n_d; }

  /// Throws std::invalid_argument on any violated invariant.
  void validate() const;
};

struct PhaseCodeword {
  std::vector<int> indices;

  std::size_t size() const { return indices.size(); }
  int operator[](std::size_t i) const { return indices[i]; }
  int& operator[](std::size_t i) { return indices[i]; }
  bool operator==(const PhaseCodeword&) const = default;
};

/// Throws std::invalid_argument unless `c` is a valid codeword for `cfg`.
void check_codeword(const PhaseCodeword& c, const RisArrayConfig& cfg);

/// |Phi| of one branch: gain minus splitter and shifter losses for an
/// active surface, unit reflection less shifter loss for a passive one.
double coefficient_magnitude(const RisArrayConfig& cfg);

/// Transmission coefficient of a branch set to phase `index`.
Complex element_coefficient(int index, const RisArrayConfig& cfg);

/// The K diagonal entries of Phi for `codeword`.
Cvec phi_diagonal(const PhaseCodeword& codeword, const RisArrayConfig& cfg);

/// Phi as a dense K x K diagonal matrix.
Cmat build_phi(const PhaseCodeword& codeword, const RisArrayConfig& cfg);

/// Static draw of one amplifier at gain `gain_db`, in mW.
double amplifier_power_mw(double gain_db, const AmplifierSpec& amp);

/// Total static draw of the surface in mW. Codeword independent.
double power_consumption(const RisArrayConfig& cfg);

inline constexpr std::uint64_t kDefaultCodewordLimit = std::uint64_t{1} << 24;

/// M^K, or nullopt once it exceeds `limit`.
std::optional<std::uint64_t> codeword_space_size(const RisArrayConfig& cfg,
                                                 std::uint64_t limit = kDefaultCodewordLimit);

/// Each index i.i.d. uniform over [0, M).
PhaseCodeword random_codeword(const RisArrayConfig& cfg, Rng& rng);

/// Codeword number `n` in lexicographic order (last index fastest).
PhaseCodeword codeword_from_rank(std::uint64_t n, const RisArrayConfig& cfg);

/// Largest per-branch gain (dB) such that the K branch gains sum to at most
/// `budget_db`.
double gain_for_budget(int k, double budget_db);

/// Total transmission gain of the surface in dB (sum over K branches of |Phi|^2).
double total_transmission_gain_db(const RisArrayConfig& cfg);

}  // namespace risim
