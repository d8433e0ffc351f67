// SPDX-License-Identifier: Apache-2.0
#include "risim/ris_model.hpp"

#include <cmath>
#include <string>

namespace risim {

namespace {

bool is_power_of_two(int v) { return v > 0 && (v & (v - 1)) == 0; }

}  // namespace

void RisArrayConfig::validate() const {
  if (k_ris < 0 || n_d < 1) throw std::invalid_argument("ris: k_ris must be >= 0 and n_d >= 1");
  if (shifter.levels < 2 || !is_power_of_two(shifter.levels))
    throw std::invalid_argument("ris: phase levels must be a power of two >= 2");
  if (shifter.insertion_loss_db < 0) throw std::invalid_argument("ris: insertion loss must be >= 0");
  if (amp.noise_var < 0) throw std::invalid_argument("ris: amplifier noise variance must be >= 0");
  if (amp.p_ref_mw <= 0) throw std::invalid_argument("ris: amplifier reference power must be > 0");
  if (p_dps_mw < 0) throw std::invalid_argument("ris: phase shifter power must be >= 0");
  if (mode == RisMode::passive) {
    if (n_d != 1) throw std::invalid_argument("ris: passive surface requires n_d = 1");
    if (amp.noise_var != 0.0) throw std::invalid_argument("ris: passive surface requires zero noise");
  }
}

void check_codeword(const PhaseCodeword& c, const RisArrayConfig& cfg) {
  if (static_cast<int>(c.size()) != cfg.k())
    throw std::invalid_argument("codeword length " + std::to_string(c.size()) +
                                " does not match K = " + std::to_string(cfg.k()));
  for (int v : c.indices)
    if (v < 0 || v >= cfg.shifter.levels)
      throw std::invalid_argument("codeword phase index " + std::to_string(v) + " out of range");
}

double coefficient_magnitude(const RisArrayConfig& cfg) {
  if (cfg.mode == RisMode::passive) return db_to_amplitude(-cfg.shifter.insertion_loss_db);
  return db_to_amplitude(cfg.amp.gain_db - cfg.splitter_loss_db - cfg.shifter.insertion_loss_db);
}

Complex element_coefficient(int index, const RisArrayConfig& cfg) {
  if (index < 0 || index >= cfg.shifter.levels)
    throw std::invalid_argument("phase index " + std::to_string(index) + " out of range");
  return std::polar(coefficient_magnitude(cfg), index * cfg.shifter.step());
}

Cvec phi_diagonal(const PhaseCodeword& codeword, const RisArrayConfig& cfg) {
  check_codeword(codeword, cfg);
  const double mag = coefficient_magnitude(cfg);
  Cvec d(codeword.size());
  for (Eigen::Index k = 0; k < d.size(); ++k)
    d[k] = std::polar(mag, codeword.indices[k] * cfg.shifter.step());
  return d;
}

Cmat build_phi(const PhaseCodeword& codeword, const RisArrayConfig& cfg) {
  return phi_diagonal(codeword, cfg).asDiagonal();
}

double amplifier_power_mw(double gain_db, const AmplifierSpec& amp) {
  return amp.p_ref_mw * db_to_power(gain_db - amp.g_ref_db);
}

double power_consumption(const RisArrayConfig& cfg) {
  const double shifters = cfg.k() * cfg.p_dps_mw;
  if (cfg.mode == RisMode::passive) return shifters;
  return cfg.k_ris * amplifier_power_mw(cfg.amp.gain_db, cfg.amp) + shifters;
}

std::optional<std::uint64_t> codeword_space_size(const RisArrayConfig& cfg, std::uint64_t limit) {
  const auto m = static_cast<std::uint64_t>(cfg.shifter.levels);
  std::uint64_t n = 1;
  for (int k = 0; k < cfg.k(); ++k) {
    if (n > limit / m) return std::nullopt;
    n *= m;
  }
  if (n > limit) return std::nullopt;
  return n;
}

PhaseCodeword random_codeword(const RisArrayConfig& cfg, Rng& rng) {
  PhaseCodeword c;
  c.indices.resize(cfg.k());
  for (int& v : c.indices) v = static_cast<int>(rng.uniform_index(cfg.shifter.levels));
  return c;
}

PhaseCodeword codeword_from_rank(std::uint64_t n, const RisArrayConfig& cfg) {
  const auto m = static_cast<std::uint64_t>(cfg.shifter.levels);
  PhaseCodeword c;
  c.indices.assign(cfg.k(), 0);
  for (int k = cfg.k() - 1; k >= 0; --k) {
    c.indices[k] = static_cast<int>(n % m);
    n /= m;
  }
  return c;
}

double gain_for_budget(int k, double budget_db) { return budget_db - power_to_db(k); }

double total_transmission_gain_db(const RisArrayConfig& cfg) {
  const double mag = coefficient_magnitude(cfg);
  return power_to_db(cfg.k() * mag * mag);
}

}  // namespace risim
