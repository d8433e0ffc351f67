// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"
#include "risim/ris_model.hpp"

#include <cmath>

using namespace risim;

namespace {

RisArrayConfig hardware_element() {
  RisArrayConfig cfg;
  cfg.mode = RisMode::active;
  cfg.k_ris = 16;
  cfg.n_d = 1;
  cfg.splitter_loss_db = 9.0;
  cfg.shifter = {16, 3.0};
  cfg.amp = {20.0, 1e-9, 300.0, 20.0};
  return cfg;
}

}  // namespace

TEST_CASE("element coefficient of the hardware chain nets 8 dB") {
  const auto cfg = hardware_element();
  const Complex phi = element_coefficient(0, cfg);
  CHECK(std::abs(phi) == doctest::Approx(std::pow(10.0, 0.4)).epsilon(1e-12));
  CHECK(std::abs(std::abs(phi) - 2.5118864315095806) < 1e-12);
  CHECK(std::arg(phi) == 0.0);
}

TEST_CASE("16-level shifter steps by 22.5 degrees") {
  const auto cfg = hardware_element();
  CHECK(std::arg(element_coefficient(4, cfg)) == doctest::Approx(kPi / 2).epsilon(1e-14));
  for (int m = 0; m < 16; ++m) {
    const double a = std::arg(element_coefficient(m, cfg));
    const double wrapped = std::fmod(a + 2 * kPi, 2 * kPi);
    const double steps = wrapped / (22.5 * kPi / 180.0);
    CHECK(std::abs(steps - std::round(steps)) < 1e-12);
    CHECK(std::abs(element_coefficient(m, cfg)) == doctest::Approx(std::abs(element_coefficient(0, cfg))));
  }
  CHECK(cfg.shifter.step() * cfg.shifter.levels == doctest::Approx(2 * kPi).epsilon(1e-15));
}

TEST_CASE("element coefficient rejects out-of-range indices") {
  const auto cfg = hardware_element();
  CHECK_THROWS_AS(element_coefficient(-1, cfg), std::invalid_argument);
  CHECK_THROWS_AS(element_coefficient(16, cfg), std::invalid_argument);
}

TEST_CASE("passive coefficient is unit modulus") {
  RisArrayConfig cfg;
  cfg.mode = RisMode::passive;
  cfg.amp.gain_db = 20.0;  // ignored
  cfg.splitter_loss_db = 9.0;
  CHECK(std::abs(element_coefficient(1, cfg)) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("build_phi is constant-modulus diagonal") {
  auto cfg = hardware_element();
  Rng rng(7);
  const PhaseCodeword c = random_codeword(cfg, rng);
  const Cmat phi = build_phi(c, cfg);
  const double g = coefficient_magnitude(cfg);
  CHECK((phi * phi.adjoint() - g * g * Cmat::Identity(16, 16)).norm() < 1e-12);
  for (int r = 0; r < 16; ++r)
    for (int col = 0; col < 16; ++col)
      if (r != col) CHECK(phi(r, col) == Complex(0.0, 0.0));

  PhaseCodeword d = c;
  d[5] = (d[5] + 1) % 16;
  Cmat diff = build_phi(d, cfg) - phi;
  CHECK(std::abs(diff(5, 5)) > 0.1);
  diff(5, 5) = 0.0;
  CHECK(diff.norm() == 0.0);

  cfg.k_ris = 1;
  const Cmat one = build_phi(PhaseCodeword{{0}}, cfg);
  CHECK(one.rows() == 1);
  CHECK(std::abs(one(0, 0) - Complex(2.5118864315095806, 0)) < 1e-12);
}

TEST_CASE("build_phi rejects length mismatch") {
  const auto cfg = hardware_element();
  CHECK_THROWS_AS(build_phi(PhaseCodeword{{0, 1}}, cfg), std::invalid_argument);
}

TEST_CASE("power consumption") {
  RisArrayConfig passive;
  passive.mode = RisMode::passive;
  passive.k_ris = 256;
  passive.p_dps_mw = 0.005;
  CHECK(power_consumption(passive) == doctest::Approx(1.28).epsilon(1e-12));

  AmplifierSpec lna;  // 300 mW at 20 dB
  CHECK(amplifier_power_mw(18.0, lna) == doctest::Approx(189.2872).epsilon(1e-6));
  CHECK(amplifier_power_mw(12.0, lna) == doctest::Approx(47.5468).epsilon(1e-6));
  CHECK(amplifier_power_mw(6.0, lna) == doctest::Approx(11.9432).epsilon(1e-5));

  passive.k_ris = 0;
  CHECK(power_consumption(passive) == 0.0);

  auto active = hardware_element();
  active.n_d = 2;
  CHECK(power_consumption(active) == doctest::Approx(16 * 300.0 + 32 * 0.005));
}

TEST_CASE("power is monotone in size and gain and ignores the codeword") {
  auto cfg = hardware_element();
  double last = 0.0;
  for (int k = 1; k <= 64; k *= 2) {
    cfg.k_ris = k;
    const double p = power_consumption(cfg);
    CHECK(p >= last);
    last = p;
  }
  last = 0.0;
  for (double g = 0; g <= 30; g += 3) {
    cfg.amp.gain_db = g;
    const double p = power_consumption(cfg);
    CHECK(p >= last);
    last = p;
  }
}

TEST_CASE("codeword space size saturates") {
  RisArrayConfig cfg;
  cfg.shifter.levels = 2;
  cfg.k_ris = 4;
  CHECK(codeword_space_size(cfg).value() == 16);
  cfg.shifter.levels = 4;
  CHECK(codeword_space_size(cfg).value() == 256);
  cfg.shifter.levels = 16;
  cfg.k_ris = 256;
  CHECK_FALSE(codeword_space_size(cfg).has_value());
  cfg.shifter.levels = 2;
  cfg.k_ris = 24;
  CHECK(codeword_space_size(cfg).value() == (1u << 24));
  cfg.k_ris = 25;
  CHECK_FALSE(codeword_space_size(cfg).has_value());
}

TEST_CASE("random codewords are reproducible and uniform") {
  auto cfg = hardware_element();
  Rng a(123), b(123);
  CHECK(random_codeword(cfg, a) == random_codeword(cfg, b));

  cfg.shifter.levels = 2;
  Rng c(5);
  for (int i = 0; i < 100; ++i)
    for (int v : random_codeword(cfg, c).indices) CHECK((v == 0 || v == 1));

  // Chi-square goodness of fit at the 1% level, M = 16 (15 dof: 30.578).
  cfg.shifter.levels = 16;
  cfg.k_ris = 1;
  Rng d(99);
  std::vector<int> hist(16, 0);
  const int n = 100000;
  for (int i = 0; i < n; ++i) ++hist[random_codeword(cfg, d)[0]];
  double chi2 = 0.0;
  for (int h : hist) chi2 += (h - n / 16.0) * (h - n / 16.0) / (n / 16.0);
  CHECK(chi2 < 30.578);
}

TEST_CASE("config validation") {
  RisArrayConfig cfg;
  cfg.shifter.levels = 3;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.shifter.levels = 4;
  cfg.mode = RisMode::passive;
  cfg.n_d = 2;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.n_d = 1;
  cfg.amp.noise_var = 1.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.amp.noise_var = 0.0;
  CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("gain budget splits evenly over branches") {
  // 36 dB over 4 and 256 branches.
  CHECK(gain_for_budget(4, 36.0) == doctest::Approx(29.979).epsilon(1e-4));
  CHECK(gain_for_budget(256, 36.0) == doctest::Approx(11.918).epsilon(1e-4));
  RisArrayConfig cfg;
  cfg.mode = RisMode::active;
  cfg.k_ris = 4;
  cfg.amp.gain_db = gain_for_budget(4, 36.0);
  CHECK(total_transmission_gain_db(cfg) == doctest::Approx(36.0).epsilon(1e-12));
}
