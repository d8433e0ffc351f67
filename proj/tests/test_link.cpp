// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"
#include "oracles.hpp"
#include "risim/link.hpp"

using namespace risim;

namespace {

Cmat empirical_cov(const std::vector<Cvec>& xs) {
  Cmat c = Cmat::Zero(xs.front().size(), xs.front().size());
  for (const auto& x : xs) c += x * x.adjoint();
  return c / static_cast<double>(xs.size());
}

}  // namespace

TEST_CASE("surface noise covariance") {
  std::mt19937_64 g(1);
  const Cmat h_r = oracle::gaussian(4, 4, g);
  const Cvec phi = Cvec::Constant(4, std::polar(2.5, 0.3));
  CHECK(ris_noise_cov(h_r, phi, 0.0).norm() == 0.0);

  const Cmat scalar = ris_noise_cov(Cmat::Ones(1, 1), Cvec::Constant(1, 3.0), 0.2);
  CHECK(std::real(scalar(0, 0)) == doctest::Approx(0.2 * 9.0));

  const Cmat r = ris_noise_cov(h_r, phi, 0.5);
  CHECK((r - r.adjoint()).norm() < 1e-12);
  Eigen::SelfAdjointEigenSolver<Cmat> es(r);
  CHECK(es.eigenvalues().minCoeff() > -1e-12);

  // Monte Carlo: covariance of H_r Phi v, v ~ CN(0, 0.5 I).
  Rng rng(2);
  std::vector<Cvec> samples;
  for (int i = 0; i < 100000; ++i) {
    Cvec v(4);
    for (auto& x : v) x = rng.complex_normal(0.5);
    samples.push_back(h_r * (phi.asDiagonal() * v));
  }
  CHECK((empirical_cov(samples) - r).norm() / r.norm() < 0.02);
}

TEST_CASE("whitening") {
  std::mt19937_64 g(3);
  const Cmat h = oracle::gaussian(3, 2, g);
  const WhitenedChannel scaled = whiten(h, 0.25 * Cmat::Identity(3, 3));
  CHECK((scaled.h_tilde - h / 0.5).norm() < 1e-12);
  CHECK((whiten(h, Cmat::Identity(3, 3)).h_tilde - h).norm() < 1e-12);

  const Cmat a = oracle::gaussian(2, 2, g);
  Cmat r_n = a * a.adjoint() + 0.1 * Cmat::Identity(2, 2);
  const Cmat w = inverse_sqrt(r_n);
  CHECK((w * r_n * w.adjoint() - Cmat::Identity(2, 2)).norm() < 1e-9);

  // Whitened noise has identity covariance.
  const Eigen::LLT<Cmat> llt(r_n);
  Rng rng(4);
  std::vector<Cvec> samples;
  for (int i = 0; i < 10000; ++i) {
    Cvec u(2);
    for (auto& x : u) x = rng.complex_normal(1.0);
    samples.push_back(w * (llt.matrixL() * u));
  }
  CHECK((empirical_cov(samples) - Cmat::Identity(2, 2)).norm() / std::sqrt(2.0) < 0.02);

  CHECK_THROWS_AS(inverse_sqrt(Cmat::Zero(2, 2)), SingularCovariance);
  Cmat indefinite = Cmat::Identity(2, 2);
  indefinite(1, 1) = -1.0;
  CHECK_THROWS_AS(whiten(h.topRows(2), indefinite), SingularCovariance);
}

TEST_CASE("capacity and snr") {
  CHECK(capacity(Cmat::Zero(4, 4)) == 0.0);
  CHECK(capacity(Cmat::Identity(4, 4)) == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(snr(Cmat::Identity(4, 4)) == doctest::Approx(1.0));
  CHECK(snr(Cmat::Zero(4, 4)) == 0.0);

  std::mt19937_64 g(5);
  for (int trial = 0; trial < 50; ++trial) {
    const Cmat h = oracle::gaussian(4, 1 + trial % 6, g, 3.0);
    CHECK(std::abs(capacity(h) - oracle::svd_capacity(h)) < 1e-9);
    CHECK(std::abs(snr(h) - h.squaredNorm() / 4.0) < 1e-12);

    Eigen::SelfAdjointEigenSolver<Cmat> es(h * h.adjoint());
    const double lmax = es.eigenvalues().maxCoeff();
    CHECK(capacity(h) >= std::log2(1 + lmax) - 1e-12);
    CHECK(capacity(h) <= 4 * std::log2(1 + lmax) + 1e-12);
  }
}

TEST_CASE("capacity is invariant to consistent invertible transforms") {
  std::mt19937_64 g(6);
  for (int trial = 0; trial < 20; ++trial) {
    const Cmat h = oracle::gaussian(4, 3, g);
    const Cmat b = oracle::gaussian(4, 4, g);
    const Cmat r_n = b * b.adjoint() + 0.5 * Cmat::Identity(4, 4);
    const Cmat a = oracle::gaussian(4, 4, g) + 2.0 * Cmat::Identity(4, 4);
    const double c1 = capacity(whiten(h, r_n));
    const double c2 = capacity(whiten(a * h, a * r_n * a.adjoint()));
    CHECK(std::abs(c1 - c2) < 1e-9);
  }
}

TEST_CASE("transmit") {
  std::mt19937_64 g(7);
  const Cmat h = oracle::gaussian(3, 2, g);
  const Cmat h_r = oracle::gaussian(3, 4, g);
  const Cvec phi = Cvec::Constant(4, 2.0);
  const Cvec s = oracle::gaussian(2, 1, g);
  Rng rng(1);
  CHECK((transmit(h, h_r, phi, s, {0.0, 0.0}, rng) - h * s).norm() == 0.0);

  Rng a(9), b(9);
  CHECK(transmit(h, h_r, phi, s, {0.3, 0.1}, a) == transmit(h, h_r, phi, s, {0.3, 0.1}, b));

  // y = z when the channel and surface vanish.
  Rng c(10);
  double power = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i)
    power += transmit(Cmat::Zero(1, 2), Cmat::Zero(1, 4), Cvec::Zero(4), s, {0.7, 0.4}, c).squaredNorm();
  CHECK(power / n == doctest::Approx(0.4).epsilon(0.02));

  CHECK_THROWS_AS(transmit(h, h_r, phi, Cvec::Zero(3), {0, 1}, rng), std::invalid_argument);
}

TEST_CASE("QAM constellations are Gray labelled with unit energy") {
  for (int order : {4, 16, 64, 256}) {
    const QamConstellation q(order);
    double e = 0.0;
    double dmin = INFINITY;
    for (const auto& p : q.points()) e += std::norm(p);
    CHECK(e / order == doctest::Approx(1.0).epsilon(1e-12));
    for (int a = 0; a < order; ++a)
      for (int b = a + 1; b < order; ++b) dmin = std::min(dmin, std::abs(q.point(a) - q.point(b)));
    for (int a = 0; a < order; ++a) {
      CHECK(q.slice(q.point(a)) == static_cast<unsigned>(a));
      for (int b = 0; b < order; ++b)
        if (a != b && std::abs(q.point(a) - q.point(b)) < dmin * 1.0001)
          CHECK(bit_distance(a, b) == 1);
    }
  }
  CHECK_THROWS_AS(QamConstellation(8), std::invalid_argument);
}

TEST_CASE("LMMSE recovers noiseless symbols") {
  const QamConstellation q(16);
  const Cmat h = Cmat::Identity(4, 4);
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    Cvec s(4);
    std::vector<unsigned> sent(4);
    for (int t = 0; t < 4; ++t) {
      sent[t] = static_cast<unsigned>(rng.uniform_index(16));
      s[t] = q.point(sent[t]);
    }
    const Detection d = lmmse_detect(h * s, h, 1e-12 * Cmat::Identity(4, 4), q);
    CHECK(d.labels == sent);
  }
}

TEST_CASE("LMMSE never beats exhaustive ML on 2x2 QPSK") {
  const QamConstellation q(4);
  std::mt19937_64 g(21);
  Rng rng(22);
  const NoiseSpec noise{0.0, 0.5};
  long lmmse_errors = 0, ml_errors = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    const Cmat h = oracle::gaussian(2, 2, g);
    const Cmat r_n = noise.sigma_z2 * Cmat::Identity(2, 2);
    Cvec s(2);
    std::vector<unsigned> sent(2);
    for (int t = 0; t < 2; ++t) {
      sent[t] = static_cast<unsigned>(rng.uniform_index(4));
      s[t] = q.point(sent[t]);
    }
    const Cvec y = transmit(h, Cmat(), Cvec(), s, noise, rng);
    const Detection lin = lmmse_detect(y, h, r_n, q);
    const Detection ml = ml_detect(y, h, r_n, q);
    for (int t = 0; t < 2; ++t) {
      lmmse_errors += bit_distance(sent[t], lin.labels[t]);
      ml_errors += bit_distance(sent[t], ml.labels[t]);
    }
  }
  MESSAGE("LMMSE bit errors " << lmmse_errors << ", ML " << ml_errors);
  CHECK(lmmse_errors >= ml_errors);
  CHECK(ml_errors > 0);
}

TEST_CASE("scalar AWGN BER matches the closed form") {
  for (int order : {4, 16}) {
    const double noise_var = order == 4 ? 0.2 : 0.05;
    const double h = 0.8;
    const double expect = oracle::gray_qam_ber(order, noise_var / (h * h));
    const QamConstellation q(order);
    const LmmseDetector det(Cmat::Constant(1, 1, h), noise_var * Cmat::Identity(1, 1));
    Rng rng(order);
    long errors = 0, bits = 0;
    for (int i = 0; i < 200000; ++i) {
      const unsigned label = static_cast<unsigned>(rng.uniform_index(order));
      const Complex y = h * q.point(label) + rng.complex_normal(noise_var);
      errors += bit_distance(label, det.detect(Cvec::Constant(1, y), q).labels[0]);
      bits += q.bits_per_symbol();
    }
    const double ber = static_cast<double>(errors) / bits;
    const double se = std::sqrt(expect * (1 - expect) / bits);
    MESSAGE(order << "-QAM: measured " << ber << ", closed form " << expect);
    CHECK(std::abs(ber - expect) < 3 * se);
  }
}

TEST_CASE("measure_link on degenerate channels") {
  ChannelSet cs;
  cs.n_d = 1;
  for (int i = 0; i < 4; ++i) {
    cs.los.push_back(Cmat::Zero(2, 2));
    cs.sm.push_back(Cmat::Zero(2, 2));
    cs.am_r.push_back(Cmat::Zero(2, 3));
    cs.am_t.push_back(Cmat::Zero(3, 2));
  }
  LinkSettings s{{0.0, 1.0}, 16, 500, 5};
  const LinkMetrics zero = measure_link(cs, Cvec::Ones(3), s);
  CHECK(zero.capacity == 0.0);
  const double se = std::sqrt(0.25 / zero.bits);
  CHECK(std::abs(zero.uncoded_ber - 0.5) < 4 * se);

  std::mt19937_64 g(8);
  for (int i = 0; i < 4; ++i) cs.los[i] = oracle::gaussian(2, 2, g) + 2.0 * Cmat::Identity(2, 2);
  s.noise.sigma_z2 = 1e-12;
  CHECK(measure_link(cs, Cvec::Ones(3), s).uncoded_ber == 0.0);

  s.n_frames = 0;
  CHECK_THROWS_AS(measure_link(cs, Cvec::Ones(3), s), std::invalid_argument);
}

TEST_CASE("more receiver noise lowers capacity and raises BER") {
  std::mt19937_64 g(9);
  int cap_ok = 0, ber_ok = 0;
  const int seeds = 20;
  for (int seed = 0; seed < seeds; ++seed) {
    ChannelSet cs;
    for (int i = 0; i < 4; ++i) {
      cs.los.push_back(oracle::gaussian(4, 4, g));
      cs.sm.push_back(Cmat::Zero(4, 4));
      cs.am_r.push_back(oracle::gaussian(4, 2, g, 0.1));
      cs.am_t.push_back(oracle::gaussian(2, 4, g, 0.1));
    }
    LinkSettings s{{0.05, 0.05}, 16, 200, static_cast<std::uint64_t>(seed)};
    const LinkMetrics a = measure_link(cs, Cvec::Ones(2), s);
    s.noise.sigma_z2 *= 2;
    const LinkMetrics b = measure_link(cs, Cvec::Ones(2), s);
    cap_ok += b.capacity < a.capacity;
    ber_ok += b.uncoded_ber >= a.uncoded_ber;
  }
  CHECK(cap_ok == seeds);
  // One-sided sign test at 95%: at least 15 of 20.
  CHECK(ber_ok >= 15);
}

TEST_CASE("passive links reduce to classical AWGN expressions") {
  std::mt19937_64 g(10);
  ChannelSet cs;
  cs.los.push_back(oracle::gaussian(3, 2, g));
  cs.sm.push_back(oracle::gaussian(3, 2, g));
  cs.am_r.push_back(oracle::gaussian(3, 4, g));
  cs.am_t.push_back(oracle::gaussian(4, 2, g));
  const Cvec phi = Cvec::Constant(4, std::polar(1.0, 0.7));
  const LinkSettings s{{0.0, 0.3}, 4, 1, 1};
  const Cmat h = compose_channel(cs, phi, 0);
  const LinkMetrics m = measure_link(cs, phi, s);
  CHECK(m.capacity == doctest::Approx(oracle::svd_capacity(h / std::sqrt(0.3))).epsilon(1e-12));
  CHECK(m.snr == doctest::Approx(h.squaredNorm() / 0.3 / 3).epsilon(1e-12));
}
