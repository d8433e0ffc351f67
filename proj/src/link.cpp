// SPDX-License-Identifier: Apache-2.0
#include "risim/link.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <string>

namespace risim {

void NoiseSpec::validate() const {
  if (!(sigma_z2 > 0.0)) throw std::invalid_argument("noise: sigma_z2 must be > 0");
  if (sigma_v2 < 0.0) throw std::invalid_argument("noise: sigma_v2 must be >= 0");
}

QamConstellation::QamConstellation(int order) : order_(order) {
  if (order != 4 && order != 16 && order != 64 && order != 256)
    throw std::invalid_argument("qam: order must be one of 4, 16, 64, 256");
  bits_ = std::countr_zero(static_cast<unsigned>(order));
  levels_ = 1 << (bits_ / 2);
  scale_ = std::sqrt(2.0 * (order - 1) / 3.0);
  gray_.resize(levels_);
  for (int i = 0; i < levels_; ++i) gray_[i] = static_cast<unsigned>(i ^ (i >> 1));
  points_.resize(order);
  const int half = bits_ / 2;
  for (int i = 0; i < levels_; ++i)
    for (int q = 0; q < levels_; ++q)
      points_[(gray_[i] << half) | gray_[q]] = {(2.0 * i - (levels_ - 1)) / scale_,
                                                (2.0 * q - (levels_ - 1)) / scale_};
}

int QamConstellation::axis_index(double x) const {
  const double pos = std::round((x * scale_ + (levels_ - 1)) / 2.0);
  if (!(pos > 0.0)) return 0;
  return pos >= levels_ - 1 ? levels_ - 1 : static_cast<int>(pos);
}

unsigned QamConstellation::slice(Complex x) const {
  return (gray_[axis_index(x.real())] << (bits_ / 2)) | gray_[axis_index(x.imag())];
}

Cmat ris_noise_cov(const Cmat& am_r, const Cvec& phi, double sigma_v2) {
  if (am_r.cols() != phi.size()) throw std::invalid_argument("ris_noise_cov: dimension mismatch");
  const Cmat g = am_r * phi.asDiagonal();
  return sigma_v2 * g * g.adjoint();
}

Cmat total_noise_cov(const Cmat& am_r, const Cvec& phi, const NoiseSpec& noise) {
  Cmat r = noise.sigma_v2 > 0.0 ? ris_noise_cov(am_r, phi, noise.sigma_v2)
                                : Cmat::Zero(am_r.rows(), am_r.rows());
  r.diagonal().array() += noise.sigma_z2;
  return r;
}

Cmat inverse_sqrt(const Cmat& r) {
  if (r.rows() != r.cols()) throw std::invalid_argument("inverse_sqrt: matrix must be square");
  if ((r - r.adjoint()).norm() > 1e-9 * std::max(1.0, r.norm()))
    throw std::invalid_argument("inverse_sqrt: matrix is not Hermitian");
  Eigen::SelfAdjointEigenSolver<Cmat> es(r);
  if (es.info() != Eigen::Success) throw SingularCovariance("inverse_sqrt: eigensolver failed");
  const Eigen::VectorXd& lam = es.eigenvalues();
  if (!(lam.minCoeff() > 1e-14 * std::max(lam.maxCoeff(), std::numeric_limits<double>::min())))
    throw SingularCovariance("noise covariance is not positive definite");
  return es.eigenvectors() * lam.cwiseSqrt().cwiseInverse().asDiagonal() *
         es.eigenvectors().adjoint();
}

WhitenedChannel whiten(const Cmat& h, const Cmat& r_n) {
  if (r_n.rows() != h.rows()) throw std::invalid_argument("whiten: dimension mismatch");
  return {inverse_sqrt(r_n) * h};
}

Cvec transmit(const Cmat& h, const Cmat& am_r, const Cvec& phi, const Cvec& s,
              const NoiseSpec& noise, Rng& rng) {
  if (h.cols() != s.size()) throw std::invalid_argument("transmit: symbol vector size mismatch");
  Cvec y = h * s;
  if (noise.sigma_v2 > 0.0 && am_r.size() > 0) {
    if (am_r.rows() != h.rows() || am_r.cols() != phi.size())
      throw std::invalid_argument("transmit: surface dimensions mismatch");
    Cvec v(phi.size());
    for (auto& x : v) x = rng.complex_normal(noise.sigma_v2);
    y += am_r * (phi.asDiagonal() * v);
  }
  if (noise.sigma_z2 > 0.0)
    for (auto& x : y) x += rng.complex_normal(noise.sigma_z2);
  return y;
}

LmmseDetector::LmmseDetector(const Cmat& h, const Cmat& r_n) {
  if (r_n.rows() != h.rows() || r_n.cols() != h.rows())
    throw std::invalid_argument("lmmse: dimension mismatch");
  Cmat a = h * h.adjoint() + r_n;
  Eigen::LLT<Cmat> llt(a);
  if (llt.info() != Eigen::Success) throw DetectionFailure("lmmse: singular system");
  filter_ = llt.solve(h).adjoint();  // (A^{-1} H)^H = H^H A^{-1}, A Hermitian
  bias_ = (filter_ * h).diagonal();
  if (!filter_.allFinite()) throw DetectionFailure("lmmse: non-finite filter");
}

Detection LmmseDetector::detect(const Cvec& y, const QamConstellation& qam) const {
  Detection d;
  d.estimates = filter_ * y;
  d.labels.resize(d.estimates.size());
  for (Eigen::Index i = 0; i < d.estimates.size(); ++i) {
    if (std::abs(bias_[i]) > 1e-300) d.estimates[i] /= bias_[i];
    d.labels[i] = qam.slice(d.estimates[i]);
  }
  return d;
}

Detection lmmse_detect(const Cvec& y, const Cmat& h, const Cmat& r_n, const QamConstellation& qam) {
  return LmmseDetector(h, r_n).detect(y, qam);
}

Detection ml_detect(const Cvec& y, const Cmat& h, const Cmat& r_n, const QamConstellation& qam) {
  const auto n_t = h.cols();
  double space = std::pow(static_cast<double>(qam.order()), static_cast<double>(n_t));
  if (space > 4096) throw std::invalid_argument("ml_detect: search space too large");
  const Cmat w = inverse_sqrt(r_n);
  const Cvec yw = w * y;
  const Cmat hw = w * h;
  const auto total = static_cast<std::uint64_t>(space);
  Detection best;
  best.labels.assign(n_t, 0);
  double best_metric = std::numeric_limits<double>::infinity();
  Cvec s(n_t);
  std::vector<unsigned> labels(n_t);
  for (std::uint64_t n = 0; n < total; ++n) {
    std::uint64_t r = n;
    for (Eigen::Index t = 0; t < n_t; ++t) {
      labels[t] = static_cast<unsigned>(r % qam.order());
      r /= qam.order();
      s[t] = qam.point(labels[t]);
    }
    const double metric = (yw - hw * s).squaredNorm();
    if (metric < best_metric) {
      best_metric = metric;
      best.labels = labels;
      best.estimates = s;
    }
  }
  return best;
}

int bit_distance(unsigned a, unsigned b) { return std::popcount(a ^ b); }

LinkMetrics measure_link(const std::vector<Cmat>& h, const std::vector<Cmat>& am_r,
                         const Cvec& phi, const LinkSettings& settings) {
  settings.noise.validate();
  if (settings.n_frames < 1) throw std::invalid_argument("measure_link: n_frames must be >= 1");
  if (h.empty()) throw std::invalid_argument("measure_link: no subcarriers");
  const bool ris_noise = !am_r.empty() && settings.noise.sigma_v2 > 0.0;
  if (!am_r.empty() && am_r.size() != h.size())
    throw std::invalid_argument("measure_link: surface matrices do not match subcarriers");
  const QamConstellation qam(settings.qam_order);
  static const Cmat kNone;

  LinkMetrics m;
  for (std::size_t i = 0; i < h.size(); ++i) {
    const Eigen::Index n_r = h[i].rows();
    const Eigen::Index n_t = h[i].cols();
    Cmat r_n = ris_noise ? ris_noise_cov(am_r[i], phi, settings.noise.sigma_v2)
                         : Cmat::Zero(n_r, n_r);
    r_n.diagonal().array() += settings.noise.sigma_z2;
    const WhitenedChannel w = whiten(h[i], r_n);
    m.capacity += capacity(w);
    m.snr += snr(w);

    Rng rng(derive_seed(settings.seed, i));
    const LmmseDetector det(h[i], r_n);
    const Cmat& noise_r = ris_noise ? am_r[i] : kNone;
    Cvec s(n_t);
    std::vector<unsigned> sent(n_t);
    for (int f = 0; f < settings.n_frames; ++f) {
      for (Eigen::Index t = 0; t < n_t; ++t) {
        sent[t] = static_cast<unsigned>(rng.uniform_index(qam.order()));
        s[t] = qam.point(sent[t]);
      }
      const Cvec y = transmit(h[i], noise_r, phi, s, settings.noise, rng);
      const Detection d = det.detect(y, qam);
      for (Eigen::Index t = 0; t < n_t; ++t) m.bit_errors += bit_distance(sent[t], d.labels[t]);
      m.bits += static_cast<std::uint64_t>(n_t) * qam.bits_per_symbol();
    }
  }
  const double n = static_cast<double>(h.size());
  m.capacity /= n;
  m.snr /= n;
  m.snr_db = power_to_db(m.snr);
  m.uncoded_ber = m.bits ? static_cast<double>(m.bit_errors) / static_cast<double>(m.bits) : 0.0;
  return m;
}

LinkMetrics measure_link(const ChannelSet& cs, const Cvec& phi, const LinkSettings& settings) {
  std::vector<Cmat> h;
  h.reserve(cs.n_subcarriers());
  for (int i = 0; i < cs.n_subcarriers(); ++i) h.push_back(compose_channel(cs, phi, i));
  return measure_link(h, cs.am_r, phi, settings);
}

LinkMetrics measure_link(const ChannelSet& cs, const PhaseCodeword& codeword,
                         const RisArrayConfig& ris, const LinkSettings& settings) {
  return measure_link(cs, phi_diagonal(codeword, ris), settings);
}

LinkMetrics measure_link_without_ris(const ChannelSet& cs, bool include_sm,
                                     const LinkSettings& settings) {
  std::vector<Cmat> h;
  h.reserve(cs.n_subcarriers());
  for (int i = 0; i < cs.n_subcarriers(); ++i) h.push_back(channel_without_ris(cs, i, include_sm));
  return measure_link(h, {}, Cvec(), settings);
}

}  // namespace risim
