// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "risim/channel.hpp"
#include "risim/random.hpp"
#include "risim/ris_model.hpp"
#include "risim/types.hpp"

namespace risim {

/// Uncoded BER below which a link is considered operable.
inline constexpr double kBerOperableThreshold = 5e-2;

struct NoiseSpec {
  double sigma_v2 = 0.0;  ///< per-branch surface amplifier noise
  double sigma_z2 = 1.0;  ///< receiver noise

  void validate() const;
};

/// Square Gray-labelled QAM with unit average symbol energy.
///
/// A label's upper half of bits selects the in-phase level, the lower half
/// the quadrature level; each half is a Gray code over its PAM axis.
class QamConstellation {
 public:
  explicit QamConstellation(int order);

  int order() const { return order_; }
  int bits_per_symbol() const { return bits_; }
  Complex point(unsigned label) const { return points_[label]; }
  const std::vector<Complex>& points() const { return points_; }

  /// Nearest point by per-axis slicing; returns its label.
  unsigned slice(Complex x) const;

 private:
  int axis_index(double x) const;

  int order_;
  int bits_;
  int levels_;  ///< per axis
  double scale_;
  std::vector<unsigned> gray_;  ///< axis level -> axis label
  std::vector<Complex> points_;
};

struct LinkMetrics {
  double capacity = 0.0;  ///< bps/Hz, mean over subcarriers
  double snr = 0.0;       ///< linear, mean over subcarriers
  double snr_db = 0.0;    ///< 10 log10(snr)
  double uncoded_ber = 0.0;
  std::uint64_t bit_errors = 0;
  std::uint64_t bits = 0;
};

struct WhitenedChannel {
  Cmat h_tilde;
};

/// R_v = sigma_v^2 (H_r Phi)(H_r Phi)^H.
Cmat ris_noise_cov(const Cmat& am_r, const Cvec& phi, double sigma_v2);

/// R_n = R_v + sigma_z^2 I.
Cmat total_noise_cov(const Cmat& am_r, const Cvec& phi, const NoiseSpec& noise);

/// Hermitian R^{-1/2} by eigendecomposition. Throws SingularCovariance if
/// R is not numerically positive definite.
Cmat inverse_sqrt(const Cmat& r);

WhitenedChannel whiten(const Cmat& h, const Cmat& r_n);

/// log2 det(I + H H^H), evaluated through the smaller Gram matrix.
template <typename Derived>
double capacity(const Eigen::MatrixBase<Derived>& h) {
  using Scalar = typename Derived::Scalar;
  using Gram = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  if (h.size() == 0) return 0.0;
  Gram g = h.rows() <= h.cols() ? Gram(h * h.adjoint()) : Gram(h.adjoint() * h);
  g.diagonal().array() += Scalar(1);
  Eigen::LLT<Gram> llt(g);
  double c = 0.0;
  for (Eigen::Index i = 0; i < g.rows(); ++i) c += std::log2(std::real(llt.matrixLLT()(i, i)));
  return std::max(0.0, 2.0 * c);
}

inline double capacity(const WhitenedChannel& w) { return capacity(w.h_tilde); }

/// tr(H H^H) / N_r.
template <typename Derived>
double snr(const Eigen::MatrixBase<Derived>& h) {
  if (h.rows() == 0) return 0.0;
  return h.squaredNorm() / static_cast<double>(h.rows());
}

inline double snr(const WhitenedChannel& w) { return snr(w.h_tilde); }

/// y = H s + H_r Phi v + z.
Cvec transmit(const Cmat& h, const Cmat& am_r, const Cvec& phi, const Cvec& s,
              const NoiseSpec& noise, Rng& rng);

struct Detection {
  Cvec estimates;
  std::vector<unsigned> labels;
};

/// Linear MMSE filter W = H^H (H H^H + R_n)^{-1} followed by per-stream
/// bias removal (divide by diag(W H)) and hard slicing.
class LmmseDetector {
 public:
  LmmseDetector(const Cmat& h, const Cmat& r_n);
  Detection detect(const Cvec& y, const QamConstellation& qam) const;

 private:
  Cmat filter_;
  Cvec bias_;
};

Detection lmmse_detect(const Cvec& y, const Cmat& h, const Cmat& r_n, const QamConstellation& qam);

/// Exhaustive maximum likelihood under Gaussian noise with covariance R_n.
/// Refuses search spaces above 4096 candidates.
Detection ml_detect(const Cvec& y, const Cmat& h, const Cmat& r_n, const QamConstellation& qam);

/// Count of differing bits between two labels.
int bit_distance(unsigned a, unsigned b);

struct LinkSettings {
  NoiseSpec noise;
  int qam_order = 64;
  int n_frames = 16;
  std::uint64_t seed = 1;
};

/// Metrics for explicit per-subcarrier channels and surface noise sources.
/// `am_r`/`phi` may be empty, meaning no surface noise.
LinkMetrics measure_link(const std::vector<Cmat>& h, const std::vector<Cmat>& am_r,
                         const Cvec& phi, const LinkSettings& settings);

/// Compose every subcarrier with `phi`, whiten, and measure.
LinkMetrics measure_link(const ChannelSet& cs, const Cvec& phi, const LinkSettings& settings);

LinkMetrics measure_link(const ChannelSet& cs, const PhaseCodeword& codeword,
                         const RisArrayConfig& ris, const LinkSettings& settings);

/// Baseline with the surface removed: no antenna mode and no surface noise.
LinkMetrics measure_link_without_ris(const ChannelSet& cs, bool include_sm,
                                     const LinkSettings& settings);

}  // namespace risim
