// SPDX-License-Identifier: Apache-2.0
#include "risim/channel.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace risim {

Vec3 ArrayGeometry::centroid() const {
  Vec3 c = Vec3::Zero();
  for (const auto& p : element_positions) c += p;
  return element_positions.empty() ? c : Vec3(c / static_cast<double>(element_positions.size()));
}

ArrayGeometry make_linear_array(int n, double spacing, const Vec3& center, const Vec3& axis,
                                double carrier_freq) {
  ArrayGeometry a;
  a.carrier_freq = carrier_freq;
  const Vec3 u = axis.normalized();
  for (int i = 0; i < n; ++i) a.element_positions.push_back(center + (i - 0.5 * (n - 1)) * spacing * u);
  return a;
}

ArrayGeometry make_planar_array(int rows, int cols, double spacing, const Vec3& center,
                                const Vec3& row_axis, const Vec3& col_axis, double carrier_freq) {
  ArrayGeometry a;
  a.carrier_freq = carrier_freq;
  const Vec3 u = row_axis.normalized();
  const Vec3 v = col_axis.normalized();
  a.orientation = u.cross(v).normalized();
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c)
      a.element_positions.push_back(center + (r - 0.5 * (rows - 1)) * spacing * u +
                                    (c - 0.5 * (cols - 1)) * spacing * v);
  return a;
}

void FrequencyGrid::validate() const {
  if (n_sc < 1) throw std::invalid_argument("ofdm: subcarrier count must be >= 1");
  if (scs <= 0 || center <= 0) throw std::invalid_argument("ofdm: spacing and centre must be > 0");
  if (n_sc * scs > max_bandwidth * (1 + 1e-12))
    throw std::invalid_argument("ofdm: n_sc * scs exceeds the configured bandwidth");
}

void ChannelSet::validate() const {
  const auto n = los.size();
  if (n == 0) throw std::invalid_argument("channel set is empty");
  if (sm.size() != n || am_r.size() != n || am_t.size() != n)
    throw std::invalid_argument("channel set: per-subcarrier vectors differ in length");
  if (n_d < 1) throw std::invalid_argument("channel set: n_d must be >= 1");
  for (std::size_t i = 0; i < n; ++i) {
    if (los[i].rows() != n_r() || los[i].cols() != n_t() || sm[i].rows() != n_r() ||
        sm[i].cols() != n_t() || am_r[i].rows() != n_r() || am_r[i].cols() != k() ||
        am_t[i].rows() != k_ris() || am_t[i].cols() != n_t() || k() != k_ris() * n_d)
      throw std::invalid_argument("channel set: inconsistent dimensions at subcarrier " +
                                  std::to_string(i));
  }
}

Cvec steering_vector(const ArrayGeometry& array, const Vec3& direction, double freq) {
  const double norm = direction.norm();
  if (!(norm > 0.0)) throw std::invalid_argument("steering_vector: zero direction");
  const Vec3 d = direction / norm;
  const Vec3 ref = array.centroid();
  const double k = 2.0 * kPi * freq / kSpeedOfLight;
  Cvec a(array.size());
  for (Eigen::Index n = 0; n < a.size(); ++n)
    a[n] = std::polar(1.0, -k * d.dot(array.element_positions[n] - ref));
  return a;
}

double friis_gain(double distance, double freq) {
  if (!(distance > 0.0)) throw std::invalid_argument("friis_gain: distance must be > 0");
  return wavelength(freq) / (4.0 * kPi * distance);
}

namespace {

double segment(const Vec3& a, const Vec3& b) {
  const double d = (b - a).norm();
  if (!(d > 0.0) || !std::isfinite(d))
    throw std::invalid_argument("generate_paths: degenerate zero-length segment");
  return d;
}

PathComponent los_ray(const Vec3& from, const Vec3& to, double freq) {
  const double d = segment(from, to);
  PathComponent p;
  p.delay = d / kSpeedOfLight;
  p.complex_gain = friis_gain(d, freq) * std::polar(1.0, -2.0 * kPi * freq * p.delay);
  p.aod = p.aoa = (to - from) / d;
  return p;
}

PathComponent bounce_ray(const Vec3& from, const Vec3& via, const Vec3& to, double gain_db,
                         double extra_phase, double freq) {
  const double d1 = segment(from, via);
  const double d2 = segment(via, to);
  PathComponent p;
  p.delay = (d1 + d2) / kSpeedOfLight;
  p.complex_gain = friis_gain(d1, freq) * friis_gain(d2, freq) * db_to_amplitude(gain_db) *
                   std::polar(1.0, extra_phase - 2.0 * kPi * freq * p.delay);
  p.aod = (via - from) / d1;
  p.aoa = (to - via) / d2;
  return p;
}

PathList link_paths(const Vec3& from, const Vec3& to, bool with_los,
                    const std::vector<Scatterer>& scatterers, double freq, Rng& rng) {
  PathList out;
  if (with_los) out.push_back(los_ray(from, to, freq));
  for (const auto& s : scatterers) {
    const double phase = 2.0 * kPi * rng.uniform01();
    out.push_back(bounce_ray(from, s.position, to, s.gain_db, phase, freq));
  }
  return out;
}

}  // namespace

ScenarioPaths generate_paths(const ScenarioGeometry& sc, Rng& rng) {
  const double f = sc.tx.carrier_freq;
  const Vec3 tx = sc.tx.centroid();
  const Vec3 rx = sc.rx.centroid();
  const Vec3 ris_in = sc.ris_r.centroid();
  const Vec3 ris_out = sc.ris_t.centroid();
  ScenarioPaths p;
  p.direct = link_paths(tx, rx, !sc.los_blocked, sc.scatterers, f, rng);
  p.tx_to_ris = link_paths(tx, ris_in, true, sc.scatterers, f, rng);
  p.ris_to_rx = link_paths(ris_out, rx, true, sc.scatterers, f, rng);
  p.structural.push_back(bounce_ray(tx, ris_in, rx, sc.sm_gain_db, 0.0, f));
  return p;
}

std::vector<Cmat> cfr_from_paths(const PathList& paths, const ArrayGeometry& tx,
                                 const ArrayGeometry& rx, const FrequencyGrid& grid) {
  std::vector<Cmat> h(grid.n_sc, Cmat::Zero(rx.size(), tx.size()));
  for (const auto& p : paths) {
    const Cmat outer = steering_vector(rx, p.aoa, grid.center) *
                       steering_vector(tx, p.aod, grid.center).adjoint();
    for (int i = 0; i < grid.n_sc; ++i)
      h[i] += p.complex_gain * std::polar(1.0, -2.0 * kPi * grid.offset(i) * p.delay) * outer;
  }
  return h;
}

ChannelSet generate_channels(const ScenarioGeometry& sc, const FrequencyGrid& grid, int n_d,
                             Rng& rng) {
  grid.validate();
  if (sc.ris_t.size() != sc.ris_r.size() * n_d)
    throw std::invalid_argument("generate_channels: ris_t must hold k_ris * n_d elements");
  const ScenarioPaths p = generate_paths(sc, rng);
  ChannelSet cs;
  cs.n_d = n_d;
  cs.los = cfr_from_paths(p.direct, sc.tx, sc.rx, grid);
  cs.sm = cfr_from_paths(p.structural, sc.tx, sc.rx, grid);
  cs.am_t = cfr_from_paths(p.tx_to_ris, sc.tx, sc.ris_r, grid);
  cs.am_r = cfr_from_paths(p.ris_to_rx, sc.ris_t, sc.rx, grid);
  return cs;
}

Cmat replicate_rows(const Cmat& am_t, int n_d) { return am_t.replicate(n_d, 1); }

Cmat antenna_mode(const Cmat& am_r, const Cvec& phi, const Cmat& am_t, int n_d) {
  const Eigen::Index k_ris = am_t.rows();
  if (am_r.cols() != phi.size() || phi.size() != k_ris * n_d)
    throw std::invalid_argument("antenna_mode: dimension mismatch");
  const Cmat scaled = am_r * phi.asDiagonal();
  Cmat h = Cmat::Zero(am_r.rows(), am_t.cols());
  for (int d = 0; d < n_d; ++d) h.noalias() += scaled.middleCols(d * k_ris, k_ris) * am_t;
  return h;
}

Cmat compose_channel(const ChannelSet& cs, const Cvec& phi, int subcarrier) {
  if (subcarrier < 0 || subcarrier >= cs.n_subcarriers())
    throw std::invalid_argument("compose_channel: subcarrier out of range");
  const auto i = static_cast<std::size_t>(subcarrier);
  return cs.los[i] + cs.sm[i] + antenna_mode(cs.am_r[i], phi, cs.am_t[i], cs.n_d);
}

Cmat channel_without_ris(const ChannelSet& cs, int subcarrier, bool include_sm) {
  const auto i = static_cast<std::size_t>(subcarrier);
  return include_sm ? Cmat(cs.los[i] + cs.sm[i]) : cs.los[i];
}

namespace {

void write_matrix(std::ostream& os, const Cmat& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      os << (r || c ? " " : "") << m(r, c).real() << ' ' << m(r, c).imag();
  os << '\n';
}

Cmat read_matrix(std::istream& is, Eigen::Index rows, Eigen::Index cols) {
  Cmat m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) {
      double re, im;
      if (!(is >> re >> im)) throw std::runtime_error("channel dump: truncated matrix data");
      m(r, c) = {re, im};
    }
  return m;
}

}  // namespace

void write_channel_set(std::ostream& os, const ChannelSet& cs) {
  cs.validate();
  const auto old = os.precision(17);
  os << "risim-channelset 1 " << cs.n_subcarriers() << ' ' << cs.n_r() << ' ' << cs.n_t() << ' '
     << cs.k_ris() << ' ' << cs.n_d << '\n';
  for (int i = 0; i < cs.n_subcarriers(); ++i) {
    write_matrix(os, cs.los[i]);
    write_matrix(os, cs.sm[i]);
    write_matrix(os, cs.am_r[i]);
    write_matrix(os, cs.am_t[i]);
  }
  os.precision(old);
}

ChannelSet read_channel_set(std::istream& is) {
  std::string magic;
  int version = 0, n_sc = 0;
  Eigen::Index n_r = 0, n_t = 0, k_ris = 0;
  ChannelSet cs;
  if (!(is >> magic >> version >> n_sc >> n_r >> n_t >> k_ris >> cs.n_d) ||
      magic != "risim-channelset" || version != 1)
    throw std::runtime_error("channel dump: bad header");
  for (int i = 0; i < n_sc; ++i) {
    cs.los.push_back(read_matrix(is, n_r, n_t));
    cs.sm.push_back(read_matrix(is, n_r, n_t));
    cs.am_r.push_back(read_matrix(is, n_r, k_ris * cs.n_d));
    cs.am_t.push_back(read_matrix(is, k_ris, n_t));
  }
  cs.validate();
  return cs;
}

}  // namespace risim
