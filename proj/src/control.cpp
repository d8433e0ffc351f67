// SPDX-License-Identifier: Apache-2.0
#include "risim/control.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace risim {

ProbeOracle::ProbeOracle(int k, int levels, Objective objective)
    : k_(k), levels_(levels), objective_(std::move(objective)) {
  if (k < 1 || levels < 2) throw std::invalid_argument("ProbeOracle: need K >= 1 and M >= 2");
}

double ProbeOracle::evaluate(const PhaseCodeword& codeword) {
  if (static_cast<int>(codeword.size()) != k_)
    throw std::invalid_argument("ProbeOracle: codeword length mismatch");
  const double v = objective_(codeword);
  trace_.push_back({trace_.size(), codeword, v});
  return v;
}

LinkObjective::LinkObjective(std::shared_ptr<const ChannelSet> cs, RisArrayConfig ris,
                             NoiseSpec noise, ObjectiveKind kind)
    : cs_(std::move(cs)), ris_(ris), kind_(kind), accesses_(std::make_shared<std::uint64_t>(0)) {
  cs_->validate();
  ris_.validate();
  noise.validate();
  if (cs_->k() != ris_.k() || cs_->n_d != ris_.n_d)
    throw std::invalid_argument("LinkObjective: channel set does not match the surface");
  const double mag = coefficient_magnitude(ris_);
  sub_.reserve(cs_->n_subcarriers());
  for (int i = 0; i < cs_->n_subcarriers(); ++i) {
    const Cmat& h_r = cs_->am_r[i];
    Cmat r_n = noise.sigma_v2 * mag * mag * h_r * h_r.adjoint();
    r_n.diagonal().array() += noise.sigma_z2;
    const Cmat w = inverse_sqrt(r_n);
    sub_.push_back({w * (cs_->los[i] + cs_->sm[i]), w * h_r, cs_->am_t[i]});
  }
}

double LinkObjective::operator()(const PhaseCodeword& codeword) const {
  const Cvec phi = phi_diagonal(codeword, ris_);
  double total = 0.0;
  for (const auto& s : sub_) {
    const Cmat h = s.base + antenna_mode(s.am_r, phi, s.am_t, ris_.n_d);
    total += kind_ == ObjectiveKind::capacity ? capacity(h) : snr(h);
  }
  return total / static_cast<double>(sub_.size());
}

const ChannelSet& LinkObjective::channel_set() const {
  ++*accesses_;
  return *cs_;
}

ProbeOracle LinkObjective::make_oracle() const {
  return ProbeOracle(ris_.k(), ris_.shifter.levels,
                     [self = *this](const PhaseCodeword& c) { return self(c); });
}

namespace {

OptimizationResult summarize(const ProbeOracle& oracle, std::size_t first,
                             std::size_t initial_at) {
  const ProbeTrace& all = oracle.trace();
  OptimizationResult r;
  r.trace.assign(all.begin() + static_cast<std::ptrdiff_t>(first), all.end());
  r.probe_count = r.trace.size();
  if (r.trace.empty()) return r;
  std::size_t best = 0, worst = 0;
  for (std::size_t i = 1; i < r.trace.size(); ++i) {
    if (r.trace[i].value > r.trace[best].value) best = i;
    if (r.trace[i].value < r.trace[worst].value) worst = i;
  }
  r.best_codeword = r.trace[best].codeword;
  r.best_value = r.trace[best].value;
  r.worst_codeword = r.trace[worst].codeword;
  r.worst_value = r.trace[worst].value;
  r.initial_codeword = r.trace[initial_at].codeword;
  r.initial_value = r.trace[initial_at].value;
  return r;
}

void greedy_pass(ProbeOracle& oracle, PhaseCodeword& current, double& current_value,
                 const RisArrayConfig& cfg, std::size_t* init_probe) {
  const int m_levels = cfg.shifter.levels;
  for (int k = 0; k < cfg.k(); ++k) {
    const int incumbent = current[k];
    int best_m = 0;
    double best_v = 0.0;
    for (int m = 0; m < m_levels; ++m) {
      current[k] = m;
      const double v = oracle.evaluate(current);
      if (k == 0 && m == incumbent && init_probe) *init_probe = oracle.probe_count() - 1;
      if (m == 0 || v > best_v) {
        best_v = v;
        best_m = m;
      }
    }
    current[k] = best_m;
    current_value = best_v;
  }
}

}  // namespace

int default_rms_samples(int k) { return std::max(16, k); }

SampleResult rms(ProbeOracle& oracle, int samples, const RisArrayConfig& cfg, Rng& rng) {
  if (samples < 1) throw std::invalid_argument("rms: samples must be >= 1");
  SampleResult best;
  for (int i = 0; i < samples; ++i) {
    PhaseCodeword c = random_codeword(cfg, rng);
    const double v = oracle.evaluate(c);
    if (i == 0 || v > best.value) {
      best.value = v;
      best.codeword = std::move(c);
    }
  }
  return best;
}

OptimizationResult greedy_search(ProbeOracle& oracle, const PhaseCodeword& init,
                                 const RisArrayConfig& cfg) {
  check_codeword(init, cfg);
  const std::size_t first = oracle.probe_count();
  PhaseCodeword current = init;
  double value = 0.0;
  std::size_t init_probe = first;
  greedy_pass(oracle, current, value, cfg, &init_probe);
  OptimizationResult r = summarize(oracle, first, init_probe - first);
  r.final_codeword = current;
  r.final_value = value;
  return r;
}

OptimizationResult bg(ProbeOracle& oracle, int samples, const RisArrayConfig& cfg, Rng& rng) {
  const std::size_t first = oracle.probe_count();
  const SampleResult seed = rms(oracle, samples, cfg, rng);
  PhaseCodeword current = seed.codeword;
  double value = seed.value;
  greedy_pass(oracle, current, value, cfg, nullptr);
  OptimizationResult r = summarize(oracle, first, 0);
  r.final_codeword = current;
  r.final_value = value;
  return r;
}

int default_csm_samples(const RisArrayConfig& cfg, CsmBasis basis) {
  return 8 * (basis == CsmBasis::k ? cfg.k() : cfg.k_ris);
}

OptimizationResult csm(ProbeOracle& oracle, const RisArrayConfig& cfg, Rng& rng, int samples) {
  if (samples < 1) throw std::invalid_argument("csm: samples must be >= 1");
  const int k_count = cfg.k();
  const int m_levels = cfg.shifter.levels;
  const std::size_t first = oracle.probe_count();
  std::vector<double> sum(static_cast<std::size_t>(k_count) * m_levels, 0.0);
  std::vector<int> count(sum.size(), 0);
  for (int s = 0; s < samples; ++s) {
    const PhaseCodeword c = random_codeword(cfg, rng);
    const double v = oracle.evaluate(c);
    for (int k = 0; k < k_count; ++k) {
      sum[k * m_levels + c[k]] += v;
      ++count[k * m_levels + c[k]];
    }
  }
  PhaseCodeword out;
  out.indices.assign(k_count, 0);
  for (int k = 0; k < k_count; ++k) {
    int best_m = -1;
    double best_mean = 0.0;
    for (int m = 0; m < m_levels; ++m) {
      const auto cell = static_cast<std::size_t>(k * m_levels + m);
      if (count[cell] == 0) continue;
      const double mean = sum[cell] / count[cell];
      if (best_m < 0 || mean > best_mean) {
        best_mean = mean;
        best_m = m;
      }
    }
    if (best_m < 0) throw std::logic_error("csm: every conditional cell is empty");
    out[k] = best_m;
  }
  const double final_value = oracle.evaluate(out);
  OptimizationResult r = summarize(oracle, first, 0);
  r.final_codeword = out;
  r.final_value = final_value;
  return r;
}

OptimizationResult exhaustive_search(ProbeOracle& oracle, const RisArrayConfig& cfg,
                                     std::uint64_t limit) {
  const auto n = codeword_space_size(cfg, limit);
  if (!n)
    throw std::invalid_argument("exhaustive search refused: M^K exceeds the limit of " +
                                std::to_string(limit) + " codewords");
  const std::size_t first = oracle.probe_count();
  for (std::uint64_t i = 0; i < *n; ++i) oracle.evaluate(codeword_from_rank(i, cfg));
  OptimizationResult r = summarize(oracle, first, 0);
  r.final_codeword = r.best_codeword;
  r.final_value = r.best_value;
  return r;
}

std::vector<double> half_circle_angles(double step_deg) {
  if (!(step_deg > 0.0)) throw std::invalid_argument("angle step must be > 0");
  std::vector<double> a;
  const int n = static_cast<int>(std::floor(180.0 / step_deg + 1e-9));
  for (int i = 0; i <= n; ++i) a.push_back(i * step_deg);
  return a;
}

Codebook mpc_build_codebook(const SisoScenarioFactory& factory, const std::vector<double>& angles,
                            const RisArrayConfig& cfg, const NoiseSpec& noise, int rms_samples,
                            std::uint64_t seed) {
  Codebook cb;
  for (std::size_t i = 0; i < angles.size(); ++i) {
    auto cs = std::make_shared<const ChannelSet>(factory(angles[i]));
    if (cs->n_t() != 1 || cs->n_r() != 1)
      throw std::invalid_argument("mpc_build_codebook: scenario must be SISO");
    const LinkObjective objective(cs, cfg, noise, ObjectiveKind::snr);
    ProbeOracle oracle = objective.make_oracle();
    Rng rng(derive_seed(seed, i));
    const OptimizationResult r = bg(oracle, rms_samples, cfg, rng);
    cb.push_back({angles[i], r.best_codeword});
  }
  return cb;
}

OptimizationResult mpc_select(ProbeOracle& oracle, const Codebook& codebook) {
  if (codebook.empty()) throw std::invalid_argument("mpc_select: empty codebook");
  const std::size_t first = oracle.probe_count();
  for (const auto& e : codebook) oracle.evaluate(e.codeword);
  OptimizationResult r = summarize(oracle, first, 0);
  r.final_codeword = r.best_codeword;
  r.final_value = r.best_value;
  return r;
}

std::string format_codeword(const PhaseCodeword& c) {
  std::string s;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(c[i]);
  }
  return s;
}

PhaseCodeword parse_codeword(const std::string& s) {
  PhaseCodeword c;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != tok.size()) throw std::invalid_argument("bad codeword entry '" + tok + "'");
    c.indices.push_back(v);
  }
  if (c.indices.empty()) throw std::invalid_argument("empty codeword");
  return c;
}

void write_codebook(std::ostream& os, const Codebook& cb) {
  for (const auto& e : cb) {
    std::ostringstream angle;
    angle.precision(17);
    angle << e.angle_deg;
    os << angle.str() << '\t' << format_codeword(e.codeword) << '\n';
  }
}

Codebook read_codebook(std::istream& is) {
  Codebook cb;
  std::string line;
  int n = 0;
  while (std::getline(is, line)) {
    ++n;
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw std::invalid_argument("codebook line " + std::to_string(n) + ": missing tab");
    CodebookEntry e;
    e.angle_deg = std::stod(line.substr(0, tab));
    e.codeword = parse_codeword(line.substr(tab + 1));
    if (!cb.empty() && !(e.angle_deg > cb.back().angle_deg))
      throw std::invalid_argument("codebook line " + std::to_string(n) + ": angles must increase");
    cb.push_back(std::move(e));
  }
  return cb;
}

void write_trace(std::ostream& os, const ProbeTrace& trace) {
  os << "probe\tcodeword\tvalue\n";
  std::ostringstream v;
  v.precision(17);
  for (std::size_t i = 0; i < trace.size(); ++i) {
    v.str("");
    v << trace[i].value;
    os << i << '\t' << format_codeword(trace[i].codeword) << '\t' << v.str() << '\n';
  }
}

}  // namespace risim
