// SPDX-License-Identifier: Apache-2.0
#include "risim/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <memory>
#include <mutex>
#include <sstream>
#include <thread>

namespace risim {

namespace {

constexpr std::uint64_t kExhaustiveLimit = std::uint64_t{1} << 16;

Vec3 column_axis(const Vec3& normal) {
  const Vec3 h = normal.cross(Vec3::UnitZ());
  if (h.norm() < 1e-12) throw std::invalid_argument("placement: normal must not be vertical");
  return h.normalized();
}

OptimizationResult single_probe(ProbeOracle& oracle, const RisArrayConfig& ris, Rng& rng) {
  OptimizationResult r;
  const PhaseCodeword c = random_codeword(ris, rng);
  const double v = oracle.evaluate(c);
  r.best_codeword = r.worst_codeword = r.initial_codeword = r.final_codeword = c;
  r.best_value = r.worst_value = r.initial_value = r.final_value = v;
  r.probe_count = 1;
  r.trace = {oracle.trace().back()};
  return r;
}

std::unique_ptr<Codebook> load_or_build_codebook(const ScenarioConfig& cfg) {
  if (cfg.algorithm != Algorithm::mpc || cfg.no_ris) return nullptr;
  if (!cfg.codebook.path.empty()) {
    std::ifstream in(cfg.codebook.path);
    if (!in) throw std::runtime_error("cannot open codebook file " + cfg.codebook.path);
    return std::make_unique<Codebook>(read_codebook(in));
  }
  return std::make_unique<Codebook>(build_codebook(cfg));
}

}  // namespace

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::none: return "none";
    case Algorithm::bg: return "bg";
    case Algorithm::csm: return "csm";
    case Algorithm::mpc: return "mpc";
    case Algorithm::exhaustive: return "exhaustive";
  }
  return "?";
}

Algorithm parse_algorithm(const std::string& s) {
  for (Algorithm a : {Algorithm::none, Algorithm::bg, Algorithm::csm, Algorithm::mpc,
                      Algorithm::exhaustive})
    if (to_string(a) == s) return a;
  throw std::invalid_argument("unknown algorithm '" + s + "'");
}

void ScenarioConfig::normalize() {
  if (placement.rows < 1 || placement.cols < 1)
    throw std::invalid_argument("placement: rows and cols must be >= 1");
  ris.k_ris = placement.rows * placement.cols;
  if (ris.mode == RisMode::passive) ris.n_d = 1;
  ris.amp.noise_var = effective_noise().sigma_v2;
  ris.validate();
  ofdm.validate();
  noise.validate();
  QamConstellation{qam_order};
  if (tx.antennas < 1 || rx.antennas < 1) throw std::invalid_argument("arrays need >= 1 antenna");
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (n_frames < 1) throw std::invalid_argument("n_frames must be >= 1");
  if (scatterers.count < 0) throw std::invalid_argument("scatterer count must be >= 0");
  if (gain_budget_db && ris.mode == RisMode::active &&
      total_transmission_gain_db(ris) > *gain_budget_db + 1e-9)
    throw std::invalid_argument("surface gain exceeds gain_budget_db");
}

NoiseSpec ScenarioConfig::effective_noise() const {
  NoiseSpec n = noise;
  if (ris.mode == RisMode::passive) n.sigma_v2 = 0.0;
  return n;
}

LinkSettings ScenarioConfig::link_settings(std::uint64_t s) const {
  return {effective_noise(), qam_order, n_frames, s};
}

std::uint64_t realization_seed(std::uint64_t master, std::uint64_t position, std::uint64_t trial) {
  return derive_seed(master, position, trial);
}

ScenarioGeometry build_scenario(const ScenarioConfig& cfg, Rng& rng,
                                const std::optional<Vec3>& rx_position) {
  const double fc = cfg.ofdm.center;
  const double half_lambda = wavelength(fc) / 2.0;
  const double spacing = cfg.ris.element_spacing > 0 ? cfg.ris.element_spacing : half_lambda;
  ScenarioGeometry g;
  g.tx = make_linear_array(cfg.tx.antennas, half_lambda, cfg.tx.position, cfg.tx.axis, fc);
  g.rx = make_linear_array(cfg.rx.antennas, half_lambda, rx_position.value_or(cfg.rx.position),
                           cfg.rx.axis, fc);
  const Vec3 h = column_axis(cfg.placement.normal);
  g.ris_r = make_planar_array(cfg.placement.rows, cfg.placement.cols, spacing,
                              cfg.placement.position, Vec3::UnitZ(), h, fc);
  g.ris_r.orientation = cfg.placement.normal.normalized();
  g.ris_t = g.ris_r;
  g.ris_t.element_positions.clear();
  for (int d = 0; d < cfg.ris.n_d; ++d)
    for (const auto& p : g.ris_r.element_positions)
      g.ris_t.element_positions.push_back(p + d * (spacing / cfg.ris.n_d) * h);
  g.los_blocked = cfg.los_blocked;
  g.sm_gain_db = cfg.sm_gain_db;
  if (!cfg.scatterers.fixed.empty()) {
    g.scatterers = cfg.scatterers.fixed;
  } else {
    const Vec3& lo = cfg.scatterers.region_min;
    const Vec3& hi = cfg.scatterers.region_max;
    for (int i = 0; i < cfg.scatterers.count; ++i) {
      Vec3 p;
      for (int a = 0; a < 3; ++a) p[a] = lo[a] + rng.uniform01() * (hi[a] - lo[a]);
      g.scatterers.push_back({p, cfg.scatterers.gain_db});
    }
  }
  return g;
}

ChannelSet build_channels(const ScenarioConfig& cfg, std::uint64_t channel_seed,
                          const std::optional<Vec3>& rx_position) {
  Rng rng(channel_seed);
  const ScenarioGeometry g = build_scenario(cfg, rng, rx_position);
  return generate_channels(g, cfg.ofdm, cfg.ris.n_d, rng);
}

ChannelSet build_codebook_channel(const ScenarioConfig& cfg, double angle_deg) {
  ScenarioConfig siso = cfg;
  siso.tx.antennas = 1;
  siso.rx.antennas = 1;
  siso.los_blocked = true;
  siso.scatterers.fixed.clear();
  siso.scatterers.count = 0;
  const double a = angle_deg * kPi / 180.0;
  const Vec3 h = column_axis(cfg.placement.normal);
  const Vec3 n = cfg.placement.normal.normalized();
  const Vec3 rx = cfg.placement.position + cfg.codebook.radius_m * (std::cos(a) * h + std::sin(a) * n);
  ChannelSet cs = build_channels(siso, 0, rx);
  // Only the antenna-mode links: directional end antennas see the surface.
  for (auto& m : cs.sm) m.setZero();
  return cs;
}

Codebook build_codebook(const ScenarioConfig& cfg) {
  const int samples = cfg.rms_samples > 0 ? cfg.rms_samples : default_rms_samples(cfg.ris.k());
  return mpc_build_codebook([&cfg](double angle) { return build_codebook_channel(cfg, angle); },
                            half_circle_angles(cfg.codebook.step_deg), cfg.ris, cfg.effective_noise(),
                            samples, derive_seed(cfg.seed, 0xC0DEB00C));
}

OptimizationResult run_algorithm(const ScenarioConfig& cfg, ProbeOracle& oracle, Rng& rng,
                                 const Codebook* codebook) {
  switch (cfg.algorithm) {
    case Algorithm::none:
      return single_probe(oracle, cfg.ris, rng);
    case Algorithm::bg:
      return bg(oracle, cfg.rms_samples > 0 ? cfg.rms_samples : default_rms_samples(cfg.ris.k()),
                cfg.ris, rng);
    case Algorithm::csm:
      return csm(oracle, cfg.ris, rng,
                 cfg.csm_samples > 0 ? cfg.csm_samples : default_csm_samples(cfg.ris, cfg.csm_basis));
    case Algorithm::mpc:
      if (!codebook)
        throw std::invalid_argument(
            "mpc needs a codebook: generate one with the 'codebook' command and set codebook.path");
      return mpc_select(oracle, *codebook);
    case Algorithm::exhaustive:
      return exhaustive_search(oracle, cfg.ris, kExhaustiveLimit);
  }
  throw std::logic_error("unhandled algorithm");
}

std::uint64_t expected_probes(const ScenarioConfig& cfg, std::size_t codebook_size) {
  const auto k = static_cast<std::uint64_t>(cfg.ris.k());
  const auto m = static_cast<std::uint64_t>(cfg.ris.shifter.levels);
  switch (cfg.algorithm) {
    case Algorithm::none: return 1;
    case Algorithm::bg:
      return (cfg.rms_samples > 0 ? cfg.rms_samples : default_rms_samples(cfg.ris.k())) + k * m;
    case Algorithm::csm:
      return (cfg.csm_samples > 0 ? cfg.csm_samples : default_csm_samples(cfg.ris, cfg.csm_basis)) + 1;
    case Algorithm::mpc: return codebook_size;
    case Algorithm::exhaustive: {
      const auto n = codeword_space_size(cfg.ris, kExhaustiveLimit);
      return n ? *n : 0;
    }
  }
  return 0;
}

StateStudy run_state_study(const ScenarioConfig& cfg, int trial, const Codebook* codebook) {
  const std::uint64_t channel_seed = realization_seed(cfg.seed, 0, static_cast<std::uint64_t>(trial));
  auto cs = std::make_shared<const ChannelSet>(build_channels(cfg, channel_seed));
  const LinkSettings link = cfg.link_settings(derive_seed(channel_seed, 0xBE));
  StateStudy out;
  StateReport& rep = out.report;
  rep.without_ris = measure_link_without_ris(*cs, cfg.baseline_includes_sm, link);
  if (cfg.no_ris || cfg.algorithm == Algorithm::none) {
    rep.initial = rep.best = rep.worst = rep.without_ris;
    if (cfg.no_ris) return out;
  }
  const LinkObjective objective(cs, cfg.ris, cfg.effective_noise(), cfg.objective);
  ProbeOracle oracle = objective.make_oracle();
  Rng rng(derive_seed(channel_seed, 0xA1));
  std::unique_ptr<Codebook> owned;
  if (cfg.algorithm == Algorithm::mpc && !codebook) {
    owned = load_or_build_codebook(cfg);
    codebook = owned.get();
  }
  out.optimization = run_algorithm(cfg, oracle, rng, codebook);
  const OptimizationResult& opt = out.optimization;
  rep.probes = opt.probe_count;
  rep.initial = measure_link(*cs, opt.initial_codeword, cfg.ris, link);
  rep.best = measure_link(*cs, opt.best_codeword, cfg.ris, link);
  rep.worst = measure_link(*cs, opt.worst_codeword, cfg.ris, link);
  // The optimized metric's range comes straight from the probed extrema.
  rep.diff.capacity = cfg.objective == ObjectiveKind::capacity
                          ? opt.best_value - opt.worst_value
                          : rep.best.capacity - rep.worst.capacity;
  rep.diff.snr_db = cfg.objective == ObjectiveKind::snr
                        ? power_to_db(opt.best_value) - power_to_db(opt.worst_value)
                        : rep.best.snr_db - rep.worst.snr_db;
  rep.diff.uncoded_ber = rep.worst.uncoded_ber - rep.best.uncoded_ber;
  return out;
}

IcdfStat icdf(std::vector<double> samples, double level) {
  if (samples.empty()) throw std::invalid_argument("icdf: no samples");
  if (!(level > 0.0 && level <= 1.0)) throw std::invalid_argument("icdf: level must be in (0, 1]");
  std::sort(samples.begin(), samples.end());
  const auto n = samples.size();
  auto need = static_cast<std::size_t>(std::ceil(level * static_cast<double>(n) - 1e-9));
  need = std::clamp<std::size_t>(need, 1, n);
  return {level, samples[n - need]};
}

double median(std::vector<double> samples) {
  if (samples.empty()) throw std::invalid_argument("median: no samples");
  std::sort(samples.begin(), samples.end());
  const auto n = samples.size();
  return n % 2 ? samples[n / 2] : 0.5 * (samples[n / 2 - 1] + samples[n / 2]);
}

ResultRecord evaluate_realization(const ScenarioConfig& cfg, std::uint64_t channel_seed,
                                  const std::optional<Vec3>& rx_position,
                                  const Codebook* codebook, const std::string& id) {
  auto cs = std::make_shared<const ChannelSet>(build_channels(cfg, channel_seed, rx_position));
  const LinkSettings link = cfg.link_settings(derive_seed(channel_seed, 0xBE));
  const LinkMetrics baseline = measure_link_without_ris(*cs, cfg.baseline_includes_sm, link);
  ResultRecord rec;
  rec.scenario_id = id;
  rec.seed = channel_seed;
  rec.algorithm = cfg.algorithm;
  if (cfg.no_ris) {
    rec.metrics = baseline;
    return rec;
  }
  const LinkObjective objective(cs, cfg.ris, cfg.effective_noise(), cfg.objective);
  ProbeOracle oracle = objective.make_oracle();
  Rng rng(derive_seed(channel_seed, 0xA1));
  const OptimizationResult opt = run_algorithm(cfg, oracle, rng, codebook);
  rec.probes = opt.probe_count;
  rec.metrics = measure_link(*cs, opt.best_codeword, cfg.ris, link);
  rec.capacity_increase = rec.metrics.capacity - baseline.capacity;
  rec.power_mw = power_consumption(cfg.ris);
  return rec;
}

std::vector<Vec3> make_grid(const Vec3& lo, const Vec3& hi, int nx, int ny) {
  if (nx < 1 || ny < 1) throw std::invalid_argument("grid: nx and ny must be >= 1");
  std::vector<Vec3> g;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const double fx = nx == 1 ? 0.5 : static_cast<double>(i) / (nx - 1);
      const double fy = ny == 1 ? 0.5 : static_cast<double>(j) / (ny - 1);
      g.emplace_back(lo.x() + fx * (hi.x() - lo.x()), lo.y() + fy * (hi.y() - lo.y()), lo.z());
    }
  return g;
}

std::vector<ResultRecord> capacity_increase_map(const ScenarioConfig& cfg,
                                                const std::vector<Vec3>& rx_grid, int threads) {
  if (rx_grid.empty()) throw std::invalid_argument("map: empty receiver grid");
  const auto codebook = load_or_build_codebook(cfg);
  std::vector<ResultRecord> out(rx_grid.size());
  parallel_for(rx_grid.size(), threads, [&](std::size_t i) {
    out[i] = evaluate_realization(cfg, realization_seed(cfg.seed, i, 0), rx_grid[i], codebook.get(),
                                  "map:" + std::to_string(i));
  });
  return out;
}

ScenarioConfig cell_config(const ScenarioConfig& base, const ArraySize& size, double gain_db) {
  ScenarioConfig c = base;
  c.placement.rows = size.rows;
  c.placement.cols = size.cols;
  c.ris.mode = size.mode;
  if (size.mode == RisMode::passive) {
    c.ris.n_d = 1;
    c.ris.amp.gain_db = 0.0;
  } else {
    c.ris.amp.gain_db = gain_db;
  }
  c.normalize();
  return c;
}

namespace {

std::string size_label(const ArraySize& s) {
  return std::to_string(s.rows) + "x" + std::to_string(s.cols) +
         (s.mode == RisMode::passive ? "-passive" : "-active");
}

std::string gain_label(double g) {
  std::ostringstream os;
  os << g;
  return os.str();
}

SweepCell make_cell(const ArraySize& size, double gain_db, Algorithm a) {
  SweepCell c;
  c.size = size;
  c.gain_db = gain_db;
  c.algorithm = a;
  return c;
}

/// Shared evaluation for sweep-style studies: every cell sees the same
/// realizations (trial x position).
void evaluate_cells(const ScenarioConfig& base, std::vector<SweepCell>& cells,
                    const std::vector<ScenarioConfig>& configs, const std::vector<Vec3>& rx_grid,
                    int threads) {
  const std::vector<Vec3> grid = rx_grid.empty() ? std::vector<Vec3>{base.rx.position} : rx_grid;
  const std::size_t per_cell = grid.size() * static_cast<std::size_t>(base.trials);
  std::vector<std::unique_ptr<Codebook>> books(cells.size());
  for (std::size_t c = 0; c < cells.size(); ++c) {
    books[c] = load_or_build_codebook(configs[c]);
    cells[c].samples.resize(per_cell);
  }
  parallel_for(cells.size() * per_cell, threads, [&](std::size_t w) {
    const std::size_t c = w / per_cell;
    const std::size_t s = w % per_cell;
    const std::size_t pos = s % grid.size();
    const std::size_t trial = s / grid.size();
    cells[c].samples[s] = evaluate_realization(
        configs[c], realization_seed(base.seed, pos, trial), grid[pos], books[c].get(),
        size_label(cells[c].size) + "@" + gain_label(cells[c].gain_db) + "dB:" +
            to_string(configs[c].algorithm) + ":p" + std::to_string(pos) + ":t" +
            std::to_string(trial));
  });
  for (std::size_t c = 0; c < cells.size(); ++c) {
    std::vector<double> dc;
    double cap = 0.0;
    for (const auto& r : cells[c].samples) {
      dc.push_back(r.capacity_increase);
      cap += r.metrics.capacity;
    }
    cells[c].icdf_delta_c = icdf(dc).value;
    cells[c].mean_capacity = cap / static_cast<double>(dc.size());
    cells[c].probes = cells[c].samples.front().probes;
    cells[c].power_mw = power_consumption(configs[c].ris);
    cells[c].algorithm = configs[c].algorithm;
  }
}

}  // namespace

std::vector<SweepCell> gain_size_sweep(const ScenarioConfig& cfg, const std::vector<ArraySize>& sizes,
                                       const std::vector<double>& gains_db,
                                       const std::vector<Vec3>& rx_grid, int threads) {
  std::vector<SweepCell> cells;
  std::vector<ScenarioConfig> configs;
  for (const auto& s : sizes) {
    if (s.rows != s.cols) throw std::invalid_argument("sweep: sizes must be square");
    if (s.mode == RisMode::passive) {
      cells.push_back(make_cell(s, 0.0, cfg.algorithm));
      configs.push_back(cell_config(cfg, s, 0.0));
      continue;
    }
    for (double g : gains_db) {
      cells.push_back(make_cell(s, g, cfg.algorithm));
      configs.push_back(cell_config(cfg, s, g));
    }
  }
  evaluate_cells(cfg, cells, configs, rx_grid, threads);
  return cells;
}

std::vector<SweepCell> algorithm_efficiency(const ScenarioConfig& cfg,
                                            const std::vector<Algorithm>& algorithms,
                                            const std::vector<ArraySize>& sizes,
                                            const std::vector<Vec3>& rx_grid, int threads) {
  std::vector<SweepCell> cells;
  std::vector<ScenarioConfig> configs;
  for (const auto& s : sizes) {
    double gain = cfg.ris.amp.gain_db;
    if (s.mode == RisMode::active && cfg.gain_budget_db)
      gain = gain_for_budget(s.rows * s.cols * cfg.ris.n_d, *cfg.gain_budget_db) +
             cfg.ris.splitter_loss_db + cfg.ris.shifter.insertion_loss_db;
    for (Algorithm a : algorithms) {
      ScenarioConfig c = cfg;
      c.algorithm = a;
      configs.push_back(cell_config(c, s, gain));
      cells.push_back(make_cell(s, s.mode == RisMode::active ? gain : 0.0, a));
    }
  }
  evaluate_cells(cfg, cells, configs, rx_grid, threads);
  return cells;
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
  if (threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  const auto workers = std::min<std::size_t>(static_cast<std::size_t>(threads), n);
  for (std::size_t t = 0; t < workers; ++t)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < n;) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          next = n;
        }
      }
    });
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace risim
