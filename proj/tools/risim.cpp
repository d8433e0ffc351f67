// SPDX-License-Identifier: Apache-2.0
//
// risim: command line front end for the surface-assisted MIMO-OFDM
// simulator. See README.md for the config schema and exit codes.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "risim/config.hpp"
#include "risim/io.hpp"

namespace fs = std::filesystem;
using namespace risim;

namespace {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kConfigError = 2,
  kNumericError = 3,
  kIoError = 4,
  kUsage = 64,
};

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  int threads = 0;
  std::string out = "out";
  std::vector<std::string> overrides;
  bool no_ris = false;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "JSON scenario config")->required();
  cmd->add_option("--seed", c.seed, "Master seed (overrides the config)");
  cmd->add_option("--threads", c.threads, "Worker threads; 0 = machine parallelism, 1 = serial");
  cmd->add_option("--out", c.out, "Output directory");
  cmd->add_option("--override", c.overrides, "key.path=value, repeatable");
  cmd->add_flag("--no-ris", c.no_ris, "Remove the surface from the scenario");
}

RunConfig load(const Common& c) {
  std::vector<std::string> overrides = c.overrides;
  if (c.seed) overrides.push_back("seed=" + std::to_string(*c.seed));
  if (c.no_ris) overrides.push_back("no_ris=true");
  return load_config(c.config, overrides);
}

int threads_of(const Common& c) {
  if (c.threads > 0) return c.threads;
  return std::max(1u, std::thread::hardware_concurrency());
}

std::ofstream open_out(RunManifest& m, const std::string& name) {
  std::ofstream f(m.dir() / name);
  if (!f) throw std::ios_base::failure("cannot write " + (m.dir() / name).string());
  m.add_output(name);
  return f;
}

RunManifest start(const Common& c, const std::string& command, const RunConfig& rc) {
  fs::create_directories(c.out);
  RunManifest m(c.out, command, rc.effective, rc.scenario.seed, threads_of(c));
  m.write_incomplete();
  return m;
}

void print_metrics(const char* label, const LinkMetrics& m) {
  std::cout << label << ": capacity " << fmt(m.capacity) << " bps/Hz, snr " << fmt(m.snr_db)
            << " dB, uncoded BER " << fmt(m.uncoded_ber) << '\n';
}

int cmd_simulate(const Common& c, bool dump_channels) {
  const RunConfig rc = load(c);
  const ScenarioConfig& sc = rc.scenario;
  RunManifest m = start(c, "simulate", rc);
  const std::uint64_t channel_seed = realization_seed(sc.seed, 0, 0);
  const ChannelSet cs = build_channels(sc, channel_seed);
  const LinkSettings link = sc.link_settings(derive_seed(channel_seed, 0xBE));
  const LinkMetrics base = measure_link_without_ris(cs, sc.baseline_includes_sm, link);
  ResultRecord rec;
  rec.scenario_id = "simulate";
  rec.seed = channel_seed;
  rec.algorithm = Algorithm::none;
  if (sc.no_ris) {
    rec.metrics = base;
  } else {
    PhaseCodeword cw = rc.codeword.value_or(PhaseCodeword{std::vector<int>(sc.ris.k(), 0)});
    rec.metrics = measure_link(cs, cw, sc.ris, link);
    rec.capacity_increase = rec.metrics.capacity - base.capacity;
    rec.power_mw = power_consumption(sc.ris);
  }
  print_metrics("link", rec.metrics);
  {
    auto f = open_out(m, "results.tsv");
    write_records(f, {rec});
  }
  if (dump_channels) {
    auto f = open_out(m, "channels.txt");
    write_channel_set(f, cs);
  }
  m.complete();
  return kOk;
}

int cmd_optimize(const Common& c, const std::string& algorithm) {
  Common cc = c;
  if (!algorithm.empty()) cc.overrides.push_back("algorithm.name=" + algorithm);
  const RunConfig rc = load(cc);
  const ScenarioConfig& sc = rc.scenario;
  if (sc.algorithm == Algorithm::none)
    throw std::invalid_argument("optimize needs an algorithm: bg, csm, mpc or exhaustive");
  if (sc.algorithm == Algorithm::mpc && sc.codebook.path.empty())
    throw std::invalid_argument(
        "mpc needs a codebook file: run 'risim codebook' and pass "
        "--override algorithm.codebook=<path>");
  if (sc.algorithm == Algorithm::exhaustive && expected_probes(sc) == 0)
    throw std::invalid_argument("exhaustive search refused: M^K = " +
                                std::to_string(sc.ris.shifter.levels) + "^" +
                                std::to_string(sc.ris.k()) + " exceeds the 65536 codeword limit");
  RunManifest m = start(c, "optimize", rc);
  const StateStudy study = run_state_study(sc, 0);
  const StateReport& r = study.report;
  print_metrics("without_ris", r.without_ris);
  print_metrics("initial", r.initial);
  print_metrics("best", r.best);
  std::cout << "diff: capacity " << fmt(r.diff.capacity) << " bps/Hz, snr " << fmt(r.diff.snr_db)
            << " dB, probes " << r.probes << '\n';
  {
    auto f = open_out(m, "report.tsv");
    write_state_report(f, r);
  }
  {
    auto f = open_out(m, "trace.tsv");
    write_trace(f, study.optimization.trace);
  }
  {
    ResultRecord rec;
    rec.scenario_id = "optimize";
    rec.seed = realization_seed(sc.seed, 0, 0);
    rec.algorithm = sc.algorithm;
    rec.probes = r.probes;
    rec.metrics = r.best;
    rec.capacity_increase = r.best.capacity - r.without_ris.capacity;
    rec.power_mw = sc.no_ris ? 0.0 : power_consumption(sc.ris);
    auto f = open_out(m, "results.tsv");
    write_records(f, {rec});
  }
  m.complete();
  return kOk;
}

int cmd_codebook(const Common& c) {
  const RunConfig rc = load(c);
  RunManifest m = start(c, "codebook", rc);
  const Codebook cb = build_codebook(rc.scenario);
  {
    auto f = open_out(m, "codebook.txt");
    write_codebook(f, cb);
  }
  std::cout << "codebook: " << cb.size() << " entries -> " << (m.dir() / "codebook.txt").string()
            << '\n';
  m.complete();
  return kOk;
}

int cmd_sweep(const Common& c) {
  const RunConfig rc = load(c);
  RunManifest m = start(c, "sweep", rc);
  const std::vector<Vec3> grid = rc.map ? rc.map->grid() : std::vector<Vec3>{};
  const std::vector<SweepCell> cells =
      rc.sweep.kind == SweepKind::gain_size
          ? gain_size_sweep(rc.scenario, rc.sweep.sizes, rc.sweep.gains_db, grid, threads_of(c))
          : algorithm_efficiency(rc.scenario, rc.sweep.algorithms, rc.sweep.sizes, grid,
                                 threads_of(c));
  {
    auto f = open_out(m, "sweep.tsv");
    write_sweep(f, cells);
  }
  {
    std::vector<ResultRecord> all;
    for (const auto& cell : cells) all.insert(all.end(), cell.samples.begin(), cell.samples.end());
    auto f = open_out(m, "samples.tsv");
    write_records(f, all);
  }
  write_sweep(std::cout, cells);
  m.complete();
  return kOk;
}

int cmd_map(const Common& c) {
  const RunConfig rc = load(c);
  if (!rc.map) throw ConfigError("map", "required field is missing for the map command");
  RunManifest m = start(c, "map", rc);
  const auto records = capacity_increase_map(rc.scenario, rc.map->grid(), threads_of(c));
  {
    auto f = open_out(m, "results.tsv");
    write_records(f, records);
  }
  std::vector<double> dc;
  for (const auto& r : records) dc.push_back(r.capacity_increase);
  std::cout << "positions: " << records.size() << ", ICDF-68 capacity increase "
            << fmt(icdf(dc).value) << " bps/Hz\n";
  m.complete();
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"risim: surface-assisted MIMO-OFDM link simulator and blind control"};
  app.require_subcommand(1);
  Common common;
  bool dump_channels = false;
  std::string algorithm;

  auto* simulate = app.add_subcommand("simulate", "Evaluate one scenario with a fixed codeword");
  add_common(simulate, common);
  simulate->add_flag("--dump-channels", dump_channels, "Also write the channel set as text");
  auto* optimize = app.add_subcommand("optimize", "Run a control algorithm and report states");
  add_common(optimize, common);
  optimize->add_option("--algorithm", algorithm, "bg | csm | mpc | exhaustive");
  auto* codebook = app.add_subcommand("codebook", "Build the direction codebook for mpc");
  add_common(codebook, common);
  auto* sweep = app.add_subcommand("sweep", "Gain/size or algorithm-efficiency sweep");
  add_common(sweep, common);
  auto* map = app.add_subcommand("map", "Capacity increase over a receiver grid");
  add_common(map, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*simulate) return cmd_simulate(common, dump_channels);
    if (*optimize) return cmd_optimize(common, algorithm);
    if (*codebook) return cmd_codebook(common);
    if (*sweep) return cmd_sweep(common);
    if (*map) return cmd_map(common);
  } catch (const ConfigError& e) {
    std::cerr << "config-error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config-error: " << e.what() << '\n';
    return kConfigError;
  } catch (const SingularCovariance& e) {
    std::cerr << "numeric-error: " << e.what() << '\n';
    return kNumericError;
  } catch (const DetectionFailure& e) {
    std::cerr << "numeric-error: " << e.what() << '\n';
    return kNumericError;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "io-error: " << e.what() << '\n';
    return kIoError;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "io-error: " << e.what() << '\n';
    return kIoError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kUsage;
}
