// SPDX-License-Identifier: Apache-2.0
#include "risim/io.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <ostream>
#include <sstream>

namespace risim {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

void write_records(std::ostream& os, const std::vector<ResultRecord>& records) {
  os << "scenario_id\tseed\talgorithm\tprobes\tcapacity\tsnr_db\tber\tdelta_c\tpower_mw\n";
  for (const auto& r : records)
    os << r.scenario_id << '\t' << r.seed << '\t' << to_string(r.algorithm) << '\t' << r.probes
       << '\t' << fmt(r.metrics.capacity) << '\t' << fmt(r.metrics.snr_db) << '\t'
       << fmt(r.metrics.uncoded_ber) << '\t' << fmt(r.capacity_increase) << '\t' << fmt(r.power_mw)
       << '\n';
}

void write_sweep(std::ostream& os, const std::vector<SweepCell>& cells) {
  os << "size\tmode\tgain_db\talgorithm\tprobes\tlog4_probes\ticdf68_delta_c\tmean_capacity\tpower_mw\n";
  for (const auto& c : cells)
    os << c.size.rows << 'x' << c.size.cols << '\t'
       << (c.size.mode == RisMode::active ? "active" : "passive") << '\t' << fmt(c.gain_db) << '\t'
       << to_string(c.algorithm) << '\t' << c.probes << '\t'
       << fmt(std::log(static_cast<double>(c.probes)) / std::log(4.0)) << '\t'
       << fmt(c.icdf_delta_c) << '\t' << fmt(c.mean_capacity) << '\t' << fmt(c.power_mw) << '\n';
}

void write_state_report(std::ostream& os, const StateReport& r) {
  os << "state\tsnr_db\tcapacity\tuncoded_ber\n";
  auto row = [&](const char* name, const LinkMetrics& m) {
    os << name << '\t' << fmt(m.snr_db) << '\t' << fmt(m.capacity) << '\t' << fmt(m.uncoded_ber)
       << '\n';
  };
  row("without_ris", r.without_ris);
  row("initial", r.initial);
  row("best", r.best);
  row("worst", r.worst);
  os << "diff\t" << fmt(r.diff.snr_db) << '\t' << fmt(r.diff.capacity) << '\t'
     << fmt(r.diff.uncoded_ber) << '\n';
}

std::string utc_timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

RunManifest::RunManifest(std::filesystem::path dir, std::string command, nlohmann::json config,
                         std::uint64_t seed, int threads)
    : dir_(std::move(dir)),
      command_(std::move(command)),
      config_(std::move(config)),
      seed_(seed),
      threads_(threads),
      started_(utc_timestamp()) {}

void RunManifest::complete() {
  finished_ = utc_timestamp();
  write("complete");
}

void RunManifest::write(const std::string& status) const {
  nlohmann::json m;
  m["tool"] = "risim";
  m["version"] = RISIM_VERSION;
  m["command"] = command_;
  m["status"] = status;
  m["seed"] = seed_;
  m["threads"] = threads_;
  m["started"] = started_;
  m["finished"] = finished_.empty() ? nlohmann::json() : nlohmann::json(finished_);
  m["outputs"] = outputs_;
  m["config"] = config_;
  const auto tmp = dir_ / "manifest.json.tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw std::ios_base::failure("cannot write " + tmp.string());
    out << m.dump(2) << '\n';
  }
  std::filesystem::rename(tmp, dir_ / "manifest.json");
}

}  // namespace risim
