// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "risim/harness.hpp"

namespace risim {

/// Full-precision decimal rendering used by every output file.
std::string fmt(double v);

/// Tab-separated, header first:
/// scenario_id seed algorithm probes capacity snr_db ber delta_c power_mw
void write_records(std::ostream& os, const std::vector<ResultRecord>& records);

/// size mode gain_db algorithm probes log4_probes icdf68_delta_c mean_capacity power_mw
void write_sweep(std::ostream& os, const std::vector<SweepCell>& cells);

/// state snr_db capacity uncoded_ber, rows without_ris initial best worst diff.
void write_state_report(std::ostream& os, const StateReport& report);

/// Manifest written next to every command's outputs. Created with status
/// "incomplete" and rewritten as "complete" once all outputs are closed.
class RunManifest {
 public:
  RunManifest(std::filesystem::path dir, std::string command, nlohmann::json config,
              std::uint64_t seed, int threads);

  void add_output(const std::string& name) { outputs_.push_back(name); }
  void write_incomplete() const { write("incomplete"); }
  void complete();

  const std::filesystem::path& dir() const { return dir_; }

 private:
  void write(const std::string& status) const;

  std::filesystem::path dir_;
  std::string command_;
  nlohmann::json config_;
  std::uint64_t seed_;
  int threads_;
  std::string started_;
  std::string finished_;
  std::vector<std::string> outputs_;
};

std::string utc_timestamp();

}  // namespace risim
