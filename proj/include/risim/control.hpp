// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <vector>

#include "risim/channel.hpp"
#include "risim/link.hpp"
#include "risim/random.hpp"
#include "risim/ris_model.hpp"

namespace risim {

struct ProbeRecord {
  std::uint64_t index = 0;
  PhaseCodeword codeword;
  double value = 0.0;
};

using ProbeTrace = std::vector<ProbeRecord>;

/// Channel-blind evaluator. Control algorithms see the channel only through
/// evaluate(); every call is one probe and is appended to the trace.
class ProbeOracle {
 public:
  using Objective = std::function<double(const PhaseCodeword&)>;

  ProbeOracle(int k, int levels, Objective objective);

  double evaluate(const PhaseCodeword& codeword);

  std::uint64_t probe_count() const { return trace_.size(); }
  const ProbeTrace& trace() const { return trace_; }
  int k() const { return k_; }
  int levels() const { return levels_; }

 private:
  int k_;
  int levels_;
  Objective objective_;
  ProbeTrace trace_;
};

enum class ObjectiveKind { capacity, snr };

/// Mean-over-subcarriers capacity or linear SNR of the whitened channel.
///
/// Phi has constant modulus, so R_v = sigma_v^2 |Phi|^2 H_r H_r^H does not
/// depend on the codeword; the whitener is computed once per subcarrier.
class LinkObjective {
 public:
  LinkObjective(std::shared_ptr<const ChannelSet> cs, RisArrayConfig ris, NoiseSpec noise,
                ObjectiveKind kind);

  double operator()(const PhaseCodeword& codeword) const;

  /// Channel access outside of evaluation; counted so tests can assert that
  /// control algorithms never reach for it.
  const ChannelSet& channel_set() const;
  std::uint64_t channel_accesses() const { return *accesses_; }

  ProbeOracle make_oracle() const;

 private:
  struct Subcarrier {
    Cmat base;   ///< W (H_los + H_sm)
    Cmat am_r;   ///< W H_r
    Cmat am_t;   ///< H_t
  };

  std::shared_ptr<const ChannelSet> cs_;
  RisArrayConfig ris_;
  ObjectiveKind kind_;
  std::vector<Subcarrier> sub_;
  std::shared_ptr<std::uint64_t> accesses_;
};

struct OptimizationResult {
  PhaseCodeword best_codeword;
  double best_value = 0.0;
  PhaseCodeword worst_codeword;
  double worst_value = 0.0;
  PhaseCodeword initial_codeword;
  double initial_value = 0.0;
  /// The codeword the algorithm itself constructs (differs from
  /// best_codeword only for CSM, whose samples may outscore it).
  PhaseCodeword final_codeword;
  double final_value = 0.0;
  std::uint64_t probe_count = 0;
  ProbeTrace trace;
};

struct SampleResult {
  PhaseCodeword codeword;
  double value = 0.0;
};

/// Default random-max sample count: max(16, K).
int default_rms_samples(int k);

/// Random-max sampling: probe `samples` uniform codewords, keep the first
/// maximum.
SampleResult rms(ProbeOracle& oracle, int samples, const RisArrayConfig& cfg, Rng& rng);

/// One ascending pass over the K shifters, probing all M phases of each with
/// the others held at the incumbent. Exactly K * M probes.
OptimizationResult greedy_search(ProbeOracle& oracle, const PhaseCodeword& init,
                                 const RisArrayConfig& cfg);

/// Blind greedy: rms followed by greedy_search. samples + K * M probes.
OptimizationResult bg(ProbeOracle& oracle, int samples, const RisArrayConfig& cfg, Rng& rng);

enum class CsmBasis { k, k_ris };

/// 8 x (K or K_ris).
int default_csm_samples(const RisArrayConfig& cfg, CsmBasis basis = CsmBasis::k);

/// Conditional sample mean: each shifter takes the phase whose conditional
/// mean objective over `samples` uniform probes is largest. samples + 1 probes.
OptimizationResult csm(ProbeOracle& oracle, const RisArrayConfig& cfg, Rng& rng, int samples);

/// Probe every codeword. Refused above `limit` candidates.
OptimizationResult exhaustive_search(ProbeOracle& oracle, const RisArrayConfig& cfg,
                                     std::uint64_t limit = 1 << 16);

struct CodebookEntry {
  double angle_deg = 0.0;
  PhaseCodeword codeword;
};

using Codebook = std::vector<CodebookEntry>;

/// 0 to 180 degrees inclusive in `step_deg` steps (37 entries at 5 degrees).
std::vector<double> half_circle_angles(double step_deg = 5.0);

/// Builds a SISO channel set with the receiver at the given angle.
using SisoScenarioFactory = std::function<ChannelSet(double angle_deg)>;

/// For each angle, run bg against the SISO SNR objective and keep the winner.
Codebook mpc_build_codebook(const SisoScenarioFactory& factory, const std::vector<double>& angles,
                            const RisArrayConfig& cfg, const NoiseSpec& noise, int rms_samples,
                            std::uint64_t seed);

/// Probe every codebook entry; return the best. |codebook| probes.
OptimizationResult mpc_select(ProbeOracle& oracle, const Codebook& codebook);

/// One line per entry: angle_deg TAB comma-separated phase indices.
void write_codebook(std::ostream& os, const Codebook& cb);
Codebook read_codebook(std::istream& is);

/// Header line then one line per probe: index TAB codeword TAB value.
void write_trace(std::ostream& os, const ProbeTrace& trace);

std::string format_codeword(const PhaseCodeword& c);
PhaseCodeword parse_codeword(const std::string& s);

}  // namespace risim
