// SPDX-License-Identifier: Apache-2.0
#include "risim/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace risim {

using nlohmann::json;

namespace {

/// Cursor over one JSON object that remembers which keys were consumed.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(display(), "expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key) && !j_.at(key).is_null(); }

  template <typename T>
  T get(const std::string& key, T fallback) {
    used_.insert(key);
    if (!has(key)) return fallback;
    return convert<T>(j_.at(key), field(key));
  }

  template <typename T>
  T require(const std::string& key) {
    used_.insert(key);
    if (!has(key)) throw ConfigError(field(key), "required field is missing");
    return convert<T>(j_.at(key), field(key));
  }

  std::optional<Reader> sub(const std::string& key) {
    used_.insert(key);
    if (!has(key)) return std::nullopt;
    return Reader(j_.at(key), field(key));
  }

  Reader require_sub(const std::string& key) {
    used_.insert(key);
    if (!has(key)) throw ConfigError(field(key), "required field is missing");
    return Reader(j_.at(key), field(key));
  }

  void touch(const std::string& key) { used_.insert(key); }

  const json& raw(const std::string& key) {
    used_.insert(key);
    return j_.at(key);
  }

  void finish() const {
    for (const auto& item : j_.items())
      if (!used_.count(item.key())) throw ConfigError(field(item.key()), "unknown key");
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

 private:
  std::string display() const { return path_.empty() ? "<root>" : path_; }

  template <typename T>
  static T convert(const json& v, const std::string& where) {
    try {
      if constexpr (std::is_same_v<T, Vec3>) {
        if (!v.is_array() || v.size() != 3) throw ConfigError(where, "expected [x, y, z]");
        return Vec3(v[0].get<double>(), v[1].get<double>(), v[2].get<double>());
      } else if constexpr (std::is_same_v<T, int> || std::is_same_v<T, std::uint64_t>) {
        if (!v.is_number_integer()) throw ConfigError(where, "expected an integer");
        if constexpr (std::is_same_v<T, std::uint64_t>)
          if (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0)
            throw ConfigError(where, "expected a non-negative integer");
        return v.get<T>();
      } else if constexpr (std::is_same_v<T, double>) {
        if (!v.is_number()) throw ConfigError(where, "expected a number");
        return v.get<double>();
      } else {
        return v.get<T>();
      }
    } catch (const json::exception& e) {
      throw ConfigError(where, std::string("type error: ") + e.what());
    }
  }

  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

ArraySize parse_size(const json& v, const std::string& where, RisMode mode) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number_integer() || !v[1].is_number_integer())
    throw ConfigError(where, "expected [rows, cols]");
  return {v[0].get<int>(), v[1].get<int>(), mode};
}

void parse_array(Reader r, LinearArraySpec& a) {
  a.position = r.get("position", a.position);
  a.antennas = r.get("antennas", a.antennas);
  a.axis = r.get("axis", a.axis);
  r.finish();
}

template <typename Fn>
auto wrap(const std::string& where, Fn&& fn) {
  try {
    return fn();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(where, e.what());
  }
}

}  // namespace

RunConfig parse_config(const json& j) {
  RunConfig out;
  ScenarioConfig& sc = out.scenario;
  Reader root(j, "");
  sc.seed = root.require<std::uint64_t>("seed");
  sc.trials = root.get("trials", sc.trials);
  if (auto r = root.sub("tx")) parse_array(*r, sc.tx);
  if (auto r = root.sub("rx")) parse_array(*r, sc.rx);

  {
    Reader r = root.require_sub("ris");
    const std::string mode = r.require<std::string>("mode");
    if (mode == "active") sc.ris.mode = RisMode::active;
    else if (mode == "passive") sc.ris.mode = RisMode::passive;
    else throw ConfigError(r.field("mode"), "expected 'active' or 'passive'");
    sc.placement.rows = r.require<int>("rows");
    sc.placement.cols = r.require<int>("cols");
    sc.ris.n_d = r.get("n_d", 1);
    sc.ris.shifter.levels = r.get("phase_levels", sc.ris.shifter.levels);
    sc.ris.amp.gain_db = r.get("gain_db", sc.ris.amp.gain_db);
    sc.ris.splitter_loss_db = r.get("splitter_loss_db", 0.0);
    sc.ris.shifter.insertion_loss_db = r.get("insertion_loss_db", 0.0);
    sc.ris.amp.p_ref_mw = r.get("p_ref_mw", sc.ris.amp.p_ref_mw);
    sc.ris.amp.g_ref_db = r.get("g_ref_db", sc.ris.amp.g_ref_db);
    sc.ris.p_dps_mw = r.get("p_dps_mw", sc.ris.p_dps_mw);
    sc.ris.element_spacing = r.get("element_spacing", 0.0);
    sc.placement.position = r.get("position", sc.placement.position);
    sc.placement.normal = r.get("normal", sc.placement.normal);
    r.finish();
  }

  if (auto r = root.sub("environment")) {
    sc.los_blocked = r->get("los_blocked", sc.los_blocked);
    sc.sm_gain_db = r->get("sm_gain_db", sc.sm_gain_db);
    if (auto s = r->sub("scatterers")) {
      sc.scatterers.count = s->get("count", sc.scatterers.count);
      sc.scatterers.gain_db = s->get("gain_db", sc.scatterers.gain_db);
      sc.scatterers.region_min = s->get("region_min", sc.scatterers.region_min);
      sc.scatterers.region_max = s->get("region_max", sc.scatterers.region_max);
      if (s->has("fixed")) {
        const json& list = s->raw("fixed");
        const std::string where = s->field("fixed");
        if (!list.is_array()) throw ConfigError(where, "expected a list");
        for (std::size_t i = 0; i < list.size(); ++i) {
          Reader e(list[i], where + "[" + std::to_string(i) + "]");
          sc.scatterers.fixed.push_back(
              {e.require<Vec3>("position"), e.get("gain_db", sc.scatterers.gain_db)});
          e.finish();
        }
      } else {
        s->touch("fixed");
      }
      s->finish();
    }
    r->finish();
  }

  if (auto r = root.sub("ofdm")) {
    sc.ofdm.n_sc = r->get("subcarriers", sc.ofdm.n_sc);
    sc.ofdm.scs = r->get("spacing_hz", sc.ofdm.scs);
    sc.ofdm.center = r->get("center_hz", sc.ofdm.center);
    sc.ofdm.max_bandwidth = r->get("bandwidth_hz", sc.ofdm.max_bandwidth);
    r->finish();
  }

  {
    Reader r = root.require_sub("noise");
    sc.noise.sigma_z2 = r.require<double>("sigma_z2");
    // Surface noise defaults to the receiver noise level.
    sc.noise.sigma_v2 = r.get("sigma_v2", sc.noise.sigma_z2);
    r.finish();
  }

  if (auto r = root.sub("link")) {
    sc.qam_order = r->get("qam", sc.qam_order);
    sc.n_frames = r->get("frames", sc.n_frames);
    const std::string obj = r->get<std::string>("objective", "capacity");
    if (obj == "capacity") sc.objective = ObjectiveKind::capacity;
    else if (obj == "snr") sc.objective = ObjectiveKind::snr;
    else throw ConfigError(r->field("objective"), "expected 'capacity' or 'snr'");
    sc.baseline_includes_sm = r->get("baseline_includes_sm", sc.baseline_includes_sm);
    r->finish();
  }

  if (auto r = root.sub("algorithm")) {
    const std::string name = r->get<std::string>("name", "bg");
    sc.algorithm = wrap(r->field("name"), [&] { return parse_algorithm(name); });
    sc.rms_samples = r->get("rms_samples", 0);
    sc.csm_samples = r->get("csm_samples", 0);
    const std::string basis = r->get<std::string>("csm_basis", "K");
    if (basis == "K") sc.csm_basis = CsmBasis::k;
    else if (basis == "K_ris") sc.csm_basis = CsmBasis::k_ris;
    else throw ConfigError(r->field("csm_basis"), "expected 'K' or 'K_ris'");
    sc.codebook.path = r->get<std::string>("codebook", "");
    sc.codebook.radius_m = r->get("codebook_radius_m", sc.codebook.radius_m);
    sc.codebook.step_deg = r->get("codebook_step_deg", sc.codebook.step_deg);
    r->finish();
  }

  if (root.has("gain_budget_db")) sc.gain_budget_db = root.get("gain_budget_db", 0.0);
  root.touch("gain_budget_db");
  sc.no_ris = root.get("no_ris", false);

  if (auto r = root.sub("sweep")) {
    SweepSpec& sw = out.sweep;
    const std::string kind = r->get<std::string>("kind", "gain-size");
    if (kind == "gain-size") sw.kind = SweepKind::gain_size;
    else if (kind == "efficiency") sw.kind = SweepKind::efficiency;
    else throw ConfigError(r->field("kind"), "expected 'gain-size' or 'efficiency'");
    auto sizes = [&](const std::string& key, RisMode mode) {
      std::vector<ArraySize> v;
      r->touch(key);
      if (!r->has(key)) return v;
      const json& list = r->raw(key);
      if (!list.is_array()) throw ConfigError(r->field(key), "expected a list");
      for (std::size_t i = 0; i < list.size(); ++i)
        v.push_back(parse_size(list[i], r->field(key) + "[" + std::to_string(i) + "]", mode));
      return v;
    };
    if (r->has("sizes") || r->has("passive_sizes")) {
      sw.sizes = sizes("sizes", RisMode::active);
      auto passive = sizes("passive_sizes", RisMode::passive);
      sw.sizes.insert(sw.sizes.end(), passive.begin(), passive.end());
    } else {
      r->touch("sizes");
      r->touch("passive_sizes");
    }
    sw.gains_db = r->get("gains_db", sw.gains_db);
    if (r->has("algorithms")) {
      sw.algorithms.clear();
      for (const auto& name : r->get<std::vector<std::string>>("algorithms", {}))
        sw.algorithms.push_back(wrap(r->field("algorithms"), [&] { return parse_algorithm(name); }));
    } else {
      r->touch("algorithms");
    }
    r->finish();
  }

  if (auto r = root.sub("map")) {
    MapSpec m;
    m.min = r->get("min", m.min);
    m.max = r->get("max", m.max);
    m.nx = r->get("nx", m.nx);
    m.ny = r->get("ny", m.ny);
    if (m.nx < 1 || m.ny < 1) throw ConfigError(r->field("nx"), "grid needs nx, ny >= 1");
    r->finish();
    out.map = m;
  }

  if (root.has("codeword")) {
    const json& c = root.raw("codeword");
    if (!c.is_array()) throw ConfigError("codeword", "expected a list of phase indices");
    PhaseCodeword cw;
    for (const auto& v : c) {
      if (!v.is_number_integer()) throw ConfigError("codeword", "expected integers");
      cw.indices.push_back(v.get<int>());
    }
    out.codeword = cw;
  } else {
    root.touch("codeword");
  }
  root.finish();

  wrap("noise", [&] {
    sc.noise.validate();
    return 0;
  });
  wrap("ofdm", [&] {
    sc.ofdm.validate();
    return 0;
  });
  wrap("ris", [&] {
    sc.normalize();
    return 0;
  });
  if (out.codeword) wrap("codeword", [&] {
      check_codeword(*out.codeword, sc.ris);
      return 0;
    });
  out.effective = j;
  return out;
}

void apply_override(json& j, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigError(assignment, "override must look like key.path=value");
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;
  json* node = &j;
  std::stringstream ss(key);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(ss, part, '.')) parts.push_back(part);
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    if (!node->contains(parts[i]) || !(*node)[parts[i]].is_object()) (*node)[parts[i]] = json::object();
    node = &(*node)[parts[i]];
  }
  (*node)[parts.back()] = value;
}

RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open config file " + path);
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw ConfigError("<root>", "config is not valid JSON");
  for (const auto& o : overrides) apply_override(j, o);
  return parse_config(j);
}

}  // namespace risim
