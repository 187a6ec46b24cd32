#pragma once

// Technology flavors and the switch-level device parameters derived from
// them. Each device is reduced to an on-resistance, a gate capacitance, an
// off-current and a threshold; base values come from flat parameter files.

#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "clachar/bundled_params.hpp"
#include "clachar/cnt_geometry.hpp"
#include "clachar/error.hpp"
#include "clachar/text.hpp"

namespace clachar {

enum class Flavor { Si, Cnt, Hybrid };
enum class DeviceKind { SiN, SiP, CntN, CntP };

inline constexpr std::array<Flavor, 3> kAllFlavors{Flavor::Si, Flavor::Cnt, Flavor::Hybrid};
inline constexpr std::array<DeviceKind, 4> kAllDeviceKinds{DeviceKind::SiN, DeviceKind::SiP,
                                                           DeviceKind::CntN, DeviceKind::CntP};

inline std::string_view to_string(Flavor f) {
  switch (f) {
    case Flavor::Si: return "si";
    case Flavor::Cnt: return "cnt";
    case Flavor::Hybrid: return "hybrid";
  }
  return "?";
}

inline std::string_view to_string(DeviceKind k) {
  switch (k) {
    case DeviceKind::SiN: return "SiN";
    case DeviceKind::SiP: return "SiP";
    case DeviceKind::CntN: return "CntN";
    case DeviceKind::CntP: return "CntP";
  }
  return "?";
}

inline Flavor parse_flavor(std::string_view s) {
  for (Flavor f : kAllFlavors) {
    if (s == to_string(f)) return f;
  }
  throw ValidationError("unknown technology '" + std::string(s) + "' (expected si, cnt or hybrid)");
}

inline std::optional<DeviceKind> parse_device_kind(std::string_view s) {
  for (DeviceKind k : kAllDeviceKinds) {
    if (s == to_string(k)) return k;
  }
  return std::nullopt;
}

inline bool is_cnt(DeviceKind k) { return k == DeviceKind::CntN || k == DeviceKind::CntP; }
inline bool is_n_type(DeviceKind k) { return k == DeviceKind::SiN || k == DeviceKind::CntN; }

/// n- and p-kind used by a flavor. Hybrid pairs silicon nMOS with p-type CNFETs.
inline DeviceKind n_kind(Flavor f) { return f == Flavor::Cnt ? DeviceKind::CntN : DeviceKind::SiN; }
inline DeviceKind p_kind(Flavor f) { return f == Flavor::Si ? DeviceKind::SiP : DeviceKind::CntP; }

inline bool kind_available(Flavor f, DeviceKind k) { return k == n_kind(f) || k == p_kind(f); }

struct TechnologyConfig {
  Flavor flavor = Flavor::Cnt;
  double vdd_v = 0.9;
  double clock_hz = 1e9;
  double channel_length_nm = 32.0;
  double t_ox_nm = 4.0;
  double k_ox = 16.0;
  double gate_width_nm = 32.0;
  int tube_count = 9;
  cnt::Chirality chirality{17, 0};
  double a_cc_nm = cnt::kDefaultCarbonBondNm;
  double l_ss_nm = 32.0;
  double l_ds_nm = 32.0;

  static TechnologyConfig defaults(Flavor f) {
    TechnologyConfig cfg;
    cfg.flavor = f;
    return cfg;
  }

  bool uses_cnt() const { return flavor != Flavor::Si; }
};

struct DeviceParams {
  DeviceKind kind;
  double v_th_v;
  double r_on_ohm;
  double c_gate_f;
  double i_off_a;

  friend bool operator==(const DeviceParams&, const DeviceParams&) = default;
};

// Gate-dielectric constant the CNT per-tube capacitances are quoted at.
inline constexpr double kReferenceKox = 16.0;

/// CNFET threshold: (sqrt(3)/3) * a * V_pi / d, a = 0.249 nm, V_pi = 3.033 V.
inline double cnfet_threshold(double diameter_nm) {
  if (!(diameter_nm > 0.0)) {
    throw ValidationError("CNFET threshold needs a positive diameter");
  }
  constexpr double kLatticeNm = 0.249;
  constexpr double kPiBondEv = 3.033;
  return std::sqrt(3.0) / 3.0 * kLatticeNm * kPiBondEv / diameter_nm;
}

// ---------------------------------------------------------------------------
// Parameter files
//
//   # comment
//   [SiN]
//   r_on_ohm = 12000
//   c_gate_f = 6e-17
//   i_off_a  = 2e-8
//   v_th_v   = 0.29        (silicon sections only)
//   [wire]
//   c_wire_f = 1.5e-17
//
// CNT sections quote r_on_ohm and c_gate_f per tube; the derivation scales
// them by the tube count.
// ---------------------------------------------------------------------------

struct KindEntry {
  double r_on_ohm = 0.0;
  double c_gate_f = 0.0;
  double i_off_a = 0.0;
  std::optional<double> v_th_v;

  friend bool operator==(const KindEntry&, const KindEntry&) = default;
};

struct ParameterSet {
  std::map<DeviceKind, KindEntry> kinds;
  double c_wire_f = 0.0;

  const KindEntry& at(DeviceKind k) const {
    auto it = kinds.find(k);
    if (it == kinds.end()) {
      throw ValidationError("parameter set has no [" + std::string(to_string(k)) + "] section");
    }
    return it->second;
  }

  friend bool operator==(const ParameterSet&, const ParameterSet&) = default;
};

inline ParameterSet parse_parameter_file(std::string_view text, std::string_view origin = "<params>") {
  ParameterSet out;
  bool have_wire = false;
  std::optional<DeviceKind> section;
  bool in_wire = false;
  std::map<DeviceKind, unsigned> seen_keys;  // bitmask r_on|c_gate|i_off|v_th

  auto fail = [&](int line_no, const std::string& msg) -> ValidationError {
    return ValidationError(std::string(origin) + ":" + std::to_string(line_no) + ": " + msg);
  };

  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = text::trim(text::strip_comment(raw));
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') throw fail(line_no, "unterminated section header");
      std::string_view name = text::trim(line.substr(1, line.size() - 2));
      if (name == "wire") {
        in_wire = true;
        section.reset();
        continue;
      }
      auto kind = parse_device_kind(name);
      if (!kind) throw fail(line_no, "unknown section [" + std::string(name) + "]");
      if (out.kinds.count(*kind)) throw fail(line_no, "duplicate section [" + std::string(name) + "]");
      out.kinds[*kind] = KindEntry{};
      section = kind;
      in_wire = false;
      continue;
    }

    auto eq = line.find('=');
    if (eq == std::string_view::npos) throw fail(line_no, "expected key = value");
    std::string key(text::trim(line.substr(0, eq)));
    std::string_view value_text = text::trim(line.substr(eq + 1));
    auto value = text::parse_double(value_text);
    if (!value) throw fail(line_no, "value for '" + key + "' is not a number");

    if (in_wire) {
      if (key != "c_wire_f") throw fail(line_no, "unknown key '" + key + "' in [wire]");
      out.c_wire_f = *value;
      have_wire = true;
      continue;
    }
    if (!section) throw fail(line_no, "key '" + key + "' outside of any section");

    KindEntry& e = out.kinds[*section];
    unsigned& mask = seen_keys[*section];
    if (key == "r_on_ohm") {
      e.r_on_ohm = *value;
      mask |= 1u;
    } else if (key == "c_gate_f") {
      e.c_gate_f = *value;
      mask |= 2u;
    } else if (key == "i_off_a") {
      e.i_off_a = *value;
      mask |= 4u;
    } else if (key == "v_th_v" && !is_cnt(*section)) {
      e.v_th_v = *value;
      mask |= 8u;
    } else {
      throw fail(line_no, "unknown key '" + key + "' in [" + std::string(to_string(*section)) + "]");
    }
  }

  for (const auto& [kind, entry] : out.kinds) {
    const unsigned need = is_cnt(kind) ? 7u : 15u;
    if ((seen_keys[kind] & need) != need) {
      throw ValidationError(std::string(origin) + ": section [" + std::string(to_string(kind)) +
                            "] is missing required keys");
    }
    if (!(entry.r_on_ohm > 0.0) || !(entry.c_gate_f > 0.0) || entry.i_off_a < 0.0) {
      throw ValidationError(std::string(origin) + ": section [" + std::string(to_string(kind)) +
                            "] needs r_on_ohm > 0, c_gate_f > 0, i_off_a >= 0");
    }
  }
  if (!have_wire || out.c_wire_f < 0.0) {
    throw ValidationError(std::string(origin) + ": missing or negative [wire] c_wire_f");
  }
  return out;
}

inline std::string_view bundled_parameter_text(Flavor f) {
  switch (f) {
    case Flavor::Si: return bundled::kSiParams;
    case Flavor::Cnt: return bundled::kCntParams;
    case Flavor::Hybrid: return bundled::kHybridParams;
  }
  return {};
}

inline std::string parameter_file_name(Flavor f) { return std::string(to_string(f)) + ".params"; }

inline ParameterSet bundled_parameters(Flavor f) {
  return parse_parameter_file(bundled_parameter_text(f), parameter_file_name(f));
}

/// Loads `<dir>/<flavor>.params`.
inline ParameterSet load_parameters(const std::filesystem::path& dir, Flavor f) {
  const auto path = dir / parameter_file_name(f);
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open parameter file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_parameter_file(buf.str(), path.string());
}

inline std::vector<std::string> validate_config(const TechnologyConfig& cfg) {
  std::vector<std::string> v;
  if (!(cfg.vdd_v > 0.0)) v.emplace_back("vdd must be positive");
  if (!(cfg.clock_hz > 0.0)) v.emplace_back("clock frequency must be positive");
  if (!(cfg.channel_length_nm > 0.0)) v.emplace_back("channel length must be positive");
  if (!(cfg.t_ox_nm > 0.0)) v.emplace_back("oxide thickness must be positive");
  if (!(cfg.k_ox > 0.0)) v.emplace_back("dielectric constant must be positive");
  if (!(cfg.a_cc_nm > 0.0)) v.emplace_back("carbon bond length must be positive");
  if (!cfg.uses_cnt()) return v;

  if (!(cfg.l_ss_nm > 0.0) || !(cfg.l_ds_nm > 0.0)) {
    v.emplace_back("source/drain extension lengths must be positive");
  }
  const auto cls = cnt::classify_electronic(cfg.chirality);
  if (cls != cnt::ElectronicClass::Semiconducting) {
    v.push_back("chirality is " + std::string(cnt::to_string(cls)) + ", not Semiconducting");
  }
  if (cfg.a_cc_nm > 0.0) {
    const double d = cnt::diameter(cfg.chirality, cfg.a_cc_nm);
    if (cfg.tube_count < 2) {
      v.push_back("pitch undefined: tube_count must be >= 2 (got " + std::to_string(cfg.tube_count) + ")");
    } else if (!(cfg.gate_width_nm > d)) {
      v.emplace_back("pitch non-positive: gate width does not exceed tube diameter");
    }
    if (cfg.vdd_v > 0.0 && !(cnfet_threshold(d) < cfg.vdd_v)) {
      v.emplace_back("CNFET threshold is not below vdd");
    }
  }
  return v;
}

inline void require_valid(const TechnologyConfig& cfg) {
  auto v = validate_config(cfg);
  if (v.empty()) return;
  std::string msg = "invalid technology config:";
  for (const auto& s : v) msg += "\n  " + s;
  throw ValidationError(msg);
}

inline DeviceParams derive_device_params(const TechnologyConfig& cfg, DeviceKind kind,
                                         const ParameterSet& params) {
  if (cfg.flavor == Flavor::Hybrid && !kind_available(cfg.flavor, kind)) {
    throw ValidationError(std::string(to_string(kind)) + ": kind not available in hybrid flavor");
  }
  if (!kind_available(cfg.flavor, kind)) {
    throw ValidationError(std::string(to_string(kind)) + ": kind not available in " +
                          std::string(to_string(cfg.flavor)) + " flavor");
  }
  require_valid(cfg);
  const KindEntry& e = params.at(kind);
  DeviceParams d{kind, 0.0, e.r_on_ohm, e.c_gate_f, e.i_off_a};
  if (is_cnt(kind)) {
    const double tubes = cfg.tube_count;
    d.r_on_ohm = e.r_on_ohm / tubes;
    // Higher-k gate stacks lower the switched capacitance per tube.
    d.c_gate_f = e.c_gate_f * tubes * (kReferenceKox / cfg.k_ox);
    d.v_th_v = cnfet_threshold(cnt::diameter(cfg.chirality, cfg.a_cc_nm));
  } else {
    d.v_th_v = *e.v_th_v;
  }
  if (!(d.v_th_v < cfg.vdd_v)) {
    throw ValidationError(std::string(to_string(kind)) + ": threshold is not below vdd");
  }
  return d;
}

inline DeviceParams derive_device_params(const TechnologyConfig& cfg, DeviceKind kind) {
  return derive_device_params(cfg, kind, bundled_parameters(cfg.flavor));
}

}  // namespace clachar
