#pragma once

// Command-line front end. Everything here is callable from tests; the
// executable in tools/ only forwards argv to run_cli().
//
//   clachar cnt-info [--n 17] [--m 0] [--a-cc 0.142] [--gate-width 32] [--tubes 9]
//   clachar run [--bits 8,16,32,64] [--style domino,np] [--tech si,cnt,hybrid]
//               [--clock-hz 1e9] [--vdd 0.9] [--vectors 64] [--seed 0xC1A]
//               [--out results.csv] [--params-dir DIR] [--check-trends]
//               [--export-netlist FILE] [--config FILE]
//
// Run settings merge with precedence command line > config file > defaults.
// The config file is flat `key = value` text using the long flag names
// without dashes (clock-hz or clock_hz). Exit codes: 0 success,
// 1 validation error, 2 simulation error, 3 trend-check failure.

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "clachar/characterizer.hpp"
#include "clachar/cnt_geometry.hpp"
#include "clachar/dynamic_mapper.hpp"
#include "clachar/error.hpp"
#include "clachar/tech_models.hpp"
#include "clachar/text.hpp"

namespace clachar::cli {

enum ExitCode : int { kOk = 0, kValidation = 1, kSimulation = 2, kTrend = 3 };

inline std::string fixed3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

// ---------------------------------------------------------------------------
// cnt-info
// ---------------------------------------------------------------------------

struct CntInfoArgs {
  int n = 17;
  int m = 0;
  double a_cc_nm = cnt::kDefaultCarbonBondNm;
  double gate_width_nm = 32.0;
  int tube_count = 9;
};

/// Geometry table for one tube. Geometry errors propagate as ValidationError.
inline std::string cmd_cnt_info(const CntInfoArgs& a) {
  const cnt::Chirality ch(a.n, a.m);
  const auto geo = cnt::geometry(ch, a.a_cc_nm);
  const double p = cnt::pitch(a.gate_width_nm, geo.diameter_nm, a.tube_count);

  std::ostringstream os;
  auto row = [&](const char* k, const std::string& v) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%-22s %s\n", k, v.c_str());
    os << buf;
  };
  row("Chirality", to_string(ch));
  row("Diameter (nm)", fixed3(geo.diameter_nm));
  row("Circumference (nm)", fixed3(geo.circumference_nm));
  row("Chiral angle (deg)", fixed3(geo.chiral_angle_deg));
  row("Structure", std::string(cnt::to_string(geo.structure_class)));
  row("Electronic class", std::string(cnt::to_string(geo.electronic_class)));
  row("Pitch (nm)", fixed3(p));
  row("CNFET V_th (V)", fixed3(cnfet_threshold(geo.diameter_nm)));
  if (geo.electronic_class != cnt::ElectronicClass::Semiconducting) {
    os << "warning: " << to_string(ch) << " is " << cnt::to_string(geo.electronic_class)
       << ", not usable as FET channel\n";
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// run
// ---------------------------------------------------------------------------

struct RunConfig {
  std::vector<int> bits{8, 16, 32, 64};
  std::vector<Style> styles{Style::Domino, Style::Np};
  std::vector<Flavor> techs{Flavor::Si, Flavor::Cnt, Flavor::Hybrid};
  double clock_hz = 1e9;
  double vdd_v = 0.9;
  int vectors = 64;
  std::uint64_t seed = 0xC1A;
  std::string out = "results.csv";
  std::optional<std::string> params_dir;
  bool check_trends = false;
  std::optional<std::string> export_netlist;
};

inline const std::vector<std::string>& run_keys() {
  static const std::vector<std::string> keys{"bits", "style", "tech", "clock-hz", "vdd", "vectors", "seed",
                                             "out", "params-dir", "check-trends", "export-netlist"};
  return keys;
}

inline std::string normalize_key(std::string k) {
  for (char& c : k) {
    if (c == '_') c = '-';
  }
  return k;
}

inline bool parse_bool(std::string_view key, std::string_view v) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw ValidationError(std::string(key) + ": expected a boolean, got '" + std::string(v) + "'");
}

inline void apply_setting(RunConfig& rc, const std::string& key, const std::string& value) {
  auto list = [&] {
    std::vector<std::string> items;
    for (auto part : text::split(value, ',')) {
      auto t = text::trim(part);
      if (t.empty()) throw ValidationError(key + ": empty list element");
      items.emplace_back(t);
    }
    return items;
  };
  auto real = [&] {
    auto v = text::parse_double(value);
    if (!v) throw ValidationError(key + ": expected a number, got '" + value + "'");
    return *v;
  };

  if (key == "bits") {
    rc.bits.clear();
    for (const auto& s : list()) {
      auto b = text::parse_int(s);
      if (!b || !is_supported_width(static_cast<int>(*b))) {
        throw ValidationError("bits: unsupported width '" + s + "' (expected 8, 16, 32 or 64)");
      }
      rc.bits.push_back(static_cast<int>(*b));
    }
  } else if (key == "style") {
    rc.styles.clear();
    for (const auto& s : list()) rc.styles.push_back(parse_style(s));
  } else if (key == "tech") {
    rc.techs.clear();
    for (const auto& s : list()) rc.techs.push_back(parse_flavor(s));
  } else if (key == "clock-hz") {
    rc.clock_hz = real();
    if (!(rc.clock_hz > 0.0)) throw ValidationError("clock-hz must be positive");
  } else if (key == "vdd") {
    rc.vdd_v = real();
    if (!(rc.vdd_v > 0.0)) throw ValidationError("vdd must be positive");
  } else if (key == "vectors") {
    auto v = text::parse_int(value);
    if (!v || *v < 0) throw ValidationError("vectors: expected a non-negative integer");
    rc.vectors = static_cast<int>(*v);
  } else if (key == "seed") {
    auto v = text::parse_int(value);
    if (!v || *v < 0) throw ValidationError("seed: expected a non-negative integer");
    rc.seed = static_cast<std::uint64_t>(*v);
  } else if (key == "out") {
    rc.out = value;
  } else if (key == "params-dir") {
    rc.params_dir = value;
  } else if (key == "check-trends") {
    rc.check_trends = parse_bool(key, value);
  } else if (key == "export-netlist") {
    rc.export_netlist = value;
  } else {
    throw ValidationError("unknown setting '" + key + "'");
  }
}

/// Flat `key = value` file; '#' starts a comment.
inline std::map<std::string, std::string> parse_config_text(std::string_view text_in, std::string_view origin) {
  std::map<std::string, std::string> kv;
  std::istringstream in{std::string(text_in)};
  std::string raw;
  int line_no = 0;
  const auto& keys = run_keys();
  while (std::getline(in, raw)) {
    ++line_no;
    auto line = text::trim(text::strip_comment(raw));
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ValidationError(std::string(origin) + ":" + std::to_string(line_no) + ": expected key = value");
    }
    std::string key = normalize_key(std::string(text::trim(line.substr(0, eq))));
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      throw ValidationError(std::string(origin) + ":" + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
    kv[key] = std::string(text::trim(line.substr(eq + 1)));
  }
  return kv;
}

inline std::map<std::string, std::string> load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path);
}

/// Defaults, then file settings, then command-line settings; params-dir
/// falls back to CLACHAR_PARAMS_DIR when neither sets it.
inline RunConfig merge_run_config(const std::map<std::string, std::string>& file,
                                  const std::map<std::string, std::string>& cli) {
  RunConfig rc;
  std::map<std::string, std::string> merged = file;
  for (const auto& [k, v] : cli) merged[k] = v;
  for (const auto& [k, v] : merged) apply_setting(rc, k, v);
  if (!rc.params_dir) {
    if (const char* env = std::getenv("CLACHAR_PARAMS_DIR"); env != nullptr && *env != '\0') rc.params_dir = env;
  }
  return rc;
}

inline SweepConfig to_sweep_config(const RunConfig& rc) {
  SweepConfig s;
  s.bits = rc.bits;
  s.styles = rc.styles;
  s.techs = rc.techs;
  s.vdd_v = rc.vdd_v;
  s.clock_hz = rc.clock_hz;
  s.random_vectors = rc.vectors;
  s.seed = rc.seed;
  if (rc.params_dir) s.params_dir = std::filesystem::path(*rc.params_dir);
  return s;
}

inline std::string_view column_title(Flavor f) {
  switch (f) {
    case Flavor::Si: return "Silicon";
    case Flavor::Cnt: return "Carbon";
    case Flavor::Hybrid: return "Hybrid";
  }
  return "?";
}

inline std::string_view style_title(Style s) { return s == Style::Np ? "NP dynamic" : "Domino"; }

/// Side-by-side comparison per (style, bit width), one column per technology
/// in the order the records first mention them.
inline std::string render_table(const std::vector<MetricsRecord>& rows) {
  std::vector<int> widths;
  std::vector<Style> styles;
  std::vector<Flavor> techs;
  for (const auto& r : rows) {
    if (std::find(widths.begin(), widths.end(), r.bits) == widths.end()) widths.push_back(r.bits);
    if (std::find(styles.begin(), styles.end(), r.style) == styles.end()) styles.push_back(r.style);
    if (std::find(techs.begin(), techs.end(), r.tech) == techs.end()) techs.push_back(r.tech);
  }
  auto find = [&](int b, Style s, Flavor t) -> const MetricsRecord* {
    for (const auto& r : rows) {
      if (r.bits == b && r.style == s && r.tech == t) return &r;
    }
    return nullptr;
  };

  struct Metric {
    const char* name;
    double (*get)(const MetricsRecord&);
  };
  static const Metric metrics[] = {
      {"Total power dissipation (W)", [](const MetricsRecord& r) { return r.total_power_w; }},
      {"Average power consumption (W)", [](const MetricsRecord& r) { return r.avg_power_w; }},
      {"Propagation delay (s)", [](const MetricsRecord& r) { return r.tpd_s; }},
      {"Power-delay product (J)", [](const MetricsRecord& r) { return r.pdp_j(); }},
  };

  std::ostringstream os;
  char buf[64];
  bool first = true;
  for (Style s : styles) {
    for (int b : widths) {
      if (!first) os << '\n';
      first = false;
      os << style_title(s) << " CLA, " << b << "-bit\n";
      std::snprintf(buf, sizeof buf, "%-31s", "Parameter");
      os << buf;
      for (Flavor t : techs) {
        std::snprintf(buf, sizeof buf, " %13s", std::string(column_title(t)).c_str());
        os << buf;
      }
      os << '\n';
      for (const auto& m : metrics) {
        std::snprintf(buf, sizeof buf, "%-31s", m.name);
        os << buf;
        for (Flavor t : techs) {
          const MetricsRecord* r = find(b, s, t);
          std::string cell = r == nullptr ? "-" : !r->ok() ? "error" : sci6(m.get(*r));
          std::snprintf(buf, sizeof buf, " %13s", cell.c_str());
          os << buf;
        }
        os << '\n';
      }
    }
  }
  return os.str();
}

inline void write_text_file(const std::string& path, const std::string& content, std::ostream& out) {
  if (path == "-") {
    out << content;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ValidationError("cannot write " + path);
  f << content;
  if (!f) throw ValidationError("write failed: " + path);
}

/// Netlist text for the single (bits, style, tech) cell of `rc`.
inline std::string cmd_export_netlist(const RunConfig& rc) {
  if (rc.bits.size() != 1 || rc.styles.size() != 1 || rc.techs.size() != 1) {
    throw ValidationError("--export-netlist needs exactly one --bits, --style and --tech value");
  }
  TechnologyConfig tech = TechnologyConfig::defaults(rc.techs[0]);
  tech.vdd_v = rc.vdd_v;
  tech.clock_hz = rc.clock_hz;
  const ParameterSet params = rc.params_dir ? load_parameters(*rc.params_dir, tech.flavor)
                                            : bundled_parameters(tech.flavor);
  return to_text(map_network(build_cla(rc.bits[0]), rc.styles[0], tech, params));
}

/// Sweep, CSV, table and optional trend gate. Returns the process exit code.
inline int cmd_run(const RunConfig& rc, std::ostream& out, std::ostream& err) {
  if (rc.export_netlist) {
    write_text_file(*rc.export_netlist, cmd_export_netlist(rc), out);
    return kOk;
  }
  const auto rows = sweep(to_sweep_config(rc));
  write_text_file(rc.out, to_csv(rows), out);
  out << render_table(rows);

  bool failed_cells = false;
  for (const auto& r : rows) {
    if (!r.ok()) {
      failed_cells = true;
      err << "error: " << r.bits << "/" << to_string(r.style) << "/" << to_string(r.tech) << ": " << r.error << '\n';
    }
  }
  if (failed_cells) return kSimulation;

  if (rc.check_trends) {
    try {
      const auto violations = trend_check(rows);
      for (const auto& v : violations) err << "trend violation: " << v << '\n';
      if (!violations.empty()) return kTrend;
      out << "trend check: all orderings hold\n";
    } catch (const TrendError& e) {
      err << "error: " << e.what() << '\n';
      return kTrend;
    }
  }
  return kOk;
}

inline int exit_code_for(const Error& e) {
  if (dynamic_cast<const SimulationError*>(&e) != nullptr || dynamic_cast<const MappingError*>(&e) != nullptr) {
    return kSimulation;
  }
  if (dynamic_cast<const TrendError*>(&e) != nullptr) return kTrend;
  return kValidation;
}

/// Entry point; `args` excludes the program name.
inline int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dynamic-logic carry-lookahead adder characterization", "clachar"};
  app.require_subcommand(1);

  CntInfoArgs info;
  auto* info_cmd = app.add_subcommand("cnt-info", "Print nanotube geometry and derived threshold");
  info_cmd->add_option("--n", info.n, "chiral index n");
  info_cmd->add_option("--m", info.m, "chiral index m");
  info_cmd->add_option("--a-cc", info.a_cc_nm, "carbon-carbon bond length, nm");
  info_cmd->add_option("--gate-width", info.gate_width_nm, "gate width, nm");
  info_cmd->add_option("--tubes", info.tube_count, "parallel tubes under the gate");

  std::map<std::string, std::string> raw;
  std::string config_path;
  bool check_trends = false;
  auto* run_cmd = app.add_subcommand("run", "Characterize adders and write CSV");
  for (const auto& k : run_keys()) {
    if (k == "check-trends") continue;
    run_cmd->add_option("--" + k, raw[k]);
  }
  run_cmd->add_flag("--check-trends", check_trends, "exit 3 unless all trend orderings hold");
  run_cmd->add_option("--config", config_path, "key = value settings file");

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kValidation;
  }

  try {
    if (info_cmd->parsed()) {
      out << cmd_cnt_info(info);
      return kOk;
    }
    std::map<std::string, std::string> given;
    for (const auto& k : run_keys()) {
      if (k == "check-trends") continue;
      if (run_cmd->count("--" + k) > 0) given[k] = raw[k];
    }
    if (check_trends) given["check-trends"] = "true";
    const auto file = config_path.empty() ? std::map<std::string, std::string>{} : load_config_file(config_path);
    return cmd_run(merge_run_config(file, given), out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
}

}  // namespace clachar::cli
