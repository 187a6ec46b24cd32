#pragma once

// Power / delay / power-delay-product characterization over bit width,
// logic style and technology, with CSV output and trend checks.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <future>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "clachar/cla_builder.hpp"
#include "clachar/dynamic_mapper.hpp"
#include "clachar/error.hpp"
#include "clachar/sim_engine.hpp"
#include "clachar/tech_models.hpp"
#include "clachar/text.hpp"

namespace clachar {

/// One characterization row. The power-delay product is always derived from
/// average power and delay, never stored.
struct MetricsRecord {
  int bits = 0;
  Style style = Style::Np;
  Flavor tech = Flavor::Si;
  double total_power_w = 0.0;  // supply-delivered switching power
  double avg_power_w = 0.0;    // switching + leakage
  double tpd_s = 0.0;
  std::string error;  // non-empty when the cell failed

  static MetricsRecord make(int bits, Style style, Flavor tech, double total_power_w, double avg_power_w,
                            double tpd_s) {
    return MetricsRecord{bits, style, tech, total_power_w, avg_power_w, tpd_s, {}};
  }

  static MetricsRecord failed(int bits, Style style, Flavor tech, std::string why) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    return MetricsRecord{bits, style, tech, nan, nan, nan, std::move(why)};
  }

  double pdp_j() const { return avg_power_w * tpd_s; }
  bool ok() const { return error.empty(); }
};

struct CharacterizeOptions {
  int cycles_per_vector = 2;  // first cycle settles and is not measured
  double time_resolution_s = 1e-15;
  MapOptions map;
};

/// Critical carry-propagate vector followed by `random_count` uniform vectors.
inline std::vector<AdderVector> default_vectors(int bits, int random_count, std::uint64_t seed = 0xC1A) {
  std::vector<AdderVector> v{critical_vector(bits)};
  std::mt19937_64 rng(seed);
  const std::uint64_t mask = width_mask(bits);
  for (int i = 0; i < random_count; ++i) {
    AdderVector x;
    x.a = rng() & mask;
    x.b = rng() & mask;
    x.cin = (rng() & 1) != 0;
    v.push_back(x);
  }
  return v;
}

/// Simulates every vector on its own for `cycles_per_vector` cycles.
/// Powers are averaged over all measured cycles; delay is the worst output
/// settle time over them.
inline MetricsRecord characterize(const DynamicNetlist& nl, int bits, Style style,
                                  const std::vector<AdderVector>& vectors, const CharacterizeOptions& opt = {}) {
  if (vectors.empty()) throw ValidationError("characterize: empty vector set");
  if (opt.cycles_per_vector < 2) throw ValidationError("characterize: at least 2 cycles per vector");
  double supply = 0.0;
  double leakage = 0.0;
  double window = 0.0;
  std::optional<double> tpd;
  for (const auto& vec : vectors) {
    SimConfig cfg = SimConfig::repeat(nl, encode_inputs(bits, vec), opt.cycles_per_vector);
    cfg.time_resolution_s = opt.time_resolution_s;
    cfg.record_trace = false;
    const SimResult r = simulate(nl, cfg);
    for (int c = 1; c < cfg.cycles; ++c) {
      supply += r.cycle_supply_energy_j[c];
      leakage += r.cycle_leakage_energy_j[c];
      window += cfg.clock_period_s;
      for (const auto& s : r.settle_s[c]) {
        if (s && (!tpd || *s > *tpd)) tpd = *s;
      }
    }
  }
  if (!tpd) throw SimulationError("no output transition");
  return MetricsRecord::make(bits, style, nl.flavor, supply / window, (supply + leakage) / window, *tpd);
}

inline MetricsRecord characterize(int bits, Style style, const TechnologyConfig& tech, const ParameterSet& params,
                                  const std::vector<AdderVector>& vectors, const CharacterizeOptions& opt = {}) {
  const LogicNetwork net = build_cla(bits);
  const DynamicNetlist nl = map_network(net, style, tech, params, opt.map);
  return characterize(nl, bits, style, vectors, opt);
}

struct SweepConfig {
  std::vector<int> bits{8, 16, 32, 64};
  std::vector<Style> styles{Style::Domino, Style::Np};
  std::vector<Flavor> techs{Flavor::Si, Flavor::Cnt, Flavor::Hybrid};
  double vdd_v = 0.9;
  double clock_hz = 1e9;
  int random_vectors = 64;
  std::uint64_t seed = 0xC1A;
  std::optional<std::filesystem::path> params_dir;
  CharacterizeOptions options;
  unsigned threads = 0;  // 0: hardware concurrency
};

/// Full cross product bits x styles x techs, rows in axis order. A failing
/// cell becomes an error row; the sweep continues.
inline std::vector<MetricsRecord> sweep(const SweepConfig& cfg) {
  if (cfg.bits.empty() || cfg.styles.empty() || cfg.techs.empty()) {
    throw ValidationError("sweep: every axis needs at least one value");
  }
  std::map<Flavor, ParameterSet> params;
  for (Flavor f : cfg.techs) {
    params[f] = cfg.params_dir ? load_parameters(*cfg.params_dir, f) : bundled_parameters(f);
  }

  struct Cell {
    int bits;
    Style style;
    Flavor tech;
  };
  std::vector<Cell> cells;
  for (int b : cfg.bits) {
    for (Style s : cfg.styles) {
      for (Flavor t : cfg.techs) cells.push_back(Cell{b, s, t});
    }
  }

  auto run_cell = [&](const Cell& c) {
    try {
      TechnologyConfig tech = TechnologyConfig::defaults(c.tech);
      tech.vdd_v = cfg.vdd_v;
      tech.clock_hz = cfg.clock_hz;
      return characterize(c.bits, c.style, tech, params.at(c.tech), default_vectors(c.bits, cfg.random_vectors, cfg.seed),
                          cfg.options);
    } catch (const Error& e) {
      return MetricsRecord::failed(c.bits, c.style, c.tech, e.what());
    }
  };

  std::vector<MetricsRecord> rows(cells.size());
  unsigned workers = cfg.threads != 0 ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(cells.size()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < cells.size(); ++i) rows[i] = run_cell(cells[i]);
    return rows;
  }
  std::vector<std::future<void>> jobs;
  std::atomic<std::size_t> next{0};
  for (unsigned w = 0; w < workers; ++w) {
    jobs.push_back(std::async(std::launch::async, [&] {
      for (std::size_t i = next++; i < cells.size(); i = next++) rows[i] = run_cell(cells[i]);
    }));
  }
  for (auto& j : jobs) j.get();
  return rows;
}

// ---------------------------------------------------------------------------
// Trend checks
// ---------------------------------------------------------------------------

/// Orderings per bit width (NP style): avg power Si > Cnt, Si > Hybrid;
/// delay Si > Hybrid > Cnt. Delay non-decreasing in bit width per
/// (style, tech). For Cnt, NP power-delay product <= domino when both exist.
///
/// Throws TrendError listing the NP cells that are missing or failed.
inline std::vector<std::string> trend_check(const std::vector<MetricsRecord>& records) {
  std::map<std::tuple<int, Style, Flavor>, const MetricsRecord*> cell;
  std::vector<int> widths;
  for (const auto& r : records) {
    if (std::find(widths.begin(), widths.end(), r.bits) == widths.end()) widths.push_back(r.bits);
    if (r.ok()) cell[{r.bits, r.style, r.tech}] = &r;
  }
  std::sort(widths.begin(), widths.end());

  std::vector<std::string> missing;
  for (int b : widths) {
    for (Flavor t : kAllFlavors) {
      if (!cell.count({b, Style::Np, t})) {
        missing.push_back(std::to_string(b) + "/np/" + std::string(to_string(t)));
      }
    }
  }
  if (widths.empty()) throw TrendError("trend check: no records");
  if (!missing.empty()) {
    std::string msg = "trend check needs these cells:";
    for (const auto& m : missing) msg += " " + m;
    throw TrendError(msg);
  }

  std::vector<std::string> v;
  auto label = [](int b, Style s, Flavor t) {
    return std::to_string(b) + "-bit " + std::string(to_string(s)) + " " + std::string(to_string(t));
  };
  auto expect_greater = [&](const char* metric, double lhs, double rhs, const std::string& l, const std::string& r) {
    if (!(lhs > rhs)) {
      v.push_back(std::string(metric) + ": expected " + l + " (" + text::exact(lhs) + ") > " + r + " (" +
                  text::exact(rhs) + ")");
    }
  };

  for (int b : widths) {
    const auto& si = *cell.at({b, Style::Np, Flavor::Si});
    const auto& cn = *cell.at({b, Style::Np, Flavor::Cnt});
    const auto& hy = *cell.at({b, Style::Np, Flavor::Hybrid});
    expect_greater("avg power", si.avg_power_w, cn.avg_power_w, label(b, Style::Np, Flavor::Si),
                   label(b, Style::Np, Flavor::Cnt));
    expect_greater("avg power", si.avg_power_w, hy.avg_power_w, label(b, Style::Np, Flavor::Si),
                   label(b, Style::Np, Flavor::Hybrid));
    expect_greater("delay", si.tpd_s, hy.tpd_s, label(b, Style::Np, Flavor::Si), label(b, Style::Np, Flavor::Hybrid));
    expect_greater("delay", hy.tpd_s, cn.tpd_s, label(b, Style::Np, Flavor::Hybrid), label(b, Style::Np, Flavor::Cnt));

    auto dom = cell.find({b, Style::Domino, Flavor::Cnt});
    if (dom != cell.end() && !(cn.pdp_j() <= dom->second->pdp_j())) {
      v.push_back("pdp: expected " + label(b, Style::Np, Flavor::Cnt) + " (" + text::exact(cn.pdp_j()) + ") <= " +
                  label(b, Style::Domino, Flavor::Cnt) + " (" + text::exact(dom->second->pdp_j()) + ")");
    }
  }

  for (Style s : {Style::Domino, Style::Np}) {
    for (Flavor t : kAllFlavors) {
      const MetricsRecord* prev = nullptr;
      for (int b : widths) {
        auto it = cell.find({b, s, t});
        if (it == cell.end()) continue;
        if (prev != nullptr && it->second->tpd_s < prev->tpd_s) {
          v.push_back("delay: expected " + label(b, s, t) + " (" + text::exact(it->second->tpd_s) + ") >= " +
                      label(prev->bits, s, t) + " (" + text::exact(prev->tpd_s) + ")");
        }
        prev = it->second;
      }
    }
  }
  return v;
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

inline constexpr const char* kCsvHeader = "bits,style,tech,total_power_w,avg_power_w,tpd_s,pdp_j";

inline std::string sci6(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.5e", v);
  return buf;
}

inline void write_csv(std::ostream& os, const std::vector<MetricsRecord>& rows) {
  os << kCsvHeader << '\n';
  for (const auto& r : rows) {
    os << r.bits << ',' << to_string(r.style) << ',' << to_string(r.tech) << ',' << sci6(r.total_power_w) << ','
       << sci6(r.avg_power_w) << ',' << sci6(r.tpd_s) << ',' << sci6(r.pdp_j()) << '\n';
  }
}

inline std::string to_csv(const std::vector<MetricsRecord>& rows) {
  std::ostringstream os;
  write_csv(os, rows);
  return os.str();
}

struct CsvRow {
  int bits;
  Style style;
  Flavor tech;
  double total_power_w;
  double avg_power_w;
  double tpd_s;
  double pdp_j;
};

inline std::vector<CsvRow> parse_csv(std::string_view csv) {
  std::istringstream in{std::string(csv)};
  std::string line;
  if (!std::getline(in, line) || text::trim(line) != kCsvHeader) {
    throw ValidationError("CSV header mismatch");
  }
  std::vector<CsvRow> rows;
  while (std::getline(in, line)) {
    if (text::trim(line).empty()) continue;
    auto f = text::split(text::trim(line), ',');
    if (f.size() != 7) throw ValidationError("CSV row needs 7 fields: " + line);
    auto num = [&](std::string_view s) {
      if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
      auto v = text::parse_double(s);
      if (!v) throw ValidationError("CSV: bad number '" + std::string(s) + "'");
      return *v;
    };
    auto bits = text::parse_int(f[0]);
    if (!bits) throw ValidationError("CSV: bad bit width '" + std::string(f[0]) + "'");
    rows.push_back(CsvRow{static_cast<int>(*bits), parse_style(f[1]), parse_flavor(f[2]), num(f[3]), num(f[4]),
                          num(f[5]), num(f[6])});
  }
  return rows;
}

}  // namespace clachar
