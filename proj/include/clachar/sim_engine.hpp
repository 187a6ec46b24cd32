#pragma once

// Clocked switch-level simulation of a DynamicNetlist.
//
// Time is integer ticks of `time_resolution_s`. Each cycle starts with the
// precharge phase (clk low) and the new input vector; the evaluate phase
// (clk high) starts at period * duty. A node whose drive changes is
// scheduled to reach its new level after ln(2) * R_path * C_node, where
// R_path is the series/parallel resistance of the conducting path. Each
// node holds at most one pending transition; a drive change that removes
// the reason for it cancels it.
//
// Energy: every low-to-high transition of a circuit-driven node draws
// C * Vdd^2 from the supply. Leakage is Vdd * sum(i_off) over all devices,
// integrated over time.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <queue>
#include <string>
#include <tuple>
#include <vector>

#include "clachar/cla_builder.hpp"
#include "clachar/dynamic_netlist.hpp"
#include "clachar/error.hpp"
#include "clachar/text.hpp"

namespace clachar {

struct SimConfig {
  double clock_period_s = 1e-9;
  double duty = 0.5;
  int cycles = 2;
  std::vector<BitVector> stimulus;  // one input vector per cycle
  double time_resolution_s = 1e-15;
  double vdd_v = 0.9;
  bool record_trace = true;

  /// Clock and supply taken from the netlist; `vector` repeated for `cycles`.
  static SimConfig repeat(const DynamicNetlist& nl, const BitVector& vector, int cycles) {
    SimConfig c;
    c.clock_period_s = nl.clock.period_s;
    c.duty = nl.clock.duty;
    c.vdd_v = nl.vdd_v;
    c.cycles = cycles;
    c.stimulus.assign(static_cast<std::size_t>(cycles), vector);
    return c;
  }
};

inline std::vector<std::string> validate_sim_config(const SimConfig& c, std::size_t input_count) {
  std::vector<std::string> v;
  if (!(c.clock_period_s > 0.0)) v.emplace_back("clock period must be positive");
  if (!(c.duty > 0.0 && c.duty < 1.0)) v.emplace_back("duty must be in (0, 1)");
  if (c.cycles < 2) v.emplace_back("at least 2 cycles are required (the first one only settles)");
  if (!(c.time_resolution_s > 0.0)) v.emplace_back("time resolution must be positive");
  else if (c.time_resolution_s > c.clock_period_s / 1e4) v.emplace_back("time resolution must be <= period / 1e4");
  if (!(c.vdd_v > 0.0)) v.emplace_back("vdd must be positive");
  if (c.stimulus.size() != static_cast<std::size_t>(std::max(c.cycles, 0))) {
    v.emplace_back("stimulus must hold one vector per cycle");
  }
  for (const auto& s : c.stimulus) {
    if (s.size() != input_count) {
      v.push_back("stimulus vector has " + std::to_string(s.size()) + " bits, netlist has " +
                  std::to_string(input_count) + " inputs");
      break;
    }
  }
  return v;
}

struct TraceEvent {
  double time_s;
  NodeId node;
  std::uint8_t level;

  friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

struct SimResult {
  std::vector<TraceEvent> trace;
  double supply_energy_j = 0.0;
  double leakage_energy_j = 0.0;
  std::vector<double> cycle_supply_energy_j;
  std::vector<double> cycle_leakage_energy_j;
  // Last transition of each output within each evaluate phase, measured from
  // the start of that phase. [cycle][output]; empty when the output held.
  std::vector<std::vector<std::optional<double>>> settle_s;
  // Evaluate-phase DynN rises and DynP falls.
  std::size_t monotonicity_violations = 0;
  // Final output levels of each cycle, in output order.
  std::vector<BitVector> outputs;

  friend bool operator==(const SimResult&, const SimResult&) = default;
};

/// Evaluation of one stage's drive against current node levels.
struct Drive {
  enum Kind { Hold, Up, Down } kind = Hold;
  double resistance_ohm = 0.0;
};

namespace detail {

inline constexpr double kOpen = std::numeric_limits<double>::infinity();

inline bool gate_level(const Switch& s, const BitVector& v) { return (v[s.gate] != 0) != s.inverted; }

inline bool switch_conducts(const Switch& s, const BitVector& v) {
  return is_n_type(s.kind) ? gate_level(s, v) : !gate_level(s, v);
}

/// Effective resistance of the conducting part of the graph, kOpen when no path conducts.
inline double path_resistance(const SwitchGraph& g, const BitVector& v, const DynamicNetlist& nl) {
  switch (g.kind()) {
    case SwitchGraph::Kind::Leaf:
      return switch_conducts(g.sw(), v) ? nl.device(g.sw().kind).r_on_ohm : kOpen;
    case SwitchGraph::Kind::Series: {
      double r = 0.0;
      for (const auto& c : g.children()) {
        const double rc = path_resistance(c, v, nl);
        if (rc == kOpen) return kOpen;
        r += rc;
      }
      return r;
    }
    case SwitchGraph::Kind::Parallel: {
      double g_sum = 0.0;
      for (const auto& c : g.children()) {
        const double rc = path_resistance(c, v, nl);
        if (rc != kOpen) g_sum += 1.0 / rc;
      }
      return g_sum > 0.0 ? 1.0 / g_sum : kOpen;
    }
  }
  return kOpen;
}

inline bool graph_conducts(const SwitchGraph& g, const BitVector& v) {
  switch (g.kind()) {
    case SwitchGraph::Kind::Leaf: return switch_conducts(g.sw(), v);
    case SwitchGraph::Kind::Series:
      return std::all_of(g.children().begin(), g.children().end(), [&](const auto& c) { return graph_conducts(c, v); });
    case SwitchGraph::Kind::Parallel:
      return std::any_of(g.children().begin(), g.children().end(), [&](const auto& c) { return graph_conducts(c, v); });
  }
  return false;
}

inline Drive resolve(double up, double down, const DynamicNetlist& nl, const DynamicStage& st) {
  if (up != kOpen && down != kOpen) {
    throw SimulationError("contention on node " + nl.nodes[st.dynamic_node].name +
                          ": pull-up and pull-down both conduct");
  }
  if (up != kOpen) return Drive{Drive::Up, up};
  if (down != kOpen) return Drive{Drive::Down, down};
  return Drive{};
}

}  // namespace detail

/// Drive of stage `st` given node levels and the clock (true = evaluate).
inline Drive stage_drive(const DynamicNetlist& nl, const DynamicStage& st, const BitVector& v, bool clk) {
  using detail::kOpen;
  switch (st.type) {
    case StageType::DynN: {
      const double up = clk ? kOpen : nl.device(st.p_device).r_on_ohm;
      double down = kOpen;
      if (clk || !st.footed) {
        down = detail::path_resistance(st.eval_network, v, nl);
        if (down != kOpen && st.footed) down += nl.device(st.n_device).r_on_ohm;
      }
      return detail::resolve(up, down, nl, st);
    }
    case StageType::DynP: {
      const double down = clk ? kOpen : nl.device(st.n_device).r_on_ohm;
      double up = kOpen;
      if (clk || !st.footed) {
        up = detail::path_resistance(st.eval_network, v, nl);
        if (up != kOpen && st.footed) up += nl.device(st.p_device).r_on_ohm;
      }
      return detail::resolve(up, down, nl, st);
    }
    case StageType::StaticInv: {
      const double down = detail::path_resistance(st.eval_network, v, nl);
      const double up = down == kOpen ? nl.device(st.p_device).r_on_ohm : kOpen;
      return detail::resolve(up, down, nl, st);
    }
    case StageType::StaticXor: {
      const auto& ops = st.eval_network.children();
      bool x = false;
      if (st.eval_network.kind() == SwitchGraph::Kind::Leaf) {
        x = detail::gate_level(st.eval_network.sw(), v);
      } else {
        for (const auto& op : ops) x ^= detail::gate_level(op.sw(), v);
      }
      if (x) return Drive{Drive::Up, 2.0 * nl.device(st.p_device).r_on_ohm};
      return Drive{Drive::Down, 2.0 * nl.device(st.n_device).r_on_ohm};
    }
  }
  return Drive{};
}

namespace detail {

class Simulator {
 public:
  Simulator(const DynamicNetlist& nl, const SimConfig& cfg) : nl_(nl), cfg_(cfg) {
    auto violations = validate_sim_config(cfg, nl.inputs.size());
    if (!violations.empty()) {
      std::string msg = "invalid simulation config:";
      for (const auto& s : violations) msg += "\n  " + s;
      throw ValidationError(msg);
    }
    const auto n = nl.nodes.size();
    level_.assign(n, 0);
    pending_.assign(n, Pending{});
    fanout_.assign(n, {});
    for (std::size_t s = 0; s < nl.stages.size(); ++s) {
      for (NodeId g : DynamicNetlist::stage_inputs(nl.stages[s])) {
        auto& f = fanout_[g];
        if (f.empty() || f.back() != s) f.push_back(s);
      }
    }
    output_index_.assign(n, {});
    for (std::size_t o = 0; o < nl.outputs.size(); ++o) output_index_[nl.outputs[o].node].push_back(o);

    period_ = std::llround(cfg.clock_period_s / cfg.time_resolution_s);
    eval_offset_ = std::llround(cfg.clock_period_s * cfg.duty / cfg.time_resolution_s);
    leak_power_w_ = cfg.vdd_v * nl.leakage_current_a();
  }

  SimResult run() {
    const int cycles = cfg_.cycles;
    res_.cycle_supply_energy_j.assign(cycles, 0.0);
    res_.cycle_leakage_energy_j.assign(cycles, leak_power_w_ * cfg_.clock_period_s);
    res_.settle_s.assign(cycles, std::vector<std::optional<double>>(nl_.outputs.size()));

    for (int c = 0; c < cycles; ++c) {
      const std::int64_t start = period_ * c;

      // precharge
      settle_until(start);
      if (c > 0) finish_evaluate();
      cycle_ = c;
      clk_ = false;
      apply_inputs(cfg_.stimulus[c], start);
      reevaluate_all(start);

      // evaluate
      const std::int64_t eval = start + eval_offset_;
      settle_until(eval);
      check_precharged();
      clk_ = true;
      eval_start_ = eval;
      reevaluate_all(eval);
    }
    settle_until(period_ * cycles);
    finish_evaluate();

    for (double e : res_.cycle_leakage_energy_j) res_.leakage_energy_j += e;
    return std::move(res_);
  }

 private:
  struct Pending {
    bool active = false;
    std::int64_t tick = 0;
    std::uint8_t target = 0;
    std::uint64_t version = 0;
  };

  using QueueEntry = std::tuple<std::int64_t, NodeId, std::uint64_t>;

  void apply_inputs(const BitVector& vec, std::int64_t now) {
    for (std::size_t i = 0; i < nl_.inputs.size(); ++i) {
      const NodeId node = nl_.inputs[i];
      const std::uint8_t lv = vec[i] ? 1 : 0;
      if (level_[node] == lv) continue;
      level_[node] = lv;
      record(node, now, lv);
    }
  }

  void reevaluate_all(std::int64_t now) {
    for (std::size_t s = 0; s < nl_.stages.size(); ++s) evaluate_stage(s, now);
  }

  void evaluate_stage(std::size_t s, std::int64_t now) {
    const auto& st = nl_.stages[s];
    const Drive d = stage_drive(nl_, st, level_, clk_);
    const NodeId node = st.dynamic_node;
    Pending& p = pending_[node];
    if (d.kind == Drive::Hold) {
      cancel(p);
      return;
    }
    const std::uint8_t target = d.kind == Drive::Up ? 1 : 0;
    if (target == level_[node]) {
      cancel(p);
      return;
    }
    if (p.active && p.target == target) return;
    cancel(p);
    const double delay_s = std::numbers::ln2 * d.resistance_ohm * nl_.nodes[node].capacitance_f;
    p.active = true;
    p.target = target;
    p.tick = now + std::llround(delay_s / cfg_.time_resolution_s);
    ++active_;
    queue_.emplace(p.tick, node, p.version);
  }

  void cancel(Pending& p) {
    if (!p.active) return;
    p.active = false;
    ++p.version;
    --active_;
  }

  // Processes every transition due at or before `until`; anything still
  // pending afterwards did not settle within the phase.
  void settle_until(std::int64_t until) {
    while (!queue_.empty()) {
      auto [tick, node, version] = queue_.top();
      if (tick > until) break;
      queue_.pop();
      Pending& p = pending_[node];
      if (!p.active || p.version != version) continue;
      p.active = false;
      ++p.version;
      --active_;
      transition(node, p.target, tick);
      for (std::size_t s : fanout_[node]) evaluate_stage(s, tick);
    }
    if (active_ > 0 && until > 0) {
      for (std::size_t n = 0; n < pending_.size(); ++n) {
        if (pending_[n].active) {
          throw SimulationError("clock period too short: node " + nl_.nodes[n].name + " still switching at t=" +
                                text::exact(until * cfg_.time_resolution_s) + " s");
        }
      }
    }
  }

  void transition(NodeId node, std::uint8_t lv, std::int64_t tick) {
    level_[node] = lv;
    record(node, tick, lv);
    const auto& nn = nl_.nodes[node];
    if (lv == 1 && nn.role != NodeRole::Input) {
      const double e = nn.capacitance_f * cfg_.vdd_v * cfg_.vdd_v;
      res_.supply_energy_j += e;
      res_.cycle_supply_energy_j[cycle_] += e;
    }
    if (clk_) {
      if (nn.role == NodeRole::Dynamic) {
        const auto type = nl_.stages[driver_of(node)].type;
        if ((type == StageType::DynN && lv == 1) || (type == StageType::DynP && lv == 0)) {
          ++res_.monotonicity_violations;
        }
      }
      for (std::size_t o : output_index_[node]) {
        res_.settle_s[cycle_][o] = static_cast<double>(tick - eval_start_) * cfg_.time_resolution_s;
      }
    }
  }

  std::size_t driver_of(NodeId node) {
    if (drivers_.empty()) drivers_ = nl_.drivers();
    return static_cast<std::size_t>(drivers_[node]);
  }

  void record(NodeId node, std::int64_t tick, std::uint8_t lv) {
    if (cfg_.record_trace) {
      res_.trace.push_back(TraceEvent{static_cast<double>(tick) * cfg_.time_resolution_s, node, lv});
    }
  }

  void check_precharged() {
    for (const auto& st : nl_.stages) {
      if (!is_dynamic(st.type)) continue;
      const std::uint8_t want = st.type == StageType::DynN ? 1 : 0;
      if (level_[st.dynamic_node] != want) {
        throw SimulationError("clock period too short: node " + nl_.nodes[st.dynamic_node].name +
                              " not precharged at evaluate start");
      }
    }
  }

  void finish_evaluate() {
    BitVector out;
    out.reserve(nl_.outputs.size());
    for (const auto& o : nl_.outputs) out.push_back(level_[o.node]);
    res_.outputs.push_back(std::move(out));
  }

  const DynamicNetlist& nl_;
  const SimConfig& cfg_;
  BitVector level_;
  std::vector<Pending> pending_;
  std::vector<std::vector<std::size_t>> fanout_;
  std::vector<std::vector<std::size_t>> output_index_;
  std::vector<int> drivers_;
  std::priority_queue<QueueEntry, std::vector<QueueEntry>, std::greater<>> queue_;
  std::size_t active_ = 0;
  std::int64_t period_ = 0;
  std::int64_t eval_offset_ = 0;
  std::int64_t eval_start_ = 0;
  int cycle_ = 0;
  bool clk_ = false;
  double leak_power_w_ = 0.0;
  SimResult res_;
};

}  // namespace detail

/// Runs `cfg.cycles` clock cycles. Throws SimulationError on contention or
/// when a phase ends with transitions still pending.
inline SimResult simulate(const DynamicNetlist& nl, const SimConfig& cfg) {
  return detail::Simulator(nl, cfg).run();
}

/// Zero-delay precharge + evaluate of one vector; returns output levels.
/// Stages are relaxed until nothing changes.
class FunctionalEvaluator {
 public:
  explicit FunctionalEvaluator(const DynamicNetlist& nl) : nl_(nl), level_(nl.nodes.size(), 0) {}

  BitVector operator()(const BitVector& inputs) {
    if (inputs.size() != nl_.inputs.size()) {
      throw ValidationError("functional_mode: expected " + std::to_string(nl_.inputs.size()) + " input bits, got " +
                            std::to_string(inputs.size()));
    }
    std::fill(level_.begin(), level_.end(), 0);
    for (std::size_t i = 0; i < inputs.size(); ++i) level_[nl_.inputs[i]] = inputs[i] ? 1 : 0;
    relax(false);
    relax(true);
    BitVector out;
    out.reserve(nl_.outputs.size());
    for (const auto& o : nl_.outputs) out.push_back(level_[o.node]);
    return out;
  }

 private:
  void relax(bool clk) {
    const std::size_t limit = nl_.nodes.size() + 1;
    for (std::size_t iter = 0; iter < limit; ++iter) {
      bool changed = false;
      for (const auto& st : nl_.stages) {
        const std::uint8_t lv = target(st, clk);
        if (lv == kHold || lv == level_[st.dynamic_node]) continue;
        level_[st.dynamic_node] = lv;
        changed = true;
      }
      if (!changed) return;
    }
    throw SimulationError("functional_mode: no fixed point within node-count iterations");
  }

  static constexpr std::uint8_t kHold = 2;

  std::uint8_t target(const DynamicStage& st, bool clk) const {
    using detail::graph_conducts;
    bool up = false;
    bool down = false;
    switch (st.type) {
      case StageType::DynN:
        up = !clk;
        down = (clk || !st.footed) && graph_conducts(st.eval_network, level_);
        break;
      case StageType::DynP:
        down = !clk;
        up = (clk || !st.footed) && graph_conducts(st.eval_network, level_);
        break;
      case StageType::StaticInv:
        down = graph_conducts(st.eval_network, level_);
        up = !down;
        break;
      case StageType::StaticXor: {
        bool x = false;
        st.eval_network.for_each_switch([&](const Switch& s) { x ^= detail::gate_level(s, level_); });
        return x ? 1 : 0;
      }
    }
    if (up && down) {
      throw SimulationError("functional_mode: contention on node " + nl_.nodes[st.dynamic_node].name);
    }
    return up ? 1 : down ? 0 : kHold;
  }

  const DynamicNetlist& nl_;
  BitVector level_;
};

inline BitVector functional_mode(const DynamicNetlist& nl, const BitVector& inputs) {
  return FunctionalEvaluator(nl)(inputs);
}

/// One event per line: `time_s<TAB>node<TAB>level`.
inline void write_trace(std::ostream& os, const DynamicNetlist& nl, const SimResult& r) {
  for (const auto& e : r.trace) {
    os << text::exact(e.time_s) << '\t' << nl.nodes[e.node].name << '\t' << static_cast<int>(e.level) << '\n';
  }
}

}  // namespace clachar
