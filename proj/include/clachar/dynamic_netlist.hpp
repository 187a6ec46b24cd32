#pragma once

// Clocked transistor-level netlist for dynamic logic, plus its text format.
//
// A stage drives exactly one node. Dynamic stages carry a series-parallel
// evaluation network; the clock devices (precharge/predischarge and foot)
// and static pull-ups are implied by the stage type and the stage's
// n/p device kinds.
//
// Text format, one record per line:
//
//   clachar-netlist 1
//   flavor <si|cnt|hybrid>
//   vdd <volts>
//   clock <period_s> <duty>
//   wire <c_wire_f>
//   device <kind> <v_th_v> <r_on_ohm> <c_gate_f> <i_off_a>
//   node <id> <name> <input|dynamic|static> <cap_f>
//   input <node>
//   stage <type> <clk|clkbar|none> <node> <footed|unfooted> n=<kind> p=<kind> <expr>
//   output <name> <node>
//
// <expr> is a switch literal `<kind>:<node>` (`<kind>:!<node>` when the gate
// sees the complement) or `s(e,e,...)` / `p(e,e,...)` for series and
// parallel composition. StaticXor stages list their two operands as `s(x,y)`.
// Reals are written in shortest round-trip form.

#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "clachar/cla_builder.hpp"
#include "clachar/error.hpp"
#include "clachar/tech_models.hpp"
#include "clachar/text.hpp"

namespace clachar {

enum class StageType { DynN, DynP, StaticInv, StaticXor };
enum class ClockPhase { Clk, ClkBar, None };
enum class NodeRole { Input, Dynamic, Static };

inline std::string_view to_string(StageType t) {
  switch (t) {
    case StageType::DynN: return "DynN";
    case StageType::DynP: return "DynP";
    case StageType::StaticInv: return "StaticInv";
    case StageType::StaticXor: return "StaticXor";
  }
  return "?";
}

inline std::string_view to_string(ClockPhase p) {
  switch (p) {
    case ClockPhase::Clk: return "clk";
    case ClockPhase::ClkBar: return "clkbar";
    case ClockPhase::None: return "none";
  }
  return "?";
}

inline std::string_view to_string(NodeRole r) {
  switch (r) {
    case NodeRole::Input: return "input";
    case NodeRole::Dynamic: return "dynamic";
    case NodeRole::Static: return "static";
  }
  return "?";
}

inline bool is_dynamic(StageType t) { return t == StageType::DynN || t == StageType::DynP; }

struct Switch {
  DeviceKind kind;
  NodeId gate;
  bool inverted = false;  // gate driven by the complement rail (primary inputs only)

  friend bool operator==(const Switch&, const Switch&) = default;
};

class SwitchGraph {
 public:
  enum class Kind { Leaf, Series, Parallel };

  static SwitchGraph leaf(Switch s) {
    SwitchGraph g;
    g.kind_ = Kind::Leaf;
    g.switch_ = s;
    return g;
  }
  static SwitchGraph series(std::vector<SwitchGraph> parts) { return compose(Kind::Series, std::move(parts)); }
  static SwitchGraph parallel(std::vector<SwitchGraph> parts) { return compose(Kind::Parallel, std::move(parts)); }

  Kind kind() const { return kind_; }
  const Switch& sw() const { return switch_; }
  const std::vector<SwitchGraph>& children() const { return children_; }

  template <typename F>
  void for_each_switch(F&& f) const {
    if (kind_ == Kind::Leaf) {
      f(switch_);
      return;
    }
    for (const auto& c : children_) c.for_each_switch(f);
  }

  std::size_t switch_count() const {
    std::size_t n = 0;
    for_each_switch([&](const Switch&) { ++n; });
    return n;
  }

  /// Longest series stack, in devices.
  std::size_t stack_height() const {
    if (kind_ == Kind::Leaf) return 1;
    std::size_t h = 0;
    for (const auto& c : children_) {
      h = kind_ == Kind::Series ? h + c.stack_height() : std::max(h, c.stack_height());
    }
    return h;
  }

  friend bool operator==(const SwitchGraph&, const SwitchGraph&) = default;

 private:
  static SwitchGraph compose(Kind k, std::vector<SwitchGraph> parts) {
    if (parts.empty()) throw MappingError("empty series/parallel composition");
    if (parts.size() == 1) return std::move(parts.front());
    SwitchGraph g;
    g.kind_ = k;
    g.children_ = std::move(parts);
    return g;
  }

  Kind kind_ = Kind::Leaf;
  Switch switch_{DeviceKind::SiN, 0, false};
  std::vector<SwitchGraph> children_;
};

struct DynamicStage {
  StageType type;
  SwitchGraph eval_network;
  NodeId dynamic_node;  // the node this stage drives
  ClockPhase clock_phase;
  bool footed;
  DeviceKind n_device;  // kinds of the implied clock / pull-up / pull-down devices
  DeviceKind p_device;

  friend bool operator==(const DynamicStage&, const DynamicStage&) = default;
};

struct NetNode {
  std::string name;
  NodeRole role;
  double capacitance_f = 0.0;

  friend bool operator==(const NetNode&, const NetNode&) = default;
};

struct ClockSpec {
  double period_s = 1e-9;
  double duty = 0.5;

  friend bool operator==(const ClockSpec&, const ClockSpec&) = default;
};

inline constexpr int kNoDriver = -1;

class DynamicNetlist {
 public:
  Flavor flavor = Flavor::Si;
  double vdd_v = 0.9;
  double c_wire_f = 0.0;
  ClockSpec clock;
  std::map<DeviceKind, DeviceParams> devices;
  std::vector<NetNode> nodes;
  std::vector<DynamicStage> stages;
  std::vector<NodeId> inputs;
  std::vector<NamedNode> outputs;

  NodeId add_node(std::string name, NodeRole role) {
    nodes.push_back(NetNode{std::move(name), role, 0.0});
    return static_cast<NodeId>(nodes.size() - 1);
  }

  const DeviceParams& device(DeviceKind k) const {
    auto it = devices.find(k);
    if (it == devices.end()) {
      throw ValidationError("netlist has no parameters for device kind " + std::string(to_string(k)));
    }
    return it->second;
  }

  /// Index of the stage driving each node, kNoDriver for primary inputs.
  std::vector<int> drivers() const {
    std::vector<int> d(nodes.size(), kNoDriver);
    for (std::size_t s = 0; s < stages.size(); ++s) d[stages[s].dynamic_node] = static_cast<int>(s);
    return d;
  }

  /// Gate-signal nodes a stage reads, in network order (may repeat).
  static std::vector<NodeId> stage_inputs(const DynamicStage& st) {
    std::vector<NodeId> in;
    st.eval_network.for_each_switch([&](const Switch& s) { in.push_back(s.gate); });
    return in;
  }

  std::size_t count_stages(StageType t) const {
    std::size_t n = 0;
    for (const auto& s : stages) n += s.type == t;
    return n;
  }

  /// Every device kind instantiated anywhere, with multiplicity.
  std::map<DeviceKind, std::size_t> device_counts() const {
    std::map<DeviceKind, std::size_t> c;
    for (const auto& st : stages) {
      switch (st.type) {
        case StageType::DynN:
          st.eval_network.for_each_switch([&](const Switch& s) { ++c[s.kind]; });
          ++c[st.p_device];
          if (st.footed) ++c[st.n_device];
          break;
        case StageType::DynP:
          st.eval_network.for_each_switch([&](const Switch& s) { ++c[s.kind]; });
          ++c[st.n_device];
          if (st.footed) ++c[st.p_device];
          break;
        case StageType::StaticInv:
          st.eval_network.for_each_switch([&](const Switch& s) { ++c[s.kind]; });
          ++c[st.p_device];
          break;
        case StageType::StaticXor:
          // two input inverters plus an 8-transistor complementary core
          c[st.n_device] += 6;
          c[st.p_device] += 6;
          break;
      }
    }
    return c;
  }

  /// Total off-state current of all devices, amperes.
  double leakage_current_a() const {
    double i = 0.0;
    for (const auto& [kind, count] : device_counts()) i += static_cast<double>(count) * device(kind).i_off_a;
    return i;
  }

  friend bool operator==(const DynamicNetlist&, const DynamicNetlist&) = default;
};

/// Lumped node capacitance: attached gate capacitance plus one wire segment
/// per fanout stage. Primary outputs count one extra fanout and drive one
/// receiving inverter (n + p gate of the flavor).
inline void assign_capacitances(DynamicNetlist& nl) {
  std::vector<double> cap(nl.nodes.size(), 0.0);
  std::vector<int> fanout(nl.nodes.size(), 0);
  std::vector<std::size_t> last_user(nl.nodes.size(), std::numeric_limits<std::size_t>::max());
  for (std::size_t s = 0; s < nl.stages.size(); ++s) {
    const auto& st = nl.stages[s];
    st.eval_network.for_each_switch([&](const Switch& sw) {
      if (st.type == StageType::StaticXor) {
        cap[sw.gate] += 2.0 * nl.device(st.n_device).c_gate_f + 2.0 * nl.device(st.p_device).c_gate_f;
      } else {
        cap[sw.gate] += nl.device(sw.kind).c_gate_f;
        if (st.type == StageType::StaticInv) cap[sw.gate] += nl.device(st.p_device).c_gate_f;
      }
      if (last_user[sw.gate] != s) {
        last_user[sw.gate] = s;
        ++fanout[sw.gate];
      }
    });
  }
  const double receiver = nl.device(n_kind(nl.flavor)).c_gate_f + nl.device(p_kind(nl.flavor)).c_gate_f;
  for (const auto& o : nl.outputs) {
    cap[o.node] += receiver;
    ++fanout[o.node];
  }
  for (std::size_t i = 0; i < nl.nodes.size(); ++i) {
    nl.nodes[i].capacitance_f = cap[i] + nl.c_wire_f * fanout[i];
  }
}

// ---------------------------------------------------------------------------
// Text format
// ---------------------------------------------------------------------------

inline std::string to_string(const SwitchGraph& g) {
  switch (g.kind()) {
    case SwitchGraph::Kind::Leaf: {
      const auto& s = g.sw();
      return std::string(to_string(s.kind)) + ":" + (s.inverted ? "!" : "") + std::to_string(s.gate);
    }
    case SwitchGraph::Kind::Series:
    case SwitchGraph::Kind::Parallel: {
      std::string out = g.kind() == SwitchGraph::Kind::Series ? "s(" : "p(";
      bool first = true;
      for (const auto& c : g.children()) {
        if (!first) out += ',';
        first = false;
        out += to_string(c);
      }
      return out + ")";
    }
  }
  return {};
}

namespace detail {

class ExprParser {
 public:
  explicit ExprParser(std::string_view s) : s_(s) {}

  SwitchGraph parse() {
    SwitchGraph g = expr();
    if (pos_ != s_.size()) fail("trailing characters");
    return g;
  }

 private:
  SwitchGraph expr() {
    if (s_.substr(pos_, 2) == "s(" || s_.substr(pos_, 2) == "p(") {
      const bool series = s_[pos_] == 's';
      pos_ += 2;
      std::vector<SwitchGraph> parts;
      while (true) {
        parts.push_back(expr());
        if (pos_ >= s_.size()) fail("unterminated group");
        if (s_[pos_] == ',') {
          ++pos_;
          continue;
        }
        if (s_[pos_] == ')') {
          ++pos_;
          break;
        }
        fail("expected ',' or ')'");
      }
      if (parts.size() < 2) fail("group with fewer than two members");
      return series ? SwitchGraph::series(std::move(parts)) : SwitchGraph::parallel(std::move(parts));
    }
    auto end = s_.find_first_of(",)", pos_);
    std::string_view lit = s_.substr(pos_, end == std::string_view::npos ? s_.size() - pos_ : end - pos_);
    pos_ += lit.size();
    auto colon = lit.find(':');
    if (colon == std::string_view::npos) fail("switch literal without ':'");
    auto kind = parse_device_kind(lit.substr(0, colon));
    if (!kind) fail("unknown device kind in switch literal");
    std::string_view gate = lit.substr(colon + 1);
    bool inverted = false;
    if (!gate.empty() && gate.front() == '!') {
      inverted = true;
      gate.remove_prefix(1);
    }
    auto id = text::parse_int(gate);
    if (!id || *id < 0) fail("bad gate node id");
    return SwitchGraph::leaf(Switch{*kind, static_cast<NodeId>(*id), inverted});
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ValidationError("switch expression '" + std::string(s_) + "' at " + std::to_string(pos_) + ": " + msg);
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline SwitchGraph parse_switch_graph(std::string_view s) { return detail::ExprParser(s).parse(); }

inline void write_netlist(std::ostream& os, const DynamicNetlist& nl) {
  using text::exact;
  os << "clachar-netlist 1\n";
  os << "flavor " << to_string(nl.flavor) << '\n';
  os << "vdd " << exact(nl.vdd_v) << '\n';
  os << "clock " << exact(nl.clock.period_s) << ' ' << exact(nl.clock.duty) << '\n';
  os << "wire " << exact(nl.c_wire_f) << '\n';
  for (const auto& [kind, d] : nl.devices) {
    os << "device " << to_string(kind) << ' ' << exact(d.v_th_v) << ' ' << exact(d.r_on_ohm) << ' '
       << exact(d.c_gate_f) << ' ' << exact(d.i_off_a) << '\n';
  }
  for (std::size_t i = 0; i < nl.nodes.size(); ++i) {
    const auto& n = nl.nodes[i];
    os << "node " << i << ' ' << n.name << ' ' << to_string(n.role) << ' ' << exact(n.capacitance_f) << '\n';
  }
  for (NodeId in : nl.inputs) os << "input " << in << '\n';
  for (const auto& st : nl.stages) {
    os << "stage " << to_string(st.type) << ' ' << to_string(st.clock_phase) << ' ' << st.dynamic_node << ' '
       << (st.footed ? "footed" : "unfooted") << " n=" << to_string(st.n_device)
       << " p=" << to_string(st.p_device) << ' ' << to_string(st.eval_network) << '\n';
  }
  for (const auto& o : nl.outputs) os << "output " << o.name << ' ' << o.node << '\n';
}

inline std::string to_text(const DynamicNetlist& nl) {
  std::ostringstream os;
  write_netlist(os, nl);
  return os.str();
}

inline DynamicNetlist read_netlist(std::istream& is) {
  DynamicNetlist nl;
  nl.devices.clear();
  std::string line;
  int line_no = 0;
  bool header = false;

  auto fail = [&](const std::string& msg) -> ValidationError {
    return ValidationError("netlist line " + std::to_string(line_no) + ": " + msg);
  };
  auto num = [&](const std::string& tok) {
    auto v = text::parse_double(tok);
    if (!v) throw fail("expected a number, got '" + tok + "'");
    return *v;
  };
  auto id = [&](const std::string& tok) {
    auto v = text::parse_int(tok);
    if (!v || *v < 0) throw fail("expected a node id, got '" + tok + "'");
    return static_cast<NodeId>(*v);
  };
  auto kind_of = [&](std::string_view tok) {
    auto k = parse_device_kind(tok);
    if (!k) throw fail("unknown device kind '" + std::string(tok) + "'");
    return *k;
  };

  while (std::getline(is, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    std::istringstream ls(line);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    const std::string& rec = tok[0];
    auto need = [&](std::size_t n) {
      if (tok.size() != n) throw fail("'" + rec + "' expects " + std::to_string(n - 1) + " fields");
    };

    if (!header) {
      if (tok.size() != 2 || rec != "clachar-netlist" || tok[1] != "1") throw fail("missing 'clachar-netlist 1' header");
      header = true;
    } else if (rec == "flavor") {
      need(2);
      nl.flavor = parse_flavor(tok[1]);
    } else if (rec == "vdd") {
      need(2);
      nl.vdd_v = num(tok[1]);
    } else if (rec == "clock") {
      need(3);
      nl.clock = ClockSpec{num(tok[1]), num(tok[2])};
    } else if (rec == "wire") {
      need(2);
      nl.c_wire_f = num(tok[1]);
    } else if (rec == "device") {
      need(6);
      const DeviceKind k = kind_of(tok[1]);
      nl.devices[k] = DeviceParams{k, num(tok[2]), num(tok[3]), num(tok[4]), num(tok[5])};
    } else if (rec == "node") {
      need(5);
      if (id(tok[1]) != nl.nodes.size()) throw fail("node ids must be dense and ascending");
      NodeRole role;
      if (tok[3] == "input") role = NodeRole::Input;
      else if (tok[3] == "dynamic") role = NodeRole::Dynamic;
      else if (tok[3] == "static") role = NodeRole::Static;
      else throw fail("unknown node role '" + tok[3] + "'");
      nl.nodes.push_back(NetNode{tok[2], role, num(tok[4])});
    } else if (rec == "input") {
      need(2);
      nl.inputs.push_back(id(tok[1]));
    } else if (rec == "stage") {
      need(8);
      DynamicStage st{StageType::DynN, SwitchGraph{}, 0, ClockPhase::None, false, DeviceKind::SiN, DeviceKind::SiP};
      if (tok[1] == "DynN") st.type = StageType::DynN;
      else if (tok[1] == "DynP") st.type = StageType::DynP;
      else if (tok[1] == "StaticInv") st.type = StageType::StaticInv;
      else if (tok[1] == "StaticXor") st.type = StageType::StaticXor;
      else throw fail("unknown stage type '" + tok[1] + "'");
      if (tok[2] == "clk") st.clock_phase = ClockPhase::Clk;
      else if (tok[2] == "clkbar") st.clock_phase = ClockPhase::ClkBar;
      else if (tok[2] == "none") st.clock_phase = ClockPhase::None;
      else throw fail("unknown clock phase '" + tok[2] + "'");
      st.dynamic_node = id(tok[3]);
      if (tok[4] != "footed" && tok[4] != "unfooted") throw fail("expected footed|unfooted");
      st.footed = tok[4] == "footed";
      if (tok[5].rfind("n=", 0) != 0 || tok[6].rfind("p=", 0) != 0) throw fail("expected n=<kind> p=<kind>");
      st.n_device = kind_of(std::string_view(tok[5]).substr(2));
      st.p_device = kind_of(std::string_view(tok[6]).substr(2));
      st.eval_network = parse_switch_graph(tok[7]);
      nl.stages.push_back(std::move(st));
    } else if (rec == "output") {
      need(3);
      nl.outputs.push_back(NamedNode{tok[1], id(tok[2])});
    } else {
      throw fail("unknown record '" + rec + "'");
    }
  }
  if (!header) throw ValidationError("empty netlist");

  const auto n = nl.nodes.size();
  for (NodeId in : nl.inputs) {
    if (in >= n) throw ValidationError("input refers to unknown node " + std::to_string(in));
  }
  for (const auto& o : nl.outputs) {
    if (o.node >= n) throw ValidationError("output refers to unknown node " + std::to_string(o.node));
  }
  std::vector<int> driven(n, 0);
  for (const auto& st : nl.stages) {
    if (st.dynamic_node >= n) throw ValidationError("stage drives unknown node " + std::to_string(st.dynamic_node));
    if (++driven[st.dynamic_node] > 1) {
      throw ValidationError("node " + std::to_string(st.dynamic_node) + " has more than one driver");
    }
    st.eval_network.for_each_switch([&](const Switch& s) {
      if (s.gate >= n) throw ValidationError("switch gate refers to unknown node " + std::to_string(s.gate));
    });
  }
  return nl;
}

inline DynamicNetlist parse_netlist(std::string_view text) {
  std::istringstream is{std::string(text)};
  return read_netlist(is);
}

}  // namespace clachar
