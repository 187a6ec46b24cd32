#pragma once

// Lowering of a monotone logic network into domino or NP (NORA) dynamic
// logic, and the static monotonicity check on the result.
//
// Domino: every And/Or becomes a footed DynN stage (And -> series,
// Or -> parallel) followed by a StaticInv; consumers read the inverter.
//
// NP: stages alternate between DynN on clk and DynP on clkbar with no
// inverters. A DynN node carries the complement of its function, so a DynP
// stage built on the same series-parallel shape over those nodes produces
// the true function (De Morgan on the complemented rails). Nodes needed at
// both parities are instantiated once per parity. Outputs are taken from
// DynP stages, which carry true polarity.
//
// Xor nodes become StaticXor gates; they may read dynamic outputs but may
// not feed a dynamic stage. Primary inputs are stable during evaluation and
// available in both polarities.

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "clachar/cla_builder.hpp"
#include "clachar/dynamic_netlist.hpp"
#include "clachar/error.hpp"
#include "clachar/tech_models.hpp"

namespace clachar {

enum class Style { Domino, Np };

inline std::string_view to_string(Style s) { return s == Style::Domino ? "domino" : "np"; }

inline Style parse_style(std::string_view s) {
  if (s == "domino") return Style::Domino;
  if (s == "np") return Style::Np;
  throw ValidationError("unknown style '" + std::string(s) + "' (expected domino or np)");
}

struct MapOptions {
  // Fold single-fanout And/Or nodes into their consumer's switch network.
  bool merge_single_fanout = false;
  // NP only: realize a node once per required parity. When false each node
  // gets the parity of its logic level and a mismatch is a MappingError.
  bool duplicate_for_parity = true;
};

namespace detail {

enum class Parity { N, P };

inline Parity opposite(Parity p) { return p == Parity::N ? Parity::P : Parity::N; }

class Lowering {
 public:
  Lowering(const LogicNetwork& net, const TechnologyConfig& tech, const ParameterSet& params, Style style,
           MapOptions opt)
      : net_(net), style_(style), opt_(opt), fanout_(net.fanout_counts()) {
    require_valid(tech);
    nk_ = n_kind(tech.flavor);
    pk_ = p_kind(tech.flavor);
    nl_.flavor = tech.flavor;
    nl_.vdd_v = tech.vdd_v;
    nl_.clock = ClockSpec{1.0 / tech.clock_hz, 0.5};
    nl_.c_wire_f = params.c_wire_f;
    nl_.devices.emplace(nk_, derive_device_params(tech, nk_, params));
    nl_.devices.emplace(pk_, derive_device_params(tech, pk_, params));

    input_node_.assign(net.size(), kUnmapped);
    for (NodeId in : net.inputs()) input_node_[in] = nl_.add_node(net.node(in).name, NodeRole::Input);
    for (NodeId in : net.inputs()) nl_.inputs.push_back(input_node_[in]);
    if (style_ == Style::Np && !opt_.duplicate_for_parity) fixed_parity_ = level_parities();
  }

  DynamicNetlist run() {
    for (const auto& o : net_.outputs()) nl_.outputs.push_back(NamedNode{o.name, output_signal(o.node)});
    assign_capacitances(nl_);
    return std::move(nl_);
  }

 private:
  static constexpr NodeId kUnmapped = ~NodeId{0};

  bool is_monotone_gate(NodeId id) const {
    const Op op = net_.node(id).op;
    return op == Op::And || op == Op::Or;
  }

  bool is_output(NodeId id) const {
    for (const auto& o : net_.outputs()) {
      if (o.node == id) return true;
    }
    return false;
  }

  bool merges(NodeId id) const { return opt_.merge_single_fanout && fanout_[id] == 1 && !is_output(id); }

  // Signal holding the true value of `id` for a static gate or an output.
  NodeId output_signal(NodeId id) {
    const auto& n = net_.node(id);
    switch (n.op) {
      case Op::Input: return input_node_[id];
      case Op::Xor: return static_xor(id);
      case Op::And:
      case Op::Or:
        if (style_ == Style::Domino) return domino(id);
        if (opt_.duplicate_for_parity) return np(id, Parity::P);
        return np_fixed_output(id);
      case Op::Const:
      case Op::Not:
        break;
    }
    throw MappingError("node " + std::to_string(id) + " (" + std::string(to_string(n.op)) +
                       ") cannot be realized as a static signal");
  }

  NodeId static_xor(NodeId id) {
    auto it = xor_node_.find(id);
    if (it != xor_node_.end()) return it->second;
    std::vector<SwitchGraph> operands;
    for (NodeId f : net_.node(id).fanins) {
      const auto& fn = net_.node(f);
      if (fn.op == Op::Not && net_.node(fn.fanins[0]).op == Op::Input) {
        operands.push_back(SwitchGraph::leaf(Switch{nk_, input_node_[fn.fanins[0]], true}));
      } else {
        operands.push_back(SwitchGraph::leaf(Switch{nk_, output_signal(f), false}));
      }
    }
    const NodeId out = nl_.add_node("x" + std::to_string(id), NodeRole::Static);
    nl_.stages.push_back(DynamicStage{StageType::StaticXor, SwitchGraph::series(std::move(operands)), out,
                                      ClockPhase::None, false, nk_, pk_});
    xor_node_.emplace(id, out);
    return out;
  }

  // Switch network of a dynamic stage of parity `stage` computing node `id`.
  SwitchGraph network(NodeId id, Parity stage) {
    const auto& n = net_.node(id);
    std::vector<SwitchGraph> parts;
    for (NodeId f : n.fanins) parts.push_back(literal(f, stage, id));
    return n.op == Op::And ? SwitchGraph::series(std::move(parts)) : SwitchGraph::parallel(std::move(parts));
  }

  SwitchGraph literal(NodeId f, Parity stage, NodeId consumer) {
    const DeviceKind kind = stage == Parity::N ? nk_ : pk_;
    // A p-switch conducts on a low gate, so stable inputs are read through
    // the complement rail to keep "conducts when the literal is true".
    const bool p_stage = stage == Parity::P;
    const auto& fn = net_.node(f);
    if (fn.op == Op::Input) return SwitchGraph::leaf(Switch{kind, input_node_[f], p_stage});
    if (fn.op == Op::Not && net_.node(fn.fanins[0]).op == Op::Input) {
      return SwitchGraph::leaf(Switch{kind, input_node_[fn.fanins[0]], !p_stage});
    }
    if (!is_monotone_gate(f)) {
      throw MappingError("node " + std::to_string(f) + " (" + std::string(to_string(fn.op)) +
                         ") is not monotone but feeds dynamic node " + std::to_string(consumer));
    }
    if (merges(f)) return network(f, stage);
    if (style_ == Style::Domino) return SwitchGraph::leaf(Switch{kind, domino(f), false});
    const Parity want = opposite(stage);
    if (opt_.duplicate_for_parity) return SwitchGraph::leaf(Switch{kind, np(f, want), false});
    if (fixed_parity_[f] != want) {
      throw MappingError("parity conflict at node " + std::to_string(consumer) + ": fanin " + std::to_string(f) +
                         " has the same parity as its consumer");
    }
    return SwitchGraph::leaf(Switch{kind, np(f, want), false});
  }

  NodeId domino(NodeId id) {
    auto it = domino_node_.find(id);
    if (it != domino_node_.end()) return it->second;
    SwitchGraph net = network(id, Parity::N);
    const NodeId dyn = nl_.add_node("d" + std::to_string(id), NodeRole::Dynamic);
    nl_.stages.push_back(DynamicStage{StageType::DynN, std::move(net), dyn, ClockPhase::Clk, true, nk_, pk_});
    const NodeId out = nl_.add_node("n" + std::to_string(id), NodeRole::Static);
    nl_.stages.push_back(DynamicStage{StageType::StaticInv, SwitchGraph::leaf(Switch{nk_, dyn, false}), out,
                                      ClockPhase::None, false, nk_, pk_});
    domino_node_.emplace(id, out);
    return out;
  }

  NodeId np(NodeId id, Parity parity) {
    auto key = std::make_pair(id, parity);
    auto it = np_node_.find(key);
    if (it != np_node_.end()) return it->second;
    SwitchGraph net = network(id, parity);
    const bool n = parity == Parity::N;
    const NodeId dyn = nl_.add_node("n" + std::to_string(id) + (n ? "N" : "P"), NodeRole::Dynamic);
    nl_.stages.push_back(DynamicStage{n ? StageType::DynN : StageType::DynP, std::move(net), dyn,
                                      n ? ClockPhase::Clk : ClockPhase::ClkBar, true, nk_, pk_});
    np_node_.emplace(key, dyn);
    return dyn;
  }

  // Fixed-parity mode: an output computed on a DynN stage carries the
  // complement and is restored by a static inverter.
  NodeId np_fixed_output(NodeId id) {
    const NodeId dyn = np(id, fixed_parity_[id]);
    if (fixed_parity_[id] == Parity::P) return dyn;
    const NodeId out = nl_.add_node("n" + std::to_string(id), NodeRole::Static);
    nl_.stages.push_back(DynamicStage{StageType::StaticInv, SwitchGraph::leaf(Switch{nk_, dyn, false}), out,
                                      ClockPhase::None, false, nk_, pk_});
    return out;
  }

  // Stage level of each And/Or node counted from the inputs; odd levels are
  // DynN, even levels DynP.
  std::vector<Parity> level_parities() const {
    std::vector<int> level(net_.size(), 0);
    std::vector<Parity> parity(net_.size(), Parity::N);
    for (const auto& n : net_.nodes()) {
      if (!is_monotone_gate(n.id)) continue;
      int l = 0;
      for (NodeId f : n.fanins) {
        if (is_monotone_gate(f)) l = std::max(l, level[f]);
      }
      level[n.id] = l + 1;
      parity[n.id] = level[n.id] % 2 == 1 ? Parity::N : Parity::P;
    }
    return parity;
  }

  const LogicNetwork& net_;
  Style style_;
  MapOptions opt_;
  std::vector<int> fanout_;
  DeviceKind nk_ = DeviceKind::SiN;
  DeviceKind pk_ = DeviceKind::SiP;
  DynamicNetlist nl_;
  std::vector<NodeId> input_node_;
  std::vector<Parity> fixed_parity_;
  std::map<NodeId, NodeId> domino_node_;
  std::map<NodeId, NodeId> xor_node_;
  std::map<std::pair<NodeId, Parity>, NodeId> np_node_;
};

}  // namespace detail

inline DynamicNetlist map_domino(const LogicNetwork& net, const TechnologyConfig& tech, const ParameterSet& params,
                                 MapOptions opt = {}) {
  return detail::Lowering(net, tech, params, Style::Domino, opt).run();
}

inline DynamicNetlist map_domino(const LogicNetwork& net, const TechnologyConfig& tech) {
  return map_domino(net, tech, bundled_parameters(tech.flavor));
}

inline DynamicNetlist map_np_dynamic(const LogicNetwork& net, const TechnologyConfig& tech,
                                     const ParameterSet& params, MapOptions opt = {}) {
  return detail::Lowering(net, tech, params, Style::Np, opt).run();
}

inline DynamicNetlist map_np_dynamic(const LogicNetwork& net, const TechnologyConfig& tech) {
  return map_np_dynamic(net, tech, bundled_parameters(tech.flavor));
}

inline DynamicNetlist map_network(const LogicNetwork& net, Style style, const TechnologyConfig& tech,
                                  const ParameterSet& params, MapOptions opt = {}) {
  return style == Style::Domino ? map_domino(net, tech, params, opt) : map_np_dynamic(net, tech, params, opt);
}

struct MonotonicityViolation {
  NodeId source;      // offending gate signal
  std::size_t stage;  // index of the consuming stage
  std::string reason;
};

/// A DynN stage may read primary inputs, DynP nodes, or inverters fed by a
/// DynN node; a DynP stage the mirror image. Complement rails are only
/// available for primary inputs.
inline std::vector<MonotonicityViolation> check_monotonicity(const DynamicNetlist& nl) {
  std::vector<MonotonicityViolation> out;
  const auto drv = nl.drivers();

  auto driver_type = [&](NodeId n) -> const DynamicStage* {
    return drv[n] == kNoDriver ? nullptr : &nl.stages[drv[n]];
  };

  for (std::size_t s = 0; s < nl.stages.size(); ++s) {
    const auto& st = nl.stages[s];
    if (!is_dynamic(st.type)) continue;
    const StageType same = st.type;
    const StageType other = same == StageType::DynN ? StageType::DynP : StageType::DynN;
    st.eval_network.for_each_switch([&](const Switch& sw) {
      const DynamicStage* src = driver_type(sw.gate);
      if (src == nullptr) {
        if (nl.nodes[sw.gate].role != NodeRole::Input) {
          out.push_back({sw.gate, s, "undriven node " + nl.nodes[sw.gate].name});
        }
        return;
      }
      if (sw.inverted) {
        out.push_back({sw.gate, s, "complement of internal node " + nl.nodes[sw.gate].name});
        return;
      }
      if (src->type == other) return;
      if (src->type == StageType::StaticInv) {
        const NodeId in = src->eval_network.sw().gate;
        const DynamicStage* before = driver_type(in);
        if (before != nullptr && before->type == same) return;
      }
      out.push_back({sw.gate, s,
                     std::string(to_string(src->type)) + " node " + nl.nodes[sw.gate].name + " drives " +
                         std::string(to_string(st.type)) + " node " + nl.nodes[st.dynamic_node].name});
    });
  }
  return out;
}

}  // namespace clachar
