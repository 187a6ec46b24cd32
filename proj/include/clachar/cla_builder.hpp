#pragma once

// Gate-level carry-lookahead adder construction and evaluation.
//
// The adder is built from generate/propagate lookahead blocks of
// `group_size` children, composed hierarchically until one root block
// covers every bit. Carries use the OR-form propagate t = a | b so the whole
// carry network is monotone; the XOR propagate p = a ^ b only feeds the sum
// gates s = p ^ c.

#include <algorithm>
#include <cstdint>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "clachar/error.hpp"

namespace clachar {

using NodeId = std::uint32_t;
using BitVector = std::vector<std::uint8_t>;

enum class Op { Input, Const, And, Or, Not, Xor };

inline std::string_view to_string(Op op) {
  switch (op) {
    case Op::Input: return "Input";
    case Op::Const: return "Const";
    case Op::And: return "And";
    case Op::Or: return "Or";
    case Op::Not: return "Not";
    case Op::Xor: return "Xor";
  }
  return "?";
}

struct LogicNode {
  NodeId id = 0;
  Op op = Op::Input;
  std::vector<NodeId> fanins;
  std::string name;    // inputs only
  bool value = false;  // Const only
};

struct NamedNode {
  std::string name;
  NodeId node;

  friend bool operator==(const NamedNode&, const NamedNode&) = default;
};

/// Combinational DAG in definition order: every fanin id is smaller than the
/// id of the node that uses it.
class LogicNetwork {
 public:
  NodeId add_input(std::string name) {
    NodeId id = next_id();
    nodes_.push_back(LogicNode{id, Op::Input, {}, std::move(name), false});
    inputs_.push_back(id);
    return id;
  }

  NodeId add_const(bool v) {
    NodeId id = next_id();
    nodes_.push_back(LogicNode{id, Op::Const, {}, {}, v});
    return id;
  }

  NodeId add_gate(Op op, std::vector<NodeId> fanins) {
    if (op == Op::Input || op == Op::Const) throw ValidationError("add_gate: not a gate op");
    if (fanins.empty()) throw ValidationError("add_gate: gate without fanins");
    if (op == Op::Not && fanins.size() != 1) throw ValidationError("add_gate: Not takes one fanin");
    if (op == Op::Xor && fanins.size() != 2) throw ValidationError("add_gate: Xor takes two fanins");
    NodeId id = next_id();
    for (NodeId f : fanins) {
      if (f >= id) throw ValidationError("add_gate: fanin " + std::to_string(f) + " not yet defined");
    }
    nodes_.push_back(LogicNode{id, op, std::move(fanins), {}, false});
    return id;
  }

  NodeId add_and(std::vector<NodeId> f) { return f.size() == 1 ? f[0] : add_gate(Op::And, std::move(f)); }
  NodeId add_or(std::vector<NodeId> f) { return f.size() == 1 ? f[0] : add_gate(Op::Or, std::move(f)); }

  void add_output(std::string name, NodeId id) {
    if (id >= nodes_.size()) throw ValidationError("add_output: unknown node");
    outputs_.push_back(NamedNode{std::move(name), id});
  }

  const std::vector<LogicNode>& nodes() const { return nodes_; }
  const LogicNode& node(NodeId id) const { return nodes_.at(id); }
  const std::vector<NodeId>& inputs() const { return inputs_; }
  const std::vector<NamedNode>& outputs() const { return outputs_; }
  std::size_t size() const { return nodes_.size(); }

  int bit_width = 0;
  int lookahead_group_size = 0;

  /// Number of gate fanins plus output references per node.
  std::vector<int> fanout_counts() const {
    std::vector<int> fo(nodes_.size(), 0);
    for (const auto& n : nodes_) {
      for (NodeId f : n.fanins) ++fo[f];
    }
    for (const auto& o : outputs_) ++fo[o.node];
    return fo;
  }

  /// Drops gates and constants that no output depends on and renumbers the
  /// rest, preserving relative order. Inputs are always kept.
  void prune() {
    std::vector<bool> live(nodes_.size(), false);
    for (const auto& o : outputs_) live[o.node] = true;
    for (std::size_t i = nodes_.size(); i-- > 0;) {
      if (!live[i]) continue;
      for (NodeId f : nodes_[i].fanins) live[f] = true;
    }
    for (NodeId in : inputs_) live[in] = true;

    std::vector<NodeId> remap(nodes_.size(), 0);
    std::vector<LogicNode> kept;
    for (auto& n : nodes_) {
      if (!live[n.id]) continue;
      remap[n.id] = static_cast<NodeId>(kept.size());
      n.id = remap[n.id];
      for (NodeId& f : n.fanins) f = remap[f];
      kept.push_back(std::move(n));
    }
    nodes_ = std::move(kept);
    for (NodeId& in : inputs_) in = remap[in];
    for (auto& o : outputs_) o.node = remap[o.node];
  }

 private:
  NodeId next_id() const { return static_cast<NodeId>(nodes_.size()); }

  std::vector<LogicNode> nodes_;
  std::vector<NodeId> inputs_;
  std::vector<NamedNode> outputs_;
};

inline bool is_supported_width(int bits) { return bits == 8 || bits == 16 || bits == 32 || bits == 64; }

inline std::uint64_t width_mask(int bits) { return bits >= 64 ? ~0ULL : ((1ULL << bits) - 1); }

namespace detail {

struct LookaheadBlock {
  NodeId generate;
  NodeId propagate;
  std::vector<LookaheadBlock> children;
  int lo;
  int width;
};

class ClaConstruction {
 public:
  ClaConstruction(LogicNetwork& net, int group) : net_(net), group_(group) {}

  std::vector<NodeId> g, t, p, carry;

  LookaheadBlock block(int lo, int width) {
    if (width == 1) return LookaheadBlock{g[lo], t[lo], {}, lo, 1};
    int child_width = 1;
    while (child_width * group_ < width) child_width *= group_;
    LookaheadBlock b{0, 0, {}, lo, width};
    for (int c = lo; c < lo + width; c += child_width) b.children.push_back(block(c, child_width));

    const auto& ch = b.children;
    const int m = static_cast<int>(ch.size());
    std::vector<NodeId> terms;
    for (int k = 0; k < m; ++k) {
      std::vector<NodeId> term;
      for (int j = m - 1; j > k; --j) term.push_back(ch[j].propagate);
      term.push_back(ch[k].generate);
      terms.push_back(net_.add_and(std::move(term)));
    }
    b.generate = net_.add_or(std::move(terms));
    std::vector<NodeId> ps;
    for (const auto& c : ch) ps.push_back(c.propagate);
    b.propagate = net_.add_and(std::move(ps));
    return b;
  }

  // Carry into child k: G_{k-1} + P_{k-1} G_{k-2} + ... + P_{k-1}..P_0 c_in.
  void assign_carries(const LookaheadBlock& b, NodeId carry_in) {
    if (b.width == 1) {
      carry[b.lo] = carry_in;
      return;
    }
    const auto& ch = b.children;
    for (std::size_t k = 0; k < ch.size(); ++k) {
      NodeId ck = carry_in;
      if (k > 0) {
        std::vector<NodeId> terms;
        for (std::size_t j = k; j-- > 0;) {
          std::vector<NodeId> term;
          for (std::size_t i = k - 1; i > j; --i) term.push_back(ch[i].propagate);
          term.push_back(ch[j].generate);
          terms.push_back(net_.add_and(std::move(term)));
        }
        std::vector<NodeId> chain;
        for (std::size_t i = k; i-- > 0;) chain.push_back(ch[i].propagate);
        chain.push_back(carry_in);
        terms.push_back(net_.add_and(std::move(chain)));
        ck = net_.add_or(std::move(terms));
      }
      assign_carries(ch[k], ck);
    }
  }

 private:
  LogicNetwork& net_;
  int group_;
};

}  // namespace detail

/// Builds an N-bit carry-lookahead adder, N in {8, 16, 32, 64}.
///
/// Inputs are a[0..N-1], b[0..N-1], cin in that order; outputs are
/// sum[0..N-1] followed by cout.
inline LogicNetwork build_cla(int bit_width, int group_size = 4) {
  if (!is_supported_width(bit_width)) {
    throw ValidationError("unsupported bit width " + std::to_string(bit_width) +
                          " (expected 8, 16, 32 or 64)");
  }
  if (group_size < 2 || (group_size & (group_size - 1)) != 0 || group_size > bit_width) {
    throw ValidationError("lookahead group size must be a power of two in [2, bit width]");
  }
  LogicNetwork net;
  net.bit_width = bit_width;
  net.lookahead_group_size = group_size;

  std::vector<NodeId> a(bit_width), b(bit_width);
  for (int i = 0; i < bit_width; ++i) a[i] = net.add_input("a[" + std::to_string(i) + "]");
  for (int i = 0; i < bit_width; ++i) b[i] = net.add_input("b[" + std::to_string(i) + "]");
  const NodeId cin = net.add_input("cin");

  detail::ClaConstruction cla(net, group_size);
  cla.g.resize(bit_width);
  cla.t.resize(bit_width);
  cla.p.resize(bit_width);
  cla.carry.resize(bit_width);
  for (int i = 0; i < bit_width; ++i) {
    cla.g[i] = net.add_gate(Op::And, {a[i], b[i]});
    cla.t[i] = net.add_gate(Op::Or, {a[i], b[i]});
    cla.p[i] = net.add_gate(Op::Xor, {a[i], b[i]});
  }

  const auto root = cla.block(0, bit_width);
  cla.assign_carries(root, cin);
  const NodeId cout = net.add_or({root.generate, net.add_and({root.propagate, cin})});

  for (int i = 0; i < bit_width; ++i) {
    net.add_output("sum[" + std::to_string(i) + "]", net.add_gate(Op::Xor, {cla.p[i], cla.carry[i]}));
  }
  net.add_output("cout", cout);
  net.prune();
  return net;
}

/// Topological evaluation. `inputs` holds one bit per Input node, in input order.
inline BitVector evaluate_all(const LogicNetwork& net, const BitVector& inputs) {
  if (inputs.size() != net.inputs().size()) {
    throw ValidationError("evaluate: expected " + std::to_string(net.inputs().size()) +
                          " input bits, got " + std::to_string(inputs.size()));
  }
  BitVector v(net.size(), 0);
  for (std::size_t i = 0; i < inputs.size(); ++i) v[net.inputs()[i]] = inputs[i] ? 1 : 0;
  for (const auto& n : net.nodes()) {
    switch (n.op) {
      case Op::Input: break;
      case Op::Const: v[n.id] = n.value; break;
      case Op::And: {
        std::uint8_t r = 1;
        for (NodeId f : n.fanins) r &= v[f];
        v[n.id] = r;
        break;
      }
      case Op::Or: {
        std::uint8_t r = 0;
        for (NodeId f : n.fanins) r |= v[f];
        v[n.id] = r;
        break;
      }
      case Op::Not: v[n.id] = v[n.fanins[0]] ^ 1; break;
      case Op::Xor: v[n.id] = v[n.fanins[0]] ^ v[n.fanins[1]]; break;
    }
  }
  return v;
}

/// Output bits in output order.
inline BitVector evaluate(const LogicNetwork& net, const BitVector& inputs) {
  const BitVector v = evaluate_all(net, inputs);
  BitVector out;
  out.reserve(net.outputs().size());
  for (const auto& o : net.outputs()) out.push_back(v[o.node]);
  return out;
}

struct AdderVector {
  std::uint64_t a = 0;
  std::uint64_t b = 0;
  bool cin = false;

  friend bool operator==(const AdderVector&, const AdderVector&) = default;
};

struct AdderResult {
  std::uint64_t sum = 0;
  bool cout = false;

  friend bool operator==(const AdderResult&, const AdderResult&) = default;
};

inline BitVector encode_inputs(int bits, const AdderVector& v) {
  BitVector in;
  in.reserve(2 * bits + 1);
  for (int i = 0; i < bits; ++i) in.push_back((v.a >> i) & 1);
  for (int i = 0; i < bits; ++i) in.push_back((v.b >> i) & 1);
  in.push_back(v.cin ? 1 : 0);
  return in;
}

inline AdderResult decode_outputs(int bits, const BitVector& out) {
  if (out.size() != static_cast<std::size_t>(bits) + 1) {
    throw ValidationError("decode_outputs: expected " + std::to_string(bits + 1) + " bits");
  }
  AdderResult r;
  for (int i = 0; i < bits; ++i) r.sum |= static_cast<std::uint64_t>(out[i] & 1) << i;
  r.cout = out[bits] != 0;
  return r;
}

inline AdderResult add(const LogicNetwork& net, const AdderVector& v) {
  return decode_outputs(net.bit_width, evaluate(net, encode_inputs(net.bit_width, v)));
}

/// Full carry-propagate stimulus: a = all ones, b = 1, c_in = 0.
inline AdderVector critical_vector(int bit_width) {
  if (!is_supported_width(bit_width)) {
    throw ValidationError("unsupported bit width " + std::to_string(bit_width));
  }
  return AdderVector{width_mask(bit_width), 1, false};
}

/// Gate depth of every node; inputs and constants are at depth 0.
inline std::vector<int> node_depths(const LogicNetwork& net) {
  std::vector<int> d(net.size(), 0);
  for (const auto& n : net.nodes()) {
    for (NodeId f : n.fanins) d[n.id] = std::max(d[n.id], d[f] + 1);
  }
  return d;
}

inline int output_depth(const LogicNetwork& net, std::string_view output) {
  const auto d = node_depths(net);
  for (const auto& o : net.outputs()) {
    if (o.name == output) return d[o.node];
  }
  throw ValidationError("no output named " + std::string(output));
}

/// One node per line: `<id> <op> <fanin ids...>`, inputs carry their name and
/// constants their value; then one `output <name> <id>` line per output.
inline void write_listing(std::ostream& os, const LogicNetwork& net) {
  os << "# cla " << net.bit_width << " bits, group " << net.lookahead_group_size << '\n';
  for (const auto& n : net.nodes()) {
    os << n.id << ' ' << to_string(n.op);
    if (n.op == Op::Input) os << ' ' << n.name;
    if (n.op == Op::Const) os << ' ' << (n.value ? 1 : 0);
    for (NodeId f : n.fanins) os << ' ' << f;
    os << '\n';
  }
  for (const auto& o : net.outputs()) os << "output " << o.name << ' ' << o.node << '\n';
}

inline std::string listing(const LogicNetwork& net) {
  std::ostringstream os;
  write_listing(os, net);
  return os.str();
}

}  // namespace clachar
