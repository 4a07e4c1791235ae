#include "obfus/scoap.hpp"

#include <algorithm>

#include "obfus/error.hpp"

namespace obfus {

ScoapMetrics::ScoapMetrics(std::vector<NetName> nets, std::vector<Testability> values)
    : nets_(std::move(nets)), values_(std::move(values)) {}

const Testability& ScoapMetrics::at(std::string_view net) const {
  for (std::size_t i = 0; i < nets_.size(); ++i) {
    if (nets_[i] == net) return values_[i];
  }
  throw UnknownNet("unknown net '" + std::string(net) + "'");
}

namespace {

std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) {
  return std::min(a + b, kUnobservable);
}

// A gate is lowered to a small expression tree over its input positions.
// Node 0 is the root; leaves reference input positions.
struct Node {
  enum class Op { Leaf, And, Or, Xor2, Not, Buf } op;
  bool invert = false;  // swap cc0/cc1 at this node (NAND, NOR, XNOR root)
  std::size_t leaf = 0;
  std::vector<std::size_t> children;
  std::uint64_t cc0 = 0, cc1 = 0, co = kUnobservable;
};

class Lowering {
 public:
  std::vector<Node> nodes;

  std::size_t add(Node n) {
    nodes.push_back(std::move(n));
    return nodes.size() - 1;
  }
  std::size_t leaf(std::size_t pos) { return add({Node::Op::Leaf, false, pos, {}}); }

  std::size_t xor_tree(std::vector<std::size_t> level) {
    while (level.size() > 1) {
      std::vector<std::size_t> next;
      for (std::size_t i = 0; i + 1 < level.size(); i += 2) {
        next.push_back(add({Node::Op::Xor2, false, 0, {level[i], level[i + 1]}}));
      }
      if (level.size() % 2 == 1) next.push_back(level.back());
      level = std::move(next);
    }
    return level.front();
  }
};

// Builds the expression for one gate; returns the root node index.
std::size_t lower(Lowering& l, GateKind kind, std::size_t arity) {
  std::vector<std::size_t> leaves;
  for (std::size_t i = 0; i < arity; ++i) leaves.push_back(l.leaf(i));
  switch (kind) {
    case GateKind::And: return l.add({Node::Op::And, false, 0, leaves});
    case GateKind::Nand: return l.add({Node::Op::And, true, 0, leaves});
    case GateKind::Or: return l.add({Node::Op::Or, false, 0, leaves});
    case GateKind::Nor: return l.add({Node::Op::Or, true, 0, leaves});
    case GateKind::Not: return l.add({Node::Op::Not, false, 0, leaves});
    case GateKind::Buff: return l.add({Node::Op::Buf, false, 0, leaves});
    case GateKind::Xor: return l.xor_tree(leaves);
    case GateKind::Xnor: {
      std::size_t root = l.xor_tree(leaves);
      l.nodes[root].invert = true;
      return root;
    }
    case GateKind::Mux: {
      std::size_t not_s = l.add({Node::Op::Not, false, 0, {leaves[0]}});
      std::size_t t0 = l.add({Node::Op::And, false, 0, {not_s, leaves[1]}});
      std::size_t t1 = l.add({Node::Op::And, false, 0, {leaves[0], leaves[2]}});
      return l.add({Node::Op::Or, false, 0, {t0, t1}});
    }
  }
  return 0;
}

// Children are always created before parents, so index order is a valid
// evaluation order.
void forward(std::vector<Node>& nodes, const std::vector<Testability>& in) {
  for (auto& n : nodes) {
    switch (n.op) {
      case Node::Op::Leaf:
        n.cc0 = in[n.leaf].cc0;
        n.cc1 = in[n.leaf].cc1;
        continue;
      case Node::Op::And: {
        std::uint64_t sum1 = 0, min0 = kUnobservable;
        for (auto c : n.children) {
          sum1 = sat_add(sum1, nodes[c].cc1);
          min0 = std::min(min0, nodes[c].cc0);
        }
        n.cc1 = sat_add(sum1, 1);
        n.cc0 = sat_add(min0, 1);
        break;
      }
      case Node::Op::Or: {
        std::uint64_t sum0 = 0, min1 = kUnobservable;
        for (auto c : n.children) {
          sum0 = sat_add(sum0, nodes[c].cc0);
          min1 = std::min(min1, nodes[c].cc1);
        }
        n.cc0 = sat_add(sum0, 1);
        n.cc1 = sat_add(min1, 1);
        break;
      }
      case Node::Op::Xor2: {
        const Node& a = nodes[n.children[0]];
        const Node& b = nodes[n.children[1]];
        n.cc1 = sat_add(std::min(sat_add(a.cc0, b.cc1), sat_add(a.cc1, b.cc0)), 1);
        n.cc0 = sat_add(std::min(sat_add(a.cc0, b.cc0), sat_add(a.cc1, b.cc1)), 1);
        break;
      }
      case Node::Op::Not: {
        const Node& a = nodes[n.children[0]];
        n.cc0 = sat_add(a.cc1, 1);
        n.cc1 = sat_add(a.cc0, 1);
        break;
      }
      case Node::Op::Buf: {
        const Node& a = nodes[n.children[0]];
        n.cc0 = sat_add(a.cc0, 1);
        n.cc1 = sat_add(a.cc1, 1);
        break;
      }
    }
    if (n.invert) std::swap(n.cc0, n.cc1);
  }
}

// Reverse index order visits parents before children.
void backward(std::vector<Node>& nodes, std::size_t root, std::uint64_t co_out) {
  for (auto& n : nodes) n.co = kUnobservable;
  nodes[root].co = co_out;
  for (std::size_t i = nodes.size(); i-- > 0;) {
    Node& n = nodes[i];
    if (n.op == Node::Op::Leaf || n.co >= kUnobservable) continue;
    for (std::size_t k = 0; k < n.children.size(); ++k) {
      std::uint64_t side = 0;
      switch (n.op) {
        case Node::Op::And:
          for (std::size_t j = 0; j < n.children.size(); ++j) {
            if (j != k) side = sat_add(side, nodes[n.children[j]].cc1);
          }
          break;
        case Node::Op::Or:
          for (std::size_t j = 0; j < n.children.size(); ++j) {
            if (j != k) side = sat_add(side, nodes[n.children[j]].cc0);
          }
          break;
        case Node::Op::Xor2: {
          const Node& other = nodes[n.children[1 - k]];
          side = std::min(other.cc0, other.cc1);
          break;
        }
        default: break;
      }
      Node& c = nodes[n.children[k]];
      c.co = std::min(c.co, sat_add(sat_add(n.co, side), 1));
    }
  }
}

}  // namespace

ScoapMetrics scoap(const NetGraph& graph) {
  const Netlist& nl = graph.netlist();
  std::vector<Testability> t(graph.net_count());
  for (NetId i = 0; i < graph.input_count(); ++i) t[i] = {1, 1, kUnobservable};

  std::vector<Lowering> lowered(nl.gates.size());
  std::vector<std::size_t> roots(nl.gates.size());
  for (std::size_t gi : graph.topo_gates()) {
    const Gate& g = nl.gates[gi];
    auto& l = lowered[gi];
    roots[gi] = lower(l, g.kind, g.inputs.size());
    NetId out = static_cast<NetId>(graph.input_count() + gi);
    std::vector<Testability> in;
    for (NetId f : graph.fanins(out)) in.push_back(t[f]);
    forward(l.nodes, in);
    t[out].cc0 = l.nodes[roots[gi]].cc0;
    t[out].cc1 = l.nodes[roots[gi]].cc1;
  }

  for (NetId po : graph.output_ids()) t[po].co = 0;
  const auto& order = graph.topo_gates();
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    std::size_t gi = *it;
    NetId out = static_cast<NetId>(graph.input_count() + gi);
    auto& l = lowered[gi];
    backward(l.nodes, roots[gi], t[out].co);
    auto fanins = graph.fanins(out);
    for (const auto& n : l.nodes) {
      if (n.op != Node::Op::Leaf) continue;
      NetId src = fanins[n.leaf];
      t[src].co = std::min(t[src].co, n.co);
    }
  }

  std::vector<NetName> names;
  names.reserve(graph.net_count());
  for (NetId i = 0; i < graph.net_count(); ++i) names.push_back(graph.name(i));
  return ScoapMetrics(std::move(names), std::move(t));
}

ScoapMetrics scoap(const Netlist& netlist) { return scoap(NetGraph(netlist)); }

}  // namespace obfus
