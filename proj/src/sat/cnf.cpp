#include "obfus/cnf.hpp"

#include <cstdlib>
#include <stdexcept>

#include "obfus/error.hpp"

namespace obfus {

void CnfFormula::add(std::vector<Lit> clause) {
  for (Lit l : clause) {
    if (l == 0 || std::abs(l) > var_count) {
      throw std::invalid_argument("literal " + std::to_string(l) + " outside 1.." +
                                  std::to_string(var_count));
    }
  }
  clauses.push_back(std::move(clause));
}

bool CnfFormula::has_empty_clause() const {
  for (const auto& c : clauses) {
    if (c.empty()) return true;
  }
  return false;
}

bool CnfFormula::satisfied_by(const std::vector<bool>& model) const {
  for (const auto& c : clauses) {
    bool sat = false;
    for (Lit l : c) {
      const auto v = static_cast<std::size_t>(std::abs(l));
      if (v < model.size() && model[v] == (l > 0)) {
        sat = true;
        break;
      }
    }
    if (!sat) return false;
  }
  return true;
}

void VarMap::bind(const NetName& net, int var) {
  if (by_net_.count(net)) throw std::invalid_argument("net '" + net + "' bound twice");
  if (by_var_.count(var)) throw std::invalid_argument("variable bound twice");
  by_net_.emplace(net, var);
  by_var_.emplace(var, entries_.size());
  entries_.emplace_back(net, var);
}

int VarMap::var(std::string_view net) const {
  auto it = by_net_.find(std::string(net));
  if (it == by_net_.end()) throw UnknownNet("no variable for net '" + std::string(net) + "'");
  return it->second;
}

const NetName* VarMap::net(int var) const {
  auto it = by_var_.find(var);
  return it == by_var_.end() ? nullptr : &entries_[it->second].first;
}

void encode_xor2(CnfFormula& cnf, Lit y, Lit a, Lit b) {
  cnf.add({-y, a, b});
  cnf.add({-y, -a, -b});
  cnf.add({y, -a, b});
  cnf.add({y, a, -b});
}

void encode_gate(CnfFormula& cnf, GateKind kind, Lit y, std::span<const Lit> in) {
  switch (kind) {
    case GateKind::And:
    case GateKind::Nand:
    case GateKind::Or:
    case GateKind::Nor: {
      // OR(y; x) is AND(-y; -x); NAND/NOR complement y.
      const bool is_or = kind == GateKind::Or || kind == GateKind::Nor;
      const bool invert = kind == GateKind::Nand || kind == GateKind::Nor;
      Lit out = invert ? -y : y;
      if (is_or) out = -out;
      const int s = is_or ? -1 : 1;
      std::vector<Lit> big{out};
      for (Lit x : in) {
        cnf.add({-out, s * x});
        big.push_back(-s * x);
      }
      cnf.add(std::move(big));
      return;
    }
    case GateKind::Not:
      cnf.add({y, in[0]});
      cnf.add({-y, -in[0]});
      return;
    case GateKind::Buff:
      cnf.add({-y, in[0]});
      cnf.add({y, -in[0]});
      return;
    case GateKind::Xor:
    case GateKind::Xnor: {
      const Lit out = kind == GateKind::Xnor ? -y : y;
      Lit acc = in[0];
      for (std::size_t i = 1; i + 1 < in.size(); ++i) {
        Lit t = cnf.new_var();
        encode_xor2(cnf, t, acc, in[i]);
        acc = t;
      }
      encode_xor2(cnf, out, acc, in.back());
      return;
    }
    case GateKind::Mux: {
      const Lit s = in[0], a = in[1], b = in[2];
      cnf.add({s, -a, y});
      cnf.add({s, a, -y});
      cnf.add({-s, -b, y});
      cnf.add({-s, b, -y});
      // Redundant, but they let propagation conclude y when a == b.
      cnf.add({-a, -b, y});
      cnf.add({a, b, -y});
      return;
    }
  }
}

std::vector<Lit> encode_circuit(const NetGraph& graph, CnfFormula& cnf, std::span<const Lit> bound) {
  const std::size_t n = graph.net_count();
  std::vector<Lit> lit(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    lit[i] = (i < bound.size() && bound[i] != 0) ? bound[i] : cnf.new_var();
  }
  std::vector<Lit> ins;
  for (std::size_t gi : graph.topo_gates()) {
    const Gate& g = graph.netlist().gates[gi];
    ins.clear();
    for (const auto& name : g.inputs) ins.push_back(lit[graph.id(name)]);
    encode_gate(cnf, g.kind, lit[graph.id(g.output)], ins);
  }
  return lit;
}

std::pair<CnfFormula, VarMap> tseitin(const Netlist& netlist) {
  NetGraph graph(netlist);
  CnfFormula cnf;
  auto lits = encode_circuit(graph, cnf);
  VarMap map;
  for (std::size_t i = 0; i < lits.size(); ++i) map.bind(graph.name(static_cast<NetId>(i)), lits[i]);
  return {std::move(cnf), std::move(map)};
}

}  // namespace obfus
