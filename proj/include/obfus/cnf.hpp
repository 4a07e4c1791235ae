#pragma once

#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "obfus/netlist.hpp"

namespace obfus {

/// DIMACS conventions: variables are 1-based, a literal is a signed
/// variable index.
using Lit = int;

struct CnfFormula {
  int var_count = 0;
  std::vector<std::vector<Lit>> clauses;

  int new_var() { return ++var_count; }
  /// Throws std::invalid_argument for literal 0 or an out-of-range variable.
  void add(std::vector<Lit> clause);
  bool has_empty_clause() const;
  /// `model[v]` is the value of variable v; index 0 is unused.
  bool satisfied_by(const std::vector<bool>& model) const;

  bool operator==(const CnfFormula&) const = default;
};

/// Net <-> variable bijection for one encoded circuit copy.
class VarMap {
 public:
  void bind(const NetName& net, int var);
  /// Throws UnknownNet.
  int var(std::string_view net) const;
  const NetName* net(int var) const;
  std::size_t size() const noexcept { return by_net_.size(); }
  const std::vector<std::pair<NetName, int>>& entries() const noexcept { return entries_; }

 private:
  std::unordered_map<std::string, int> by_net_;
  std::unordered_map<int, std::size_t> by_var_;
  std::vector<std::pair<NetName, int>> entries_;
};

/// Appends one copy of `graph` to `cnf` and returns the literal carrying
/// each net (indexed by NetId). A non-zero `bound[id]` reuses that literal
/// for the net (only meaningful for primary inputs); every other net gets
/// a fresh variable in id order. XOR chain auxiliaries are allocated after
/// all net variables, gate by gate in topological order.
std::vector<Lit> encode_circuit(const NetGraph& graph, CnfFormula& cnf,
                                std::span<const Lit> bound = {});

/// One variable per net: variable id + 1 for NetId id.
std::pair<CnfFormula, VarMap> tseitin(const Netlist& netlist);

/// Clause blocks for one gate with output literal `y`. Exposed for tests.
void encode_gate(CnfFormula& cnf, GateKind kind, Lit y, std::span<const Lit> inputs);

/// y <-> (a xor b).
void encode_xor2(CnfFormula& cnf, Lit y, Lit a, Lit b);

}  // namespace obfus
