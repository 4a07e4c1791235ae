#include <gtest/gtest.h>

#include "obfus/cnf.hpp"
#include "obfus/sat.hpp"
#include "testutil.hpp"

using namespace obfus;

namespace {

// Gate truth table straight from the clause set: y is forced to the
// reference value, and the opposite value violates some clause.
void check_gate_block(GateKind kind, std::size_t arity) {
  for (std::uint32_t p = 0; p < (1u << arity); ++p) {
    std::vector<bool> in;
    for (std::size_t i = 0; i < arity; ++i) in.push_back((p >> i) & 1);
    const bool want = testutil::ref_gate(kind, in);
    for (bool y : {false, true}) {
      CnfFormula f;
      std::vector<Lit> ins;
      for (std::size_t i = 0; i < arity; ++i) ins.push_back(f.new_var());
      const Lit out = f.new_var();
      encode_gate(f, kind, out, ins);
      // Auxiliary variables (XOR chains) are existentially quantified.
      const int aux = f.var_count - static_cast<int>(arity) - 1;
      bool some_model = false;
      for (std::uint32_t a = 0; a < (1u << aux) && !some_model; ++a) {
        std::vector<bool> m(f.var_count + 1);
        for (std::size_t i = 0; i < arity; ++i) m[i + 1] = in[i];
        m[out] = y;
        for (int j = 0; j < aux; ++j) m[out + 1 + j] = (a >> j) & 1;
        some_model = f.satisfied_by(m);
      }
      ASSERT_EQ(some_model, y == want) << to_string(kind) << " arity " << arity << " pattern " << p;
    }
  }
}

}  // namespace

TEST(Tseitin, AndBlockSize) {
  Netlist n;
  n.inputs = {"a", "b"};
  n.outputs = {"y"};
  n.gates = {{"y", GateKind::And, {"a", "b"}}};
  auto [cnf, vars] = tseitin(n);
  EXPECT_EQ(cnf.clauses.size(), 3u);
  EXPECT_EQ(cnf.var_count, 3);
  EXPECT_EQ(vars.var("a"), 1);
  EXPECT_EQ(vars.var("y"), 3);
  EXPECT_EQ(*vars.net(2), "b");
}

TEST(Tseitin, NotBlockSize) {
  CnfFormula f;
  f.var_count = 2;
  encode_gate(f, GateKind::Not, 2, std::vector<Lit>{1});
  EXPECT_EQ(f.clauses.size(), 2u);
}

TEST(Tseitin, GateBlocksMatchTruthTables) {
  for (GateKind k : {GateKind::And, GateKind::Nand, GateKind::Or, GateKind::Nor, GateKind::Xor, GateKind::Xnor}) {
    for (std::size_t a : {2u, 3u, 4u}) check_gate_block(k, a);
  }
  check_gate_block(GateKind::Not, 1);
  check_gate_block(GateKind::Buff, 1);
  check_gate_block(GateKind::Mux, 3);
}

TEST(Tseitin, AddRejectsBadLiterals) {
  CnfFormula f;
  f.var_count = 2;
  EXPECT_THROW(f.add({1, 0}), std::invalid_argument);
  EXPECT_THROW(f.add({3}), std::invalid_argument);
  f.add({});
  EXPECT_TRUE(f.has_empty_clause());
}

// For every random circuit and every input pattern: the model found under
// the pattern matches simulation on every net, and flipping any net is
// unsatisfiable.
TEST(Tseitin, AgreesWithSimulationOnRandomCircuits) {
  std::mt19937_64 rng(99);
  for (int c = 0; c < 1000; ++c) {
    auto n = testutil::random_netlist(rng, {4, 6, true, true});
    auto [cnf, vars] = tseitin(n);
    Solver s;
    s.add_formula(cnf);
    for (std::uint64_t p = 0; p < (1u << n.inputs.size()); ++p) {
      auto in = testutil::pattern(n.inputs, p);
      auto want = testutil::ref_eval(n, in);
      std::vector<Lit> assume;
      for (const auto& pi : n.inputs) assume.push_back(in[pi] ? vars.var(pi) : -vars.var(pi));
      ASSERT_EQ(s.solve(assume), SatStatus::Sat);
      for (const auto& [net, v] : want) ASSERT_EQ(s.model_value(vars.var(net)), v) << net;
      for (const auto& [net, v] : want) {
        auto flipped = assume;
        flipped.push_back(v ? -vars.var(net) : vars.var(net));
        ASSERT_EQ(s.solve(flipped), SatStatus::Unsat) << net;
      }
    }
  }
}

TEST(Tseitin, BoundLiteralsShareInputs) {
  auto n = testutil::c17();
  NetGraph g(n);
  CnfFormula f;
  auto a = encode_circuit(g, f);
  std::vector<Lit> bound(g.net_count(), 0);
  for (std::size_t i = 0; i < g.input_count(); ++i) bound[i] = a[i];
  const int before = f.var_count;
  auto b = encode_circuit(g, f, bound);
  EXPECT_EQ(f.var_count - before, 6);
  for (std::size_t i = 0; i < g.input_count(); ++i) EXPECT_EQ(a[i], b[i]);
  // Same inputs, so both copies agree on every output.
  Solver s;
  s.add_formula(f);
  for (NetId o : g.output_ids()) {
    EXPECT_EQ(s.solve(std::vector<Lit>{a[o], -b[o]}), SatStatus::Unsat);
  }
}
