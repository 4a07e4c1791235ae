#include <gtest/gtest.h>

#include "obfus/error.hpp"
#include "obfus/netlist.hpp"
#include "obfus/simulate.hpp"
#include "testutil.hpp"

using namespace obfus;

namespace {

Netlist nand2() {
  Netlist n;
  n.name = "nand2";
  n.inputs = {"a", "b"};
  n.outputs = {"y"};
  n.gates = {{"y", GateKind::Nand, {"a", "b"}}};
  return n;
}

bool has_kind(const std::vector<Diagnostic>& d, Diagnostic::Kind k, const std::string& net) {
  for (const auto& x : d) {
    if (x.kind == k && x.net == net) return true;
  }
  return false;
}

}  // namespace

TEST(Validate, MinimalNandIsValid) { EXPECT_TRUE(validate(nand2()).empty()); }

TEST(Validate, SelfLoopIsCycle) {
  Netlist n;
  n.inputs = {"a"};
  n.outputs = {"x"};
  n.gates = {{"x", GateKind::Not, {"x"}}};
  EXPECT_TRUE(has_kind(validate(n), Diagnostic::Kind::Cycle, "x"));
}

TEST(Validate, MultiDriver) {
  Netlist n;
  n.inputs = {"a", "b"};
  n.outputs = {"n1"};
  n.gates = {{"n1", GateKind::Not, {"a"}}, {"n1", GateKind::Not, {"b"}}};
  EXPECT_TRUE(has_kind(validate(n), Diagnostic::Kind::MultiDriver, "n1"));
}

TEST(Validate, GateDrivingPrimaryInputIsMultiDriver) {
  Netlist n;
  n.inputs = {"a"};
  n.outputs = {"a"};
  n.gates = {{"a", GateKind::Buff, {"a"}}};
  EXPECT_FALSE(validate(n).empty());
}

TEST(Validate, OtherDiagnostics) {
  Netlist n;
  n.inputs = {"a", "a", "bad-name"};
  n.outputs = {"y", "ghost"};
  n.gates = {{"y", GateKind::And, {"a"}}, {"z", GateKind::Not, {"missing"}}};
  auto d = validate(n);
  EXPECT_TRUE(has_kind(d, Diagnostic::Kind::DuplicatePort, "a"));
  EXPECT_TRUE(has_kind(d, Diagnostic::Kind::InvalidName, "bad-name"));
  EXPECT_TRUE(has_kind(d, Diagnostic::Kind::BadArity, "y"));
  EXPECT_TRUE(has_kind(d, Diagnostic::Kind::Undriven, "missing"));
  EXPECT_TRUE(has_kind(d, Diagnostic::Kind::UnknownOutput, "ghost"));
}

TEST(Validate, NetGraphRejectsInvalid) {
  Netlist n;
  n.inputs = {"a"};
  n.outputs = {"x"};
  n.gates = {{"x", GateKind::Not, {"x"}}};
  EXPECT_THROW(NetGraph g(n), StructuralError);
  EXPECT_THROW(topo_order(n), StructuralError);
}

TEST(GateKinds, ParseAndArity) {
  EXPECT_EQ(parse_gate_kind("nand"), GateKind::Nand);
  EXPECT_EQ(parse_gate_kind("BUF"), GateKind::Buff);
  EXPECT_EQ(parse_gate_kind("Buff"), GateKind::Buff);
  EXPECT_FALSE(parse_gate_kind("DFF").has_value());
  EXPECT_TRUE(arity_ok(GateKind::And, 4));
  EXPECT_FALSE(arity_ok(GateKind::And, 1));
  EXPECT_FALSE(arity_ok(GateKind::Not, 2));
  EXPECT_TRUE(arity_ok(GateKind::Mux, 3));
  EXPECT_FALSE(arity_ok(GateKind::Mux, 2));
  for (GateKind k : kAllGateKinds) EXPECT_EQ(parse_gate_kind(to_string(k)), k);
}

TEST(Topo, ChainOrder) {
  Netlist n;
  n.inputs = {"a"};
  n.outputs = {"y"};
  n.gates = {{"y", GateKind::Not, {"m"}}, {"m", GateKind::Not, {"a"}}};
  auto order = topo_order(n);
  ASSERT_EQ(order.size(), 2u);
  EXPECT_EQ(order[0].output, "m");
  EXPECT_EQ(order[1].output, "y");
}

TEST(Topo, C17DriversFirst) {
  auto n = testutil::c17();
  auto order = topo_order(n);
  ASSERT_EQ(order.size(), 6u);
  std::set<std::string> seen(n.inputs.begin(), n.inputs.end());
  for (const auto& g : order) {
    EXPECT_EQ(g.kind, GateKind::Nand);
    for (const auto& x : g.inputs) EXPECT_TRUE(seen.count(x)) << g.output << " before " << x;
    seen.insert(g.output);
  }
  // Already topological: preserved verbatim.
  EXPECT_EQ(order, n.gates);
}

TEST(Topo, RandomNetlistsRespectDependencies) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 200; ++i) {
    auto n = testutil::random_netlist(rng, {6, 12, true, true});
    auto order = topo_order(n);
    std::set<std::string> seen(n.inputs.begin(), n.inputs.end());
    for (const auto& g : order) {
      for (const auto& x : g.inputs) ASSERT_TRUE(seen.count(x));
      seen.insert(g.output);
    }
  }
}

TEST(Simulate, Examples) {
  EXPECT_EQ(simulate(nand2(), {{"a", true}, {"b", true}}).at("y"), false);
  Netlist mux;
  mux.inputs = {"s", "a", "b"};
  mux.outputs = {"y"};
  mux.gates = {{"y", GateKind::Mux, {"s", "a", "b"}}};
  EXPECT_EQ(simulate(mux, {{"s", true}, {"a", false}, {"b", true}}).at("y"), true);
  EXPECT_EQ(simulate(mux, {{"s", false}, {"a", false}, {"b", true}}).at("y"), false);
}

TEST(Simulate, C17AllZero) {
  auto out = simulate(testutil::c17(), {{"G1", 0}, {"G2", 0}, {"G3", 0}, {"G6", 0}, {"G7", 0}});
  EXPECT_EQ(out.at("G22"), false);
  EXPECT_EQ(out.at("G23"), false);
}

TEST(Simulate, MissingInputNamed) {
  try {
    simulate(nand2(), {{"a", true}});
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("b"), std::string::npos);
  }
}

TEST(Simulate, MatchesReferenceEvaluator) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 300; ++i) {
    auto n = testutil::random_netlist(rng, {5, 10, true, true});
    for (std::uint64_t p = 0; p < (1u << n.inputs.size()); ++p) {
      auto in = testutil::pattern(n.inputs, p);
      auto want = testutil::ref_eval(n, in);
      auto got = simulate(n, Assignment(in.begin(), in.end()));
      for (const auto& po : n.outputs) ASSERT_EQ(got.at(po), want.at(po));
    }
  }
}

TEST(Cones, Examples) {
  Netlist n;
  n.inputs = {"a", "b", "u"};
  n.outputs = {"y", "u"};
  n.gates = {{"y", GateKind::And, {"a", "b"}}};
  EXPECT_TRUE(tfi(n, "u").empty());
  EXPECT_EQ(tfi(n, "y"), (std::set<NetName>{"a", "b"}));
  EXPECT_EQ(tfo(n, "a"), (std::set<NetName>{"y"}));
  EXPECT_THROW(tfi(n, "nope"), UnknownNet);
}

TEST(Cones, C17) {
  auto n = testutil::c17();
  auto f = tfo(n, "G11");
  for (const char* x : {"G16", "G19", "G22", "G23"}) EXPECT_TRUE(f.count(x)) << x;
  EXPECT_EQ(f.size(), 4u);
  EXPECT_EQ(tfi(n, "G22"), (std::set<NetName>{"G10", "G16", "G1", "G3", "G2", "G11", "G6"}));
}

TEST(Fanout, Examples) {
  Netlist n;
  n.inputs = {"a", "u"};
  n.outputs = {"a", "y", "z"};
  n.gates = {{"y", GateKind::And, {"a", "a"}}, {"z", GateKind::Not, {"a"}}};
  EXPECT_EQ(fanout_count(n, "u"), 0u);
  // AND reads a twice, NOT once, plus one PO slot.
  EXPECT_EQ(fanout_count(n, "a"), 4u);
  EXPECT_EQ(fanout_count(testutil::c17(), "G16"), 2u);
}

TEST(Stats, Examples) {
  Netlist wire;
  wire.inputs = {"a"};
  wire.outputs = {"a"};
  auto s = stats(wire);
  EXPECT_EQ(s.inputs, 1u);
  EXPECT_EQ(s.outputs, 1u);
  EXPECT_EQ(s.gates, 0u);
  EXPECT_TRUE(s.by_kind.empty());

  auto c = stats(testutil::c17());
  EXPECT_EQ(c.inputs, 5u);
  EXPECT_EQ(c.outputs, 2u);
  EXPECT_EQ(c.gates, 6u);
  EXPECT_EQ(c.by_kind, (std::map<GateKind, std::size_t>{{GateKind::Nand, 6}}));
}

TEST(StructuralEquality, GateOrderIgnored) {
  auto a = testutil::c17();
  auto b = a;
  std::reverse(b.gates.begin(), b.gates.end());
  EXPECT_TRUE(structurally_equal(a, b));
  b.gates[0].kind = GateKind::And;
  EXPECT_FALSE(structurally_equal(a, b));
}

TEST(FreshNames, SkipsTakenNames) {
  auto n = nand2();
  n.gates.push_back({"y_nl0", GateKind::Not, {"a"}});
  FreshNames f(n);
  EXPECT_EQ(f.make("y"), "y_nl1");
  EXPECT_EQ(f.make("a"), "a_nl2");
  EXPECT_TRUE(f.taken("a"));
}

TEST(NetGraph, NumberingAndQueries) {
  auto n = testutil::c17();
  NetGraph g(n);
  EXPECT_EQ(g.net_count(), 11u);
  EXPECT_EQ(g.id("G1"), 0u);
  EXPECT_EQ(g.id("G10"), 5u);
  EXPECT_TRUE(g.is_input(g.id("G7")));
  EXPECT_EQ(g.driver(g.id("G16")), 2);
  EXPECT_EQ(g.driver(g.id("G2")), -1);
  EXPECT_TRUE(g.is_output(g.id("G22")));
  EXPECT_EQ(g.loads(g.id("G11")).size(), 2u);
  EXPECT_THROW(g.id("nope"), UnknownNet);
}
