#include <gtest/gtest.h>

#include "obfus/scoap.hpp"
#include "testutil.hpp"

using namespace obfus;

TEST(Scoap, BaseCases) {
  Netlist n;
  n.inputs = {"a", "b"};
  n.outputs = {"a"};
  auto m = scoap(n);
  EXPECT_EQ(m.at("a"), (Testability{1, 1, 0}));
  EXPECT_EQ(m.at("b").cc0, 1u);
  EXPECT_EQ(m.at("b").co, kUnobservable);
}

TEST(Scoap, AndAndNot) {
  Netlist n;
  n.inputs = {"a", "b"};
  n.outputs = {"y", "z"};
  n.gates = {{"y", GateKind::And, {"a", "b"}}, {"z", GateKind::Not, {"a"}}};
  auto m = scoap(n);
  EXPECT_EQ(m.at("y").cc1, 3u);
  EXPECT_EQ(m.at("y").cc0, 2u);
  EXPECT_EQ(m.at("z").cc0, 2u);
  EXPECT_EQ(m.at("z").cc1, 2u);
  // a: through the AND needs b=1 (cc1 1) plus one level; through the NOT one level.
  EXPECT_EQ(m.at("a").co, 1u);
  EXPECT_EQ(m.at("b").co, 2u);
}

TEST(Scoap, C17HandComputed) {
  auto m = scoap(testutil::c17());
  struct Row {
    const char* net;
    std::uint64_t cc0, cc1, co;
  };
  const Row rows[] = {{"G1", 1, 1, 5},  {"G2", 1, 1, 6},  {"G3", 1, 1, 5},  {"G6", 1, 1, 7},
                      {"G7", 1, 1, 6},  {"G10", 3, 2, 3}, {"G11", 3, 2, 5}, {"G16", 4, 2, 3},
                      {"G19", 4, 2, 3}, {"G22", 5, 4, 0}, {"G23", 5, 5, 0}};
  for (const auto& r : rows) {
    EXPECT_EQ(m.at(r.net), (Testability{r.cc0, r.cc1, r.co})) << r.net;
  }
}

TEST(Scoap, XorAndMuxRecurrences) {
  Netlist n;
  n.inputs = {"s", "a", "b"};
  n.outputs = {"x", "m"};
  n.gates = {{"x", GateKind::Xor, {"a", "b"}}, {"m", GateKind::Mux, {"s", "a", "b"}}};
  auto t = scoap(n);
  // 2-input XOR: cc1 = min(cc0a+cc1b, cc1a+cc0b) + 1.
  EXPECT_EQ(t.at("x").cc0, 3u);
  EXPECT_EQ(t.at("x").cc1, 3u);
  // MUX as OR(AND(NOT s, a), AND(s, b)): NOT s = (2,2); each AND = (cc0 2, cc1 4 / 3).
  // ns: cc0=2, cc1=2. t1=AND(ns,a): cc0=min(2,1)+1=2, cc1=2+1+1=4.
  // t2=AND(s,b): cc0=2, cc1=3. OR: cc0=2+2+1=5, cc1=min(4,3)+1=4.
  EXPECT_EQ(t.at("m").cc0, 5u);
  EXPECT_EQ(t.at("m").cc1, 4u);
}

namespace {

// Reference for the AND/OR family, NOT and BUFF: plain fixed-point sweeps.
std::map<std::string, Testability> reference(const Netlist& n) {
  std::map<std::string, Testability> t;
  for (const auto& pi : n.inputs) t[pi] = {1, 1, kUnobservable};
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& g : n.gates) {
      if (t.count(g.output)) continue;
      bool ready = true;
      for (const auto& x : g.inputs) ready = ready && t.count(x);
      if (!ready) continue;
      std::uint64_t sum0 = 0, sum1 = 0, min0 = UINT64_MAX, min1 = UINT64_MAX;
      for (const auto& x : g.inputs) {
        sum0 += t[x].cc0;
        sum1 += t[x].cc1;
        min0 = std::min(min0, t[x].cc0);
        min1 = std::min(min1, t[x].cc1);
      }
      Testability r{0, 0, kUnobservable};
      switch (g.kind) {
        case GateKind::And: r.cc1 = sum1 + 1; r.cc0 = min0 + 1; break;
        case GateKind::Nand: r.cc0 = sum1 + 1; r.cc1 = min0 + 1; break;
        case GateKind::Or: r.cc0 = sum0 + 1; r.cc1 = min1 + 1; break;
        case GateKind::Nor: r.cc1 = sum0 + 1; r.cc0 = min1 + 1; break;
        case GateKind::Not: r.cc0 = sum1 + 1; r.cc1 = sum0 + 1; break;
        default: r.cc0 = sum0 + 1; r.cc1 = sum1 + 1; break;
      }
      t[g.output] = r;
      changed = true;
    }
  }
  for (const auto& po : n.outputs) t[po].co = 0;
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& g : n.gates) {
      const auto co = t[g.output].co;
      if (co >= kUnobservable) continue;
      for (std::size_t i = 0; i < g.inputs.size(); ++i) {
        std::uint64_t side = 0;
        for (std::size_t j = 0; j < g.inputs.size(); ++j) {
          if (j == i) continue;
          const auto& s = t[g.inputs[j]];
          if (g.kind == GateKind::And || g.kind == GateKind::Nand) side += s.cc1;
          if (g.kind == GateKind::Or || g.kind == GateKind::Nor) side += s.cc0;
        }
        const auto v = co + side + 1;
        auto& c = t[g.inputs[i]].co;
        if (v < c) {
          c = v;
          changed = true;
        }
      }
    }
  }
  return t;
}

}  // namespace

TEST(Scoap, MatchesReferenceOnRandomCircuits) {
  std::mt19937_64 rng(3);
  int checked = 0;
  while (checked < 300) {
    auto n = testutil::random_netlist(rng, {5, 12, false, true});
    bool simple = true;
    for (const auto& g : n.gates) simple = simple && g.kind != GateKind::Xor && g.kind != GateKind::Xnor;
    if (!simple) continue;
    ++checked;
    auto got = scoap(n);
    auto want = reference(n);
    for (std::size_t i = 0; i < got.size(); ++i) {
      ASSERT_EQ(got[i], want.at(got.net(i))) << got.net(i) << " in circuit " << checked;
    }
  }
}
