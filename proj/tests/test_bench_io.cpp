#include <gtest/gtest.h>

#include "obfus/bench_io.hpp"
#include "obfus/error.hpp"
#include "obfus/locking.hpp"
#include "testutil.hpp"

using namespace obfus;

namespace {

std::size_t count_lines_starting(const std::string& text, const std::string& prefix) {
  std::size_t n = 0, pos = 0;
  while (pos < text.size()) {
    if (text.compare(pos, prefix.size(), prefix) == 0) ++n;
    pos = text.find('\n', pos);
    if (pos == std::string::npos) break;
    ++pos;
  }
  return n;
}

Netlist roundtrip(const Netlist& n, const BenchEmitOptions& opt = {}) {
  BenchParseOptions po;
  po.name = n.name;
  return parse_bench(emit_bench(n, opt), po);
}

}  // namespace

TEST(BenchParse, MinimalNand) {
  auto n = parse_bench("INPUT(a)\nINPUT(b)\nOUTPUT(y)\ny = NAND(a, b)");
  auto s = stats(n);
  EXPECT_EQ(s.inputs, 2u);
  EXPECT_EQ(s.outputs, 1u);
  EXPECT_EQ(s.by_kind, (std::map<GateKind, std::size_t>{{GateKind::Nand, 1}}));
}

TEST(BenchParse, C17Counts) {
  auto n = testutil::c17();
  auto s = stats(n);
  EXPECT_EQ(s.inputs, 5u);
  EXPECT_EQ(s.outputs, 2u);
  EXPECT_EQ(s.by_kind, (std::map<GateKind, std::size_t>{{GateKind::Nand, 6}}));
}

TEST(BenchParse, DffRejectedWithLine) {
  try {
    parse_bench("INPUT(d)\nOUTPUT(q)\n\nq = DFF(d)\n");
    FAIL();
  } catch (const UnsupportedGate& e) {
    EXPECT_EQ(e.line(), 4u);
    EXPECT_EQ(e.kind(), "UnsupportedGate");
    EXPECT_NE(std::string(e.what()).find("DFF"), std::string::npos);
  }
}

TEST(BenchParse, SyntaxErrorsCarryLocation) {
  try {
    parse_bench("INPUT(a)\nOUTPUT(y)\ny = AND(a, \n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_GT(e.column(), 0u);
  }
  EXPECT_THROW(parse_bench("INPUT(a\n"), ParseError);
  EXPECT_THROW(parse_bench("INPUT(a)\nOUTPUT(y)\ny AND(a)\n"), ParseError);
}

TEST(BenchParse, StructuralErrors) {
  EXPECT_THROW(parse_bench("INPUT(a)\nOUTPUT(y)\ny = AND(a, b)\n"), StructuralError);
  EXPECT_THROW(parse_bench("INPUT(a)\nOUTPUT(y)\ny = NOT(a)\ny = BUFF(a)\n"), StructuralError);
  EXPECT_THROW(parse_bench("INPUT(a)\nOUTPUT(y)\ny = NOT(a, a)\n"), StructuralError);
}

TEST(BenchParse, CommentsCaseAndWhitespace) {
  auto doc = parse_bench_document(
      "# first\n#second\n\ninput(a)  # trailing\r\nINPUT( b )\nOUTPUT(y)\n  y=and(a,b)\n# late comment\n");
  EXPECT_EQ(doc.comments, (std::vector<std::string>{"first", "second"}));
  ASSERT_EQ(doc.netlist.gates.size(), 1u);
  EXPECT_EQ(doc.netlist.gates[0].kind, GateKind::And);
  EXPECT_EQ(doc.netlist.inputs, (std::vector<NetName>{"a", "b"}));
}

TEST(BenchParse, KeyInputsByPrefix) {
  BenchParseOptions po;
  po.key_prefix = "k";
  auto doc = parse_bench_document("INPUT(a)\nINPUT(k0)\nINPUT(k1)\nOUTPUT(y)\ny = XOR(a, k0, k1)\n", po);
  EXPECT_EQ(doc.key_inputs(), (std::vector<NetName>{"k0", "k1"}));
}

TEST(BenchEmit, CanonicalLayout) {
  Netlist n;
  n.name = "t";
  n.inputs = {"a", "b"};
  n.outputs = {"y"};
  n.gates = {{"y", GateKind::Or, {"m", "b"}}, {"m", GateKind::Nand, {"a", "b"}}};
  EXPECT_EQ(emit_bench(n),
            "# t\n# 2 inputs, 1 outputs, 2 gates\n\nINPUT(a)\nINPUT(b)\n\nOUTPUT(y)\n\n"
            "m = NAND(a, b)\ny = OR(m, b)\n");
}

TEST(BenchEmit, RoundTripC17) {
  auto n = testutil::c17();
  EXPECT_TRUE(structurally_equal(roundtrip(n), n));
  EXPECT_EQ(emit_bench(n), emit_bench(roundtrip(n)));
}

TEST(BenchEmit, RoundTripRandomNetlists) {
  std::mt19937_64 rng(1234);
  for (int i = 0; i < 500; ++i) {
    auto n = testutil::random_netlist(rng, {8, 25, true, true});
    ASSERT_TRUE(structurally_equal(roundtrip(n), n)) << emit_bench(n);
    ASSERT_EQ(emit_bench(n), emit_bench(n));
  }
}

TEST(BenchEmit, StrictMuxLowering) {
  Netlist n;
  n.name = "m";
  n.inputs = {"s", "a", "b"};
  n.outputs = {"y"};
  n.gates = {{"y", GateKind::Mux, {"s", "a", "b"}}};
  BenchEmitOptions opt;
  opt.dialect = BenchDialect::Strict;
  const auto text = emit_bench(n, opt);
  EXPECT_NE(text.find("y_nl0 = NOT(s)\ny_nl1 = AND(y_nl0, a)\ny_nl2 = AND(s, b)\ny = OR(y_nl1, y_nl2)\n"),
            std::string::npos)
      << text;
  EXPECT_EQ(text.find("MUX"), std::string::npos);
  auto lowered = parse_bench(text);
  EXPECT_TRUE(testutil::ref_equivalent(lowered, n));

  opt.lower_mux = false;
  EXPECT_THROW(emit_bench(n, opt), DialectError);
}

TEST(BenchEmit, TwoInputDecompositionPreservesFunction) {
  std::mt19937_64 rng(77);
  for (int i = 0; i < 200; ++i) {
    auto n = testutil::random_netlist(rng, {5, 10, true, true});
    BenchEmitOptions opt;
    opt.two_input_only = true;
    auto m = parse_bench(emit_bench(n, opt));
    for (const auto& g : m.gates) ASSERT_LE(g.inputs.size(), 3u);
    for (const auto& g : m.gates) {
      if (g.kind != GateKind::Mux) ASSERT_LE(g.inputs.size(), 2u);
    }
    ASSERT_TRUE(testutil::ref_equivalent(m, n));
  }
}

TEST(BenchEmit, LockedC17HasFourKeyInputLines) {
  LockConfig cfg;
  cfg.key_size = 4;
  cfg.seed = 42;
  const auto text = emit_bench(lock(testutil::c17(), cfg).netlist);
  EXPECT_EQ(count_lines_starting(text, "INPUT(keyinput"), 4u);
}
