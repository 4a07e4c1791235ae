#include <gtest/gtest.h>

#include <algorithm>

#include "obfus/bench_io.hpp"
#include "obfus/error.hpp"
#include "obfus/llm/llm.hpp"
#include "testutil.hpp"

using namespace obfus;
using namespace obfus::llm;

namespace {

std::string c17_verilog() { return read_text_file(testutil::corpus("c17.v")); }

std::size_t count_user(const Transcript& t, std::string_view content) {
  return static_cast<std::size_t>(std::count_if(
      t.begin(), t.end(), [&](const ChatMessage& m) { return m.role == Role::User && m.content == content; }));
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    out.push_back(text.substr(pos, end - pos));
    pos = end + 1;
  }
  return out;
}

std::string join(const std::vector<std::string>& lines, std::size_t from, std::size_t to) {
  std::string s;
  for (std::size_t i = from; i < to; ++i) s += lines[i] + "\n";
  return s;
}

LockConfig two_bits() {
  LockConfig cfg;
  cfg.key_size = 2;
  cfg.seed = 3;
  return cfg;
}

}  // namespace

TEST(Prompts, RenderIsDeterministic) {
  EXPECT_EQ(render("a {{x}} b {{y}}{{x}}", {{"x", "1"}, {"y", "2"}}), "a 1 b 21");
  EXPECT_THROW(render("{{missing}}", {}), std::invalid_argument);
  EXPECT_EQ(render_convert_prompt("module m; endmodule"), render_convert_prompt("module m; endmodule"));
}

TEST(Prompts, SourceEmbeddedVerbatim) {
  const auto v = c17_verilog();
  auto t = render_convert_prompt(v);
  ASSERT_FALSE(t.empty());
  EXPECT_NE(t.back().content.find(v), std::string::npos);
  EXPECT_NE(t.back().content.find("use the exact type of gates"), std::string::npos);
  EXPECT_EQ(convert_template().id, "convert.v1");

  ObfuscatePrompt p;
  p.key_size = 4;
  const auto bench = emit_bench(testutil::c17());
  auto o = render_obfuscate_prompt(bench, p);
  EXPECT_NE(o.back().content.find(bench), std::string::npos);
  EXPECT_NE(o.back().content.find("INPUT(keyinput3)"), std::string::npos);
}

TEST(Continuation, TruncationHeuristic) {
  EXPECT_TRUE(looks_truncated("INPUT(a)\ny = AND(a,", ""));
  EXPECT_TRUE(looks_truncated("INPUT(a)\ny = AND(a, b)\n", "length"));
  EXPECT_TRUE(looks_truncated("INPUT(a)\nOUTPUT(y)\ny = AND(a, b)\nz =", ""));
  EXPECT_TRUE(looks_truncated("INPUT(a)\nOUTPUT(y)\ny = AND(a, b)\nG1", ""));
  EXPECT_FALSE(looks_truncated("INPUT(a)\nOUTPUT(y)\ny = AND(a, b)\n", "stop"));
  EXPECT_FALSE(looks_truncated("INPUT(a)\n# done\n", ""));
  EXPECT_FALSE(looks_truncated("I cannot help with that request", ""));
  EXPECT_FALSE(looks_truncated("```\nINPUT(a)\n```\n", ""));
}

TEST(Continuation, StitchDropsOverlap) {
  EXPECT_EQ(stitch("a\nb\nc\n", "c\nd\n"), "a\nb\nc\nd\n");
  EXPECT_EQ(stitch("x = AND(a,", " b)\n"), "x = AND(a, b)\n");
  EXPECT_EQ(stitch("INPUT(a)\ny = AND(a,", "y = AND(a, b)\n"), "INPUT(a)\ny = AND(a, b)\n");
  EXPECT_EQ(strip_code_fences("```bench\nINPUT(a)\n```\n"), "INPUT(a)\n");
}

TEST(Continuation, CompleteReplyNeedsNoContinuation) {
  const auto bench = emit_bench(testutil::c17());
  MockTransport t({{bench}});
  Transcript tr = render_convert_prompt(c17_verilog());
  auto r = run_with_continuation(t, tr, "m", {}, {});
  EXPECT_EQ(r.continuations, 0u);
  EXPECT_EQ(r.text, bench);
  EXPECT_EQ(t.requests().size(), 1u);
}

TEST(Continuation, SplitReplyIsStitched) {
  const auto bench = emit_bench(testutil::c17());
  auto lines = lines_of(bench);
  const std::size_t cut = lines.size() - 3;
  // First reply ends at a complete line but hit the length limit; the
  // second repeats that line.
  MockTransport t({{join(lines, 0, cut), "length"}, {join(lines, cut - 1, lines.size()), "stop"}});
  DriverConfig cfg;
  auto res = llm_convert(t, c17_verilog(), cfg);
  EXPECT_EQ(res.record.final_source, FinalSource::Llm);
  EXPECT_EQ(res.record.continuation_count, 1u);
  EXPECT_EQ(count_user(res.record.transcript, kContinuePrompt), 1u);
  EXPECT_TRUE(structurally_equal(res.netlist, testutil::c17()));
}

TEST(Continuation, AlwaysTruncatedThrows) {
  MockTransport t({MockTransport::Reply{"INPUT(a)\ny = AND(a,", "length"}});
  Transcript tr;
  ContinuationLimits lim;
  lim.max_continuations = 3;
  EXPECT_THROW(run_with_continuation(t, tr, "m", {}, lim), TruncationError);
  EXPECT_EQ(t.requests().size(), 4u);
}

TEST(Continuation, TransportRetries) {
  const auto bench = emit_bench(testutil::c17());
  MockTransport::Reply fail{"", "", true};
  MockTransport t({fail, {bench}});
  Transcript tr;
  auto r = run_with_continuation(t, tr, "m", {}, {});
  EXPECT_EQ(r.transport_retries, 1u);

  MockTransport dead({fail});
  Transcript tr2;
  EXPECT_THROW(run_with_continuation(dead, tr2, "m", {}, {}), TransportError);
  EXPECT_EQ(dead.requests().size(), 3u);
}

TEST(Driver, CorrectLockedReplyAcceptedWithKeySearch) {
  auto c17 = testutil::c17();
  auto l = insert_xor_keygates(c17, {"G10", "G19"}, Key::from_string("10"));
  MockTransport t({{emit_bench(l.netlist)}});
  auto res = llm_obfuscate(t, c17, two_bits(), {});
  EXPECT_EQ(res.record.final_source, FinalSource::Llm);
  EXPECT_EQ(res.locked.correct_key, Key::from_string("10"));
  ASSERT_EQ(res.record.validations.size(), 1u);
  EXPECT_EQ(res.record.validations[0].stage, "accepted");
  EXPECT_EQ(res.record.template_id, "obfuscate.v1");
}

TEST(Driver, DeclaredKeyIsUsed) {
  auto c17 = testutil::c17();
  auto l = insert_xor_keygates(c17, {"G10", "G19"}, Key::from_string("01"));
  MockTransport t({{"# key=01\n" + emit_bench(l.netlist)}});
  auto res = llm_obfuscate(t, c17, two_bits(), {});
  EXPECT_EQ(res.locked.correct_key, Key::from_string("01"));
}

TEST(Driver, RepairPromptCarriesParseError) {
  auto c17 = testutil::c17();
  auto l = insert_xor_keygates(c17, {"G10", "G19"}, Key::from_string("10"));
  MockTransport t({{"INPUT(d)\nOUTPUT(q)\nq = DFF(d)\n"}, {emit_bench(l.netlist)}});
  auto res = llm_obfuscate(t, c17, two_bits(), {});
  EXPECT_EQ(res.record.final_source, FinalSource::Llm);
  ASSERT_EQ(t.requests().size(), 2u);
  const auto& repair = t.requests()[1].back();
  EXPECT_EQ(repair.role, Role::User);
  EXPECT_NE(repair.content.find("DFF"), std::string::npos);
  ASSERT_EQ(res.record.validations.size(), 2u);
  EXPECT_EQ(res.record.validations[0].stage, "parse");
}

TEST(Driver, WrongKeyCountIsStructural) {
  auto c17 = testutil::c17();
  auto l = insert_xor_keygates(c17, {"G10"}, Key::from_string("1"));
  MockTransport t({{emit_bench(l.netlist)}});
  DriverConfig d;
  d.fallback = false;
  d.max_repairs = 0;
  EXPECT_THROW(llm_obfuscate(t, c17, two_bits(), d), LlmError);
}

TEST(Driver, GarbageFallsBackToLockingEngine) {
  auto c17 = testutil::c17();
  MockTransport t({{"Sure! Here is the locked circuit you asked for."}});
  auto res = llm_obfuscate(t, c17, two_bits(), {});
  EXPECT_EQ(res.record.final_source, FinalSource::Fallback);
  EXPECT_EQ(res.record.validations.size(), 3u);
  EXPECT_EQ(t.requests().size(), 3u);
  EXPECT_EQ(emit_bench(res.locked.netlist), emit_bench(lock(c17, two_bits()).netlist));
  EXPECT_EQ(res.locked.correct_key, lock(c17, two_bits()).correct_key);

  DriverConfig off;
  off.fallback = false;
  MockTransport t2({{"nope"}});
  EXPECT_THROW(llm_obfuscate(t2, c17, two_bits(), off), LlmError);
}

TEST(Driver, TransportFailureFallsBack) {
  MockTransport t({{"", "", true}});
  auto res = llm_convert(t, c17_verilog(), {});
  EXPECT_EQ(res.record.final_source, FinalSource::Fallback);
  ASSERT_EQ(res.record.validations.size(), 1u);
  EXPECT_EQ(res.record.validations[0].stage, "transport");
  EXPECT_TRUE(structurally_equal(res.netlist, testutil::c17()));
}

TEST(Driver, ConvertRejectsInequivalentNetlist) {
  auto wrong = testutil::c17();
  wrong.gates[0].kind = GateKind::And;
  MockTransport t({{emit_bench(wrong)}, {emit_bench(testutil::c17())}});
  auto res = llm_convert(t, c17_verilog(), {});
  EXPECT_EQ(res.record.final_source, FinalSource::Llm);
  ASSERT_EQ(res.record.validations.size(), 2u);
  EXPECT_EQ(res.record.validations[0].stage, "functional");
}
