// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Set OBFUS_ISCAS_DIR to a directory holding c432.bench or
// c432.v to use the real circuit; a generated circuit of the same shape is
// used otherwise.

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>

#include "obfus/attack.hpp"
#include "obfus/bench_io.hpp"
#include "obfus/error.hpp"
#include "obfus/llm/llm.hpp"
#include "obfus/pipeline.hpp"
#include "obfus/report.hpp"
#include "obfus/verify.hpp"
#include "obfus/verilog.hpp"
#include "testutil.hpp"

using namespace obfus;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::string fmt(double v, int precision = 2) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(precision);
  s << v;
  return s.str();
}

struct Outcome {
  bool pass = true;
  std::string detail;
};

int g_failed = 0;

void report(int id, const std::string& title, const Outcome& o, double secs) {
  std::cout << (o.pass ? "PASS" : "FAIL") << " [" << id << "] " << title << ": " << o.detail << " (" << fmt(secs)
            << " s)" << std::endl;
  if (!o.pass) ++g_failed;
}

void run(int id, const std::string& title, const std::function<Outcome()>& body) {
  const auto t = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  report(id, title, o, seconds_since(t));
}

// --- circuits -------------------------------------------------------------

struct Circuit {
  std::string label;
  Netlist netlist;
};

std::vector<Circuit> small_circuits() {
  std::vector<Circuit> out;
  for (const char* f : {"c17.bench", "full_adder.bench", "adder4.bench", "chain8.bench", "cmp6.bench",
                        "parity16.bench", "halfadd8.bench"}) {
    auto n = testutil::load_bench(f);
    out.push_back({n.name, n});
  }
  return out;
}

// Random DAG with recency-biased fan-in; sinks are folded into `outputs`
// XOR trees so every gate is observable.
Netlist generated_circuit(std::size_t pis, std::size_t gates, std::size_t outputs, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto below = [&](std::size_t n) { return static_cast<std::size_t>(rng() % n); };
  Netlist n;
  n.name = "gen" + std::to_string(pis) + "x" + std::to_string(gates);
  std::vector<NetName> nets;
  for (std::size_t i = 0; i < pis; ++i) {
    n.inputs.push_back("N" + std::to_string(i));
    nets.push_back(n.inputs.back());
  }
  static const GateKind kinds[] = {GateKind::Nand, GateKind::Nand, GateKind::Nand, GateKind::And, GateKind::Nor,
                                   GateKind::Or,   GateKind::Xor,  GateKind::Not,  GateKind::Nand, GateKind::And};
  std::vector<std::size_t> fanout;
  fanout.assign(pis, 0);
  for (std::size_t g = 0; g < gates; ++g) {
    Gate gate;
    gate.kind = kinds[below(std::size(kinds))];
    gate.output = "g" + std::to_string(g);
    const std::size_t arity = gate.kind == GateKind::Not ? 1 : 2 + below(gate.kind == GateKind::Xor ? 1 : 3);
    while (gate.inputs.size() < arity) {
      const std::size_t window = std::min<std::size_t>(nets.size(), 48);
      const std::size_t pick = below(4) == 0 ? below(nets.size()) : nets.size() - 1 - below(window);
      if (std::find(gate.inputs.begin(), gate.inputs.end(), nets[pick]) != gate.inputs.end()) continue;
      gate.inputs.push_back(nets[pick]);
      ++fanout[pick];
    }
    nets.push_back(gate.output);
    fanout.push_back(0);
    n.gates.push_back(gate);
  }
  std::vector<std::vector<NetName>> groups(outputs);
  std::size_t next = 0;
  for (std::size_t i = 0; i < nets.size(); ++i) {
    if (fanout[i] == 0) groups[next++ % outputs].push_back(nets[i]);
  }
  std::size_t t = 0;
  for (std::size_t o = 0; o < outputs; ++o) {
    auto level = groups[o];
    if (level.empty()) level.push_back(nets[nets.size() - 1 - o]);
    while (level.size() > 1) {
      std::vector<NetName> up;
      for (std::size_t i = 0; i + 1 < level.size(); i += 2) {
        up.push_back("t" + std::to_string(t++));
        n.gates.push_back({up.back(), GateKind::Xor, {level[i], level[i + 1]}});
      }
      if (level.size() % 2) up.push_back(level.back());
      level = up;
    }
    const NetName po = "O" + std::to_string(o);
    n.gates.push_back({po, GateKind::Buff, {level[0]}});
    n.outputs.push_back(po);
  }
  return n;
}

Circuit c432_scale() {
  if (const char* dir = std::getenv("OBFUS_ISCAS_DIR")) {
    const fs::path bench = fs::path(dir) / "c432.bench";
    const fs::path verilog = fs::path(dir) / "c432.v";
    if (fs::exists(bench)) {
      BenchParseOptions po;
      po.name = "c432";
      return {"c432 (" + bench.string() + ")", parse_bench(read_text_file(bench), po)};
    }
    if (fs::exists(verilog)) return {"c432 (" + verilog.string() + ")", parse_verilog_subset(read_text_file(verilog))};
  }
  return {"generated 36-input stand-in", generated_circuit(36, 160, 7, 432)};
}

// --- criterion 1, 2, 4: the locking matrix ----------------------------------

struct MatrixStats {
  std::size_t runs = 0;
  std::size_t infeasible = 0;
  std::size_t verify_failures = 0;
  std::size_t structural_failures = 0;
  std::size_t attack_failures = 0;
  std::size_t iteration_violations = 0;
  std::size_t slow_attacks = 0;
  double max_attack_ms = 0;
  double verify_seconds = 0;
  std::map<std::pair<Selection, std::size_t>, std::size_t> feasible_cells;
  std::vector<std::string> examples;

  void note(const std::string& s) {
    if (examples.size() < 5) examples.push_back(s);
  }
};

MatrixStats run_matrix() {
  MatrixStats m;
  const Selection strategies[] = {Selection::Random, Selection::ConeSize, Selection::Scoap, Selection::Sll,
                                  Selection::FanHeavy};
  const KeyGatePolicy policies[] = {KeyGatePolicy::XorOnly, KeyGatePolicy::MuxOnly, KeyGatePolicy::Mixed};
  const DummyPolicy dummies[] = {DummyPolicy::Constant, DummyPolicy::PrimaryInput, DummyPolicy::OtherConeNet,
                                 DummyPolicy::RandomFunction};
  for (const auto& c : small_circuits()) {
    const Oracle oracle(c.netlist);
    for (Selection s : strategies) {
      for (KeyGatePolicy p : policies) {
        for (DummyPolicy d : dummies) {
          for (std::size_t k : {2u, 4u, 8u}) {
            for (std::uint64_t seed = 1; seed <= 10; ++seed) {
              LockConfig cfg;
              cfg.key_size = k;
              cfg.selection = s;
              cfg.keygate = p;
              cfg.dummy = d;
              cfg.seed = seed;
              const std::string tag = c.label + " " + std::string(to_string(s)) + "/" + std::string(to_string(p)) +
                                      "/" + std::string(to_string(d)) + " k=" + std::to_string(k) +
                                      " seed=" + std::to_string(seed);
              LockedNetlist l;
              try {
                l = lock(c.netlist, cfg);
              } catch (const SelectionError&) {
                ++m.infeasible;
                continue;
              } catch (const DummyError&) {
                ++m.infeasible;
                continue;
              }
              ++m.runs;
              ++m.feasible_cells[{s, k}];

              const auto t = Clock::now();
              VerifyOptions vo;
              vo.mode = VerifyMode::Exhaustive;
              auto v = functional_verify(l, c.netlist, l.correct_key, vo);
              m.verify_seconds += seconds_since(t);
              if (v.functional.kind != FunctionalResult::Kind::Equivalent) {
                ++m.verify_failures;
                m.note("verify " + tag);
              }
              const bool interface_ok = l.netlist.inputs.size() == c.netlist.inputs.size() + k &&
                                        std::set<NetName>(l.netlist.outputs.begin(), l.netlist.outputs.end()) ==
                                            std::set<NetName>(c.netlist.outputs.begin(), c.netlist.outputs.end());
              if (!v.structural_ok || !interface_ok) {
                ++m.structural_failures;
                m.note("structure " + tag);
              }

              AttackOptions ao;
              ao.timeout = std::chrono::seconds(5);
              auto r = sat_attack(l.netlist, oracle, ao);
              m.max_attack_ms = std::max(m.max_attack_ms, r.elapsed_ms);
              if (r.elapsed_ms > 5000) ++m.slow_attacks;
              if (r.iterations > (std::uint64_t{1} << k)) ++m.iteration_violations;
              bool recovered = r.status == AttackStatus::KeyRecovered && r.recovered_key;
              if (recovered) {
                auto unlocked = apply_key(l, *r.recovered_key);
                recovered = functional_verify(unlocked, {}, c.netlist, Key{}, vo).functional.kind ==
                            FunctionalResult::Kind::Equivalent;
              }
              if (!recovered) {
                ++m.attack_failures;
                m.note("attack " + tag + " status " + std::string(to_string(r.status)));
              }
            }
          }
        }
      }
    }
  }
  return m;
}

std::string examples(const MatrixStats& m) {
  std::string s;
  for (const auto& e : m.examples) s += "; " + e;
  return s;
}

Outcome criterion1(const MatrixStats& m) {
  Outcome o;
  std::vector<std::string> empty_cells;
  for (Selection s : {Selection::Random, Selection::ConeSize, Selection::Scoap, Selection::Sll, Selection::FanHeavy}) {
    for (std::size_t k : {2u, 4u, 8u}) {
      if (!m.feasible_cells.count({s, k})) empty_cells.push_back(std::string(to_string(s)) + " k=" + std::to_string(k));
    }
  }
  o.pass = m.verify_failures == 0 && empty_cells.empty() && m.verify_seconds < 60;
  o.detail = std::to_string(m.runs - m.verify_failures) + "/" + std::to_string(m.runs) +
             " feasible runs equivalent under the correct key (" + std::to_string(m.infeasible) +
             " configurations infeasible for their circuit), verification time " + fmt(m.verify_seconds) + " s";
  for (const auto& c : empty_cells) o.detail += "; no feasible circuit for " + c;
  if (m.verify_failures) o.detail += examples(m);
  return o;
}

Outcome criterion2(const MatrixStats& m) {
  Outcome o;
  const auto c = c432_scale();
  LockConfig cfg;
  cfg.key_size = 32;
  cfg.seed = 1;
  auto l = lock(c.netlist, cfg);
  AttackOptions ao;
  ao.timeout = std::chrono::minutes(10);
  auto r = sat_attack(l.netlist, Oracle(c.netlist), ao);
  bool big_ok = r.status == AttackStatus::KeyRecovered && r.recovered_key;
  if (big_ok) {
    VerifyOptions vo;
    vo.mode = VerifyMode::Sat;
    big_ok = functional_verify(l, c.netlist, *r.recovered_key, vo).functional.kind ==
             FunctionalResult::Kind::Equivalent;
  }
  o.pass = m.attack_failures == 0 && m.iteration_violations == 0 && m.slow_attacks == 0 && big_ok;
  o.detail = std::to_string(m.runs - m.attack_failures) + "/" + std::to_string(m.runs) +
             " matrix attacks recovered an exhaustively verified key, max " + fmt(m.max_attack_ms, 1) +
             " ms, iteration bound violations " + std::to_string(m.iteration_violations) + "; " + c.label + " (" +
             std::to_string(c.netlist.inputs.size()) + " PIs, " + std::to_string(c.netlist.gates.size()) +
             " gates) k=32: " + std::string(to_string(r.status)) + " after " + std::to_string(r.iterations) +
             " iterations in " + fmt(r.elapsed_ms / 1000.0) + " s, SAT-miter check " + (big_ok ? "equivalent" : "failed");
  if (m.attack_failures) o.detail += examples(m);
  return o;
}

Outcome criterion4(const MatrixStats& m) {
  return {m.structural_failures == 0 && m.runs > 0,
          std::to_string(m.runs - m.structural_failures) + "/" + std::to_string(m.runs) +
              " locked netlists have |PI|+k inputs and the original output names"};
}

// --- criterion 3 ------------------------------------------------------------

Outcome criterion3() {
  std::mt19937_64 rng(2024);
  std::size_t circuits = 0, patterns = 0, mismatches = 0;
  for (; circuits < 1000; ++circuits) {
    auto n = testutil::random_netlist(rng, {4, 6, true, true});
    auto [cnf, vars] = tseitin(n);
    Solver s;
    s.add_formula(cnf);
    for (std::uint64_t p = 0; p < (std::uint64_t{1} << n.inputs.size()); ++p, ++patterns) {
      auto in = testutil::pattern(n.inputs, p);
      auto want = testutil::ref_eval(n, in);
      std::vector<Lit> assume;
      for (const auto& pi : n.inputs) assume.push_back(in[pi] ? vars.var(pi) : -vars.var(pi));
      if (s.solve(assume) != SatStatus::Sat) {
        ++mismatches;
        continue;
      }
      for (const auto& [net, v] : want) mismatches += s.model_value(vars.var(net)) != v;
    }
  }

  std::size_t formulas = 0, disagreements = 0, sat = 0;
  for (; formulas < 400; ++formulas) {
    // Random 3-CNF with clause/variable ratios spanning the threshold.
    const int nv = 4 + static_cast<int>(rng() % 17);
    const int nc = static_cast<int>(nv * (2.5 + static_cast<double>(rng() % 36) / 10.0));
    CnfFormula f;
    f.var_count = nv;
    for (int c = 0; c < nc; ++c) {
      std::vector<Lit> cl;
      while (cl.size() < 3) {
        const int v = 1 + static_cast<int>(rng() % nv);
        if (std::any_of(cl.begin(), cl.end(), [v](Lit l) { return std::abs(l) == v; })) continue;
        cl.push_back(rng() & 1 ? v : -v);
      }
      f.add(cl);
    }
    bool brute = false;
    std::vector<bool> m(nv + 1);
    for (std::uint32_t a = 0; a < (1u << nv) && !brute; ++a) {
      for (int v = 1; v <= nv; ++v) m[v] = (a >> (v - 1)) & 1;
      brute = f.satisfied_by(m);
    }
    const auto r = solve(f);
    sat += brute;
    disagreements += (r.status == SatStatus::Sat) != brute;
  }
  return {mismatches == 0 && disagreements == 0,
          std::to_string(circuits) + " random circuits, " + std::to_string(patterns) + " patterns, " +
              std::to_string(mismatches) + " net mismatches; " + std::to_string(formulas) +
              " formulas of <= 20 variables (" + std::to_string(sat) + " sat), " + std::to_string(disagreements) +
              " status disagreements with brute force"};
}

// --- criterion 5 ------------------------------------------------------------

Outcome criterion5() {
  const auto c17 = testutil::c17();
  std::size_t corrupted = 0, total = 0;
  for (const NetName po : {"G22", "G23"}) {
    auto l = insert_xor_keygates(c17, {po}, Key::from_string("0"));
    const auto wrong = l.correct_key.complemented();
    for (std::uint64_t p = 0; p < 32; ++p, ++total) {
      auto in = testutil::pattern(c17.inputs, p);
      auto want = testutil::ref_eval(c17, in);
      in[l.key_inputs[0]] = wrong.bits[0];
      corrupted += testutil::ref_eval(l.netlist, in).at(po) != want.at(po);
    }
  }
  return {corrupted == total, std::to_string(corrupted) + "/" + std::to_string(total) +
                                  " (output, input) pairs corrupted with the complemented key on G22 and G23"};
}

// --- criterion 6 ------------------------------------------------------------

Outcome criterion6() {
  std::size_t checked = 0, failures = 0;
  auto check = [&](const Netlist& n) {
    BenchParseOptions po;
    po.name = n.name;
    const auto text = emit_bench(n);
    const auto again = parse_bench(text, po);
    failures += !structurally_equal(again, n) || emit_bench(again) != text || emit_bench(n) != text;
    ++checked;
  };
  check(testutil::c17());
  const auto c432 = c432_scale();
  check(c432.netlist);
  std::mt19937_64 rng(6);
  for (int i = 0; i < 500; ++i) check(testutil::random_netlist(rng, {8, 25, true, true}));
  return {failures == 0, std::to_string(checked - failures) + "/" + std::to_string(checked) +
                             " netlists (c17, " + c432.label + ", 500 random) round-trip with byte-identical emission"};
}

// --- criterion 7 ------------------------------------------------------------

Outcome criterion7() {
  const auto c17 = testutil::c17();
  const auto bench = emit_bench(c17);
  const auto nl = bench.find('\n', bench.find("G16 ="));
  const auto overlap_start = bench.rfind('\n', nl - 1) + 1;
  llm::MockTransport split({{bench.substr(0, nl + 1), "length"}, {bench.substr(overlap_start), "stop"}});
  auto conv = llm::llm_convert(split, read_text_file(testutil::corpus("c17.v")), {});
  std::size_t continue_prompts = 0;
  for (const auto& m : conv.record.transcript) {
    if (m.role == llm::Role::User && m.content == llm::kContinuePrompt) ++continue_prompts;
  }
  const bool a = continue_prompts == 1 && conv.record.final_source == llm::FinalSource::Llm &&
                 structurally_equal(conv.netlist, c17);

  LockConfig cfg;
  cfg.key_size = 4;
  cfg.seed = 42;
  llm::MockTransport junk({{"I'm sorry, I can't produce that netlist."}});
  auto ob = llm::llm_obfuscate(junk, c17, cfg, {});
  const auto engine = lock(c17, cfg);
  const bool b = ob.record.final_source == llm::FinalSource::Fallback && ob.record.validations.size() == 3 &&
                 emit_bench(ob.locked.netlist) == emit_bench(engine.netlist) &&
                 ob.locked.correct_key == engine.correct_key;
  return {a && b, std::string("(a) split reply: ") + std::to_string(continue_prompts) +
                      " continuation prompt(s), stitched netlist " + (a ? "matches c17" : "rejected") +
                      "; (b) invalid replies: " + std::to_string(ob.record.validations.size()) +
                      " attempts, fallback output " + (b ? "byte-identical to the engine" : "differs")};
}

// --- criterion 8 ------------------------------------------------------------

Outcome criterion8() {
  std::size_t configs = 0, differences = 0;
  for (const char* f : {"c17.bench", "adder4.bench", "full_adder.v"}) {
    for (auto policy : {KeyGatePolicy::XorOnly, KeyGatePolicy::Mixed}) {
      PipelineOptions o;
      o.lock.key_size = 4;
      o.lock.keygate = policy;
      o.lock.dummy = DummyPolicy::RandomFunction;
      o.lock.seed = 11;
      const auto text = read_text_file(testutil::corpus(f));
      auto a = run_pipeline(text, f, o);
      auto b = run_pipeline(text, f, o);
      differences += a.locked_bench != b.locked_bench || a.key_file != b.key_file ||
                     comparable(to_json(a.report)).dump(2) != comparable(to_json(b.report)).dump(2);
      ++configs;
    }
  }
  return {differences == 0, std::to_string(configs - differences) + "/" + std::to_string(configs) +
                                " repeated pipeline runs byte-identical (bench, key file, report without timestamps)"};
}

}  // namespace

int main() {
  const auto t = Clock::now();
  MatrixStats matrix = run_matrix();
  const double matrix_secs = seconds_since(t);
  report(1, "correct-key consistency matrix", criterion1(matrix), matrix_secs);
  run(2, "SAT-attack soundness", [&] { return criterion2(matrix); });
  run(3, "encoding oracle equivalence", criterion3);
  report(4, "structural interface rule", criterion4(matrix), 0);
  run(5, "PO-driver corruption guarantee", criterion5);
  run(6, "round-trip fidelity", criterion6);
  run(7, "LLM pipeline offline", criterion7);
  run(8, "reproducibility", criterion8);
  std::cout << (g_failed ? "FAILED " : "ALL PASSED ") << (8 - g_failed) << "/8" << std::endl;
  return g_failed ? 1 : 0;
}
