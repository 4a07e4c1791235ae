// obfus: command-line front end for locking, attacking and verifying
// gate-level netlists.

#include <algorithm>
#include <atomic>
#include <iostream>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <thread>

#include <CLI11.hpp>

#include "obfus/attack.hpp"
#include "obfus/bench_io.hpp"
#include "obfus/error.hpp"
#include "obfus/llm/llm.hpp"
#include "obfus/locking.hpp"
#include "obfus/pipeline.hpp"
#include "obfus/report.hpp"
#include "obfus/verify.hpp"
#include "obfus/verilog.hpp"

namespace fs = std::filesystem;
using namespace obfus;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

int exit_code_for(const Error& e) {
  static const std::set<std::string> usage{
      "ParseError", "UnsupportedGate", "UnsupportedConstruct", "DialectError", "ConfigError",
      "InputError", "UnknownNet",      "StructuralError",      "InterfaceError", "AttackError",
      "VerifyError", "StatError"};
  return usage.count(e.kind()) ? kExitUsage : kExitFailure;
}

bool g_json_errors = false;

int report_error(std::string_view kind, std::string_view message, int code) {
  if (g_json_errors) {
    Json j{{"error", {{"kind", kind}, {"message", message}, {"exit_code", code}}}};
    std::cerr << j.dump() << "\n";
  } else {
    std::cerr << "obfus: error: " << message << "\n";
  }
  return code;
}

bool ends_with(const std::string& s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

Netlist load_netlist(const std::string& path, const std::string& key_prefix) {
  const std::string text = read_text_file(path);
  if (ends_with(path, ".v")) return parse_verilog_subset(text);
  BenchParseOptions po;
  po.name = fs::path(path).stem().string();
  if (po.name.empty()) po.name = "circuit";
  po.key_prefix = key_prefix;
  return parse_bench(text, po);
}

void write_output(const std::string& path, std::string_view text) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    write_text_file(path, text);
  }
}

void write_report(const std::string& path, const Report& r) {
  if (!path.empty()) write_text_file(path, dump_report(r));
}

const std::map<std::string, KeyGatePolicy> kKeygates{
    {"xor", KeyGatePolicy::XorOnly}, {"mux", KeyGatePolicy::MuxOnly}, {"mixed", KeyGatePolicy::Mixed}};
const std::map<std::string, Selection> kSelections{{"random", Selection::Random},
                                                   {"cone", Selection::ConeSize},
                                                   {"scoap", Selection::Scoap},
                                                   {"sll", Selection::Sll},
                                                   {"fan-heavy", Selection::FanHeavy}};
const std::map<std::string, DummyPolicy> kDummies{{"constant", DummyPolicy::Constant},
                                                  {"pi", DummyPolicy::PrimaryInput},
                                                  {"other-cone", DummyPolicy::OtherConeNet},
                                                  {"random-fn", DummyPolicy::RandomFunction}};
const std::map<std::string, Preset> kPresets{{"sat-hard", Preset::SatHard}};
const std::map<std::string, VerifyMode> kModes{
    {"auto", VerifyMode::Auto}, {"exhaustive", VerifyMode::Exhaustive}, {"sat", VerifyMode::Sat}};
const std::map<std::string, bool> kOnOff{{"on", true}, {"off", false}};

struct LockFlags {
  LockConfig config;
  std::string preset;

  void add(CLI::App* cmd, bool key_size_required) {
    auto* ks = cmd->add_option("--key-size", config.key_size, "Number of key bits");
    if (key_size_required) ks->required();
    cmd->add_option_no_stream("--keygate", config.keygate, "Key gate policy")
        ->transform(CLI::CheckedTransformer(kKeygates, CLI::ignore_case));
    cmd->add_option("--xor-fraction", config.xor_fraction, "XOR share under the mixed policy")
        ->check(CLI::Range(0.0, 1.0));
    cmd->add_option_no_stream("--select", config.selection, "Net selection strategy")
        ->transform(CLI::CheckedTransformer(kSelections, CLI::ignore_case));
    cmd->add_option("--preset", preset, "Configuration preset")->check(CLI::IsMember({"sat-hard"}));
    cmd->add_option_no_stream("--dummy", config.dummy, "Dummy input policy for MUX key gates")
        ->transform(CLI::CheckedTransformer(kDummies, CLI::ignore_case));
    cmd->add_option("--seed", config.seed, "PRNG seed");
    cmd->add_option("--key-prefix", config.key_prefix, "Key input name prefix");
  }

  LockConfig get() const {
    LockConfig c = config;
    if (!preset.empty()) c.preset = kPresets.at(preset);
    return c;
  }
};

struct LlmFlags {
  std::string endpoint;
  std::string model = "gpt-3.5-turbo";
  bool fallback = true;
  std::string mock_replies;
  std::size_t max_repairs = 2;
  double temperature = 0.0;
  int timeout_s = 120;

  void add(CLI::App* cmd) {
    cmd->add_option("--endpoint", endpoint, "Chat-completion endpoint URL");
    cmd->add_option("--model", model, "Model id");
    cmd->add_option("--fallback", fallback, "Use the deterministic engine when the model fails")
        ->transform(CLI::CheckedTransformer(kOnOff, CLI::ignore_case));
    cmd->add_option("--mock-replies", mock_replies, "JSON file of scripted replies (offline runs)");
    cmd->add_option("--max-repairs", max_repairs, "Repair prompts after the first attempt");
    cmd->add_option("--temperature", temperature, "Sampling temperature");
    cmd->add_option("--llm-timeout", timeout_s, "HTTP timeout in seconds");
  }

  bool enabled() const { return !endpoint.empty() || !mock_replies.empty(); }

  std::unique_ptr<llm::Transport> transport() const {
    if (!mock_replies.empty()) {
      auto j = nlohmann::json::parse(read_text_file(mock_replies), nullptr, false);
      if (!j.is_array()) throw InputError("'" + mock_replies + "' is not a JSON array of replies");
      std::vector<llm::MockTransport::Reply> script;
      for (const auto& e : j) {
        llm::MockTransport::Reply r;
        if (e.is_string()) {
          r.text = e.get<std::string>();
        } else if (e.is_object()) {
          r.text = e.value("text", "");
          r.finish_reason = e.value("finish_reason", "stop");
          r.fail = e.value("fail", false);
        } else {
          throw InputError("'" + mock_replies + "': each reply must be a string or an object");
        }
        script.push_back(std::move(r));
      }
      if (script.empty()) throw InputError("'" + mock_replies + "' has no replies");
      return std::make_unique<llm::MockTransport>(std::move(script));
    }
    if (endpoint.empty()) throw ConfigError("an --endpoint or --mock-replies file is required");
    llm::HttpConfig hc;
    hc.endpoint = endpoint;
    hc.timeout = std::chrono::seconds(timeout_s);
    return std::make_unique<llm::HttpTransport>(hc);
  }

  llm::DriverConfig driver(const std::string& key_prefix) const {
    llm::DriverConfig d;
    d.model = model;
    d.params.temperature = temperature;
    d.max_repairs = max_repairs;
    d.fallback = fallback;
    d.key_prefix = key_prefix;
    return d;
  }

  Json echo() const {
    return Json{{"endpoint", endpoint.empty() ? Json(nullptr) : Json(endpoint)},
                {"mock_replies", mock_replies.empty() ? Json(nullptr) : Json(mock_replies)},
                {"temperature", temperature}};
  }
};

void print_verdict(const Verdict& v) {
  std::cout << "structural: " << (v.structural_ok ? "ok" : "failed") << "\n";
  for (const auto& d : v.diagnostics) std::cout << "  " << d << "\n";
  std::cout << "functional: " << to_string(v.functional.kind);
  if (v.functional.kind != FunctionalResult::Kind::Skipped) {
    std::cout << " (" << to_string(v.mode_used);
    if (v.mode_used == VerifyMode::Exhaustive) std::cout << ", " << v.vectors << " vectors";
    std::cout << ")";
  }
  std::cout << "\n";
  if (v.functional.counterexample) {
    std::cout << "counterexample:";
    for (const auto& [n, b] : *v.functional.counterexample) std::cout << " " << n << "=" << b;
    std::cout << "\n";
  }
}

bool verdict_ok(const Verdict& v) { return v.functional.kind == FunctionalResult::Kind::Equivalent; }

// --- subcommands ---------------------------------------------------------

struct ConvertCmd {
  std::string input, output;
  void add(CLI::App& app) {
    auto* c = app.add_subcommand("convert", "Verilog subset to canonical bench");
    c->add_option("--input", input, "Structural Verilog file")->required();
    c->add_option("--output", output, "Bench file (default stdout)");
    c->callback([this] { run(); });
  }
  int code = kExitOk;
  void run() { write_output(output, emit_bench(parse_verilog_subset(read_text_file(input)))); }
};

struct LockCmd {
  std::string input, output, key_out, report;
  LockFlags flags;
  int code = kExitOk;
  void add(CLI::App& app) {
    auto* c = app.add_subcommand("lock", "Insert key gates");
    c->add_option("--input", input, "Bench or Verilog file")->required();
    flags.add(c, true);
    c->add_option("--output", output, "Locked bench file (default stdout)");
    c->add_option("--key-out", key_out, "Key file");
    c->add_option("--report", report, "JSON report");
    c->callback([this] { run(); });
  }
  void run() {
    Report r;
    r.command = "lock";
    r.started_at = utc_timestamp();
    const LockConfig cfg = flags.get();
    const Netlist original = load_netlist(input, cfg.key_prefix);
    auto locked = lock(original, cfg);
    const std::string bench = emit_bench(locked.netlist);
    write_output(output, bench);
    const std::string key = write_key_file(locked.correct_key,
                                           {"circuit " + original.name, "seed " + std::to_string(cfg.seed)});
    if (!key_out.empty()) write_text_file(key_out, key);
    r.circuit = original.name;
    r.config = {{"input", input}, {"lock", to_json(cfg.resolved())}};
    r.stats_before = stats(original);
    r.stats_after = stats(locked.netlist);
    r.finished_at = utc_timestamp();
    write_report(report, r);
  }
};

struct AttackCmd {
  std::string locked, oracle, report;
  std::string key_prefix = std::string(kDefaultKeyPrefix);
  std::int64_t timeout_ms = 300'000;
  std::uint64_t iteration_cap = 0;
  int code = kExitOk;
  void add(CLI::App& app) {
    auto* c = app.add_subcommand("attack", "Oracle-guided SAT attack");
    c->add_option("--locked", locked, "Locked bench file")->required();
    c->add_option("--oracle", oracle, "Unlocked bench or Verilog file")->required();
    c->add_option("--key-prefix", key_prefix, "Key input name prefix");
    c->add_option("--timeout-ms", timeout_ms, "Wall-clock budget")->check(CLI::PositiveNumber);
    c->add_option("--iteration-cap", iteration_cap, "Maximum DIP iterations (default 2^min(k,20))");
    c->add_option("--report", report, "JSON report");
    c->callback([this] { run(); });
  }
  void run() {
    Report r;
    r.command = "attack";
    r.started_at = utc_timestamp();
    const Netlist l = load_netlist(locked, key_prefix);
    const Oracle o(load_netlist(oracle, key_prefix));
    AttackOptions ao;
    ao.key_prefix = key_prefix;
    ao.timeout = std::chrono::milliseconds(timeout_ms);
    if (iteration_cap > 0) ao.iteration_cap = iteration_cap;
    auto res = sat_attack(l, o, ao);

    std::cout << "status: " << to_string(res.status) << "\n";
    if (res.recovered_key) std::cout << "key: " << res.recovered_key->to_string() << "\n";
    std::cout << "iterations: " << res.iterations << "\n";
    std::cout << "elapsed_ms: " << res.elapsed_ms << "\n";

    r.circuit = l.name;
    r.config = {{"locked", locked},
                {"oracle", oracle},
                {"key_prefix", key_prefix},
                {"timeout_ms", timeout_ms},
                {"iteration_cap", iteration_cap > 0 ? Json(iteration_cap) : Json(nullptr)}};
    r.stats_after = stats(l);
    r.stats_before = stats(o.netlist());
    r.attack = res;
    r.finished_at = utc_timestamp();
    write_report(report, r);
    if (res.status != AttackStatus::KeyRecovered) code = kExitFailure;
  }
};

struct VerifyCmd {
  std::string locked, original, key, report;
  std::string key_prefix = std::string(kDefaultKeyPrefix);
  VerifyMode mode = VerifyMode::Auto;
  int code = kExitOk;
  void add(CLI::App& app) {
    auto* c = app.add_subcommand("verify", "Check a locked netlist under a key");
    c->add_option("--locked", locked, "Locked bench file")->required();
    c->add_option("--original", original, "Original bench or Verilog file")->required();
    c->add_option("--key", key, "Key file")->required();
    c->add_option_no_stream("--mode", mode, "Functional check")->transform(CLI::CheckedTransformer(kModes, CLI::ignore_case));
    c->add_option("--key-prefix", key_prefix, "Key input name prefix");
    c->add_option("--report", report, "JSON report");
    c->callback([this] { run(); });
  }
  void run() {
    Report r;
    r.command = "verify";
    r.started_at = utc_timestamp();
    const Netlist l = load_netlist(locked, key_prefix);
    const Netlist o = load_netlist(original, key_prefix);
    const Key k = read_key_file(read_text_file(key));
    VerifyOptions vo;
    vo.mode = mode;
    vo.key_prefix = key_prefix;
    auto v = functional_verify(l, key_inputs_of(l, key_prefix), o, k, vo);
    print_verdict(v);
    r.circuit = o.name;
    r.config = {{"locked", locked}, {"original", original}, {"key", key},
                {"mode", to_string(mode)}, {"key_prefix", key_prefix}};
    r.stats_before = stats(o);
    r.stats_after = stats(l);
    r.verdict = v;
    r.finished_at = utc_timestamp();
    write_report(report, r);
    if (!verdict_ok(v)) code = kExitFailure;
  }
};

struct CorruptCmd {
  std::string locked, original, key, report;
  std::string key_prefix = std::string(kDefaultKeyPrefix);
  CorruptionSamples samples;
  std::uint64_t seed = 0;
  int code = kExitOk;
  void add(CLI::App& app) {
    auto* c = app.add_subcommand("corrupt", "Output corruption under wrong keys");
    c->add_option("--locked", locked, "Locked bench file")->required();
    c->add_option("--original", original, "Original bench or Verilog file")->required();
    c->add_option("--key", key, "Correct key file")->required();
    c->add_option("--wrong-keys", samples.wrong_keys, "Wrong keys sampled");
    c->add_option("--inputs", samples.inputs, "Input patterns per key");
    c->add_option("--seed", seed, "PRNG seed");
    c->add_option("--key-prefix", key_prefix, "Key input name prefix");
    c->add_option("--report", report, "JSON report");
    c->callback([this] { run(); });
  }
  void run() {
    Report r;
    r.command = "corrupt";
    r.started_at = utc_timestamp();
    const Netlist l = load_netlist(locked, key_prefix);
    const Oracle o(load_netlist(original, key_prefix));
    const Key k = read_key_file(read_text_file(key));
    auto s = corruption_stats(l, o, k, samples, seed, key_prefix);
    std::cout << "corruption_rate: " << s.corruption_rate << "\n";
    std::cout << "mean_output_hamming: " << s.mean_output_hamming << "\n";
    std::cout << "pairs: " << s.pairs << "\n";
    r.circuit = o.netlist().name;
    r.config = {{"locked", locked},
                {"original", original},
                {"key", key},
                {"wrong_keys", samples.wrong_keys},
                {"inputs", samples.inputs},
                {"seed", seed},
                {"prng", kPrngName},
                {"key_prefix", key_prefix}};
    r.stats_before = stats(o.netlist());
    r.stats_after = stats(l);
    r.corruption = s;
    r.finished_at = utc_timestamp();
    write_report(report, r);
  }
};

struct LlmLockCmd {
  std::string input, output, key_out, report, run_dir;
  LockFlags flags;
  LlmFlags llm_flags;
  int code = kExitOk;
  void add(CLI::App& app) {
    auto* c = app.add_subcommand("llm-lock", "Lock through a language model with verification and fallback");
    c->add_option("--input", input, "Verilog or bench file")->required();
    flags.add(c, true);
    llm_flags.add(c);
    c->add_option("--output", output, "Locked bench file (default stdout)");
    c->add_option("--key-out", key_out, "Key file");
    c->add_option("--report", report, "JSON report");
    c->add_option("--run-dir", run_dir, "Directory for transcripts and artifacts");
    c->callback([this] { run(); });
  }
  void run() {
    Report r;
    r.command = "llm-lock";
    r.started_at = utc_timestamp();
    const LockConfig cfg = flags.get().resolved();
    cfg.validate();
    auto transport = llm_flags.transport();
    const auto driver = llm_flags.driver(cfg.key_prefix);

    Netlist original;
    if (ends_with(input, ".v")) {
      auto conv = llm::llm_convert(*transport, read_text_file(input), driver);
      original = std::move(conv.netlist);
      r.llm.push_back(std::move(conv.record));
    } else {
      original = load_netlist(input, cfg.key_prefix);
    }
    auto ob = llm::llm_obfuscate(*transport, original, cfg, driver);
    r.llm.push_back(ob.record);

    const std::string bench = emit_bench(ob.locked.netlist);
    write_output(output, bench);
    const std::string key = write_key_file(ob.locked.correct_key,
                                           {"circuit " + original.name, "seed " + std::to_string(cfg.seed)});
    if (!key_out.empty()) write_text_file(key_out, key);

    VerifyOptions vo;
    vo.key_prefix = cfg.key_prefix;
    r.verdict = functional_verify(ob.locked, original, ob.locked.correct_key, vo);
    std::cerr << "source: " << llm::to_string(ob.record.final_source) << "\n";

    Json echo{{"input", input}, {"lock", to_json(cfg)}, {"llm", llm_flags.echo()}};
    echo["llm"]["model"] = llm_flags.model;
    echo["llm"]["fallback"] = llm_flags.fallback;
    echo["llm"]["max_repairs"] = llm_flags.max_repairs;
    r.circuit = original.name;
    r.config = echo;
    r.stats_before = stats(original);
    r.stats_after = stats(ob.locked.netlist);
    r.finished_at = utc_timestamp();
    write_report(report, r);
    if (!run_dir.empty()) {
      PipelineRun pr;
      pr.original = original;
      pr.locked = ob.locked;
      pr.locked_bench = bench;
      pr.key_file = key;
      pr.report = r;
      std::cerr << "run directory: " << write_run_directory(pr, run_dir).string() << "\n";
    }
    if (!verdict_ok(*r.verdict)) code = kExitFailure;
  }
};

struct PipelineCmd {
  std::vector<std::string> inputs;
  std::string report, run_dir;
  LockFlags flags;
  LlmFlags llm_flags;
  VerifyMode mode = VerifyMode::Auto;
  std::int64_t timeout_ms = 300'000;
  std::uint64_t iteration_cap = 0;
  bool no_attack = false;
  bool no_corruption = false;
  CorruptionSamples samples;
  unsigned jobs = 1;
  int code = kExitOk;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("pipeline", "convert -> lock -> verify -> attack -> report");
    c->add_option("--input", inputs, "Verilog or bench files (several allowed)")->required();
    flags.add(c, true);
    llm_flags.add(c);
    c->add_option_no_stream("--mode", mode, "Functional check")->transform(CLI::CheckedTransformer(kModes, CLI::ignore_case));
    c->add_option("--timeout-ms", timeout_ms, "Attack wall-clock budget")->check(CLI::PositiveNumber);
    c->add_option("--iteration-cap", iteration_cap, "Maximum DIP iterations");
    c->add_flag("--no-attack", no_attack, "Skip the SAT attack");
    c->add_flag("--no-corruption", no_corruption, "Skip corruption sampling");
    c->add_option("--wrong-keys", samples.wrong_keys, "Wrong keys sampled");
    c->add_option("--inputs", samples.inputs, "Input patterns per wrong key");
    c->add_option("--report", report,
                  "JSON report (with several inputs: <stem>.<circuit>.json next to this path)");
    c->add_option("--run-dir", run_dir, "Root directory for per-run artifact directories");
    c->add_option("--jobs", jobs, "Circuits processed in parallel")->check(CLI::PositiveNumber);
    c->callback([this] { run(); });
  }

  fs::path report_path(const std::string& circuit) const {
    if (inputs.size() == 1) return report;
    fs::path p(report);
    return p.parent_path() / (p.stem().string() + "." + circuit + p.extension().string());
  }

  void run() {
    PipelineOptions base;
    base.lock = flags.get();
    base.verify_mode = mode;
    base.attack = !no_attack;
    base.attack_timeout = std::chrono::milliseconds(timeout_ms);
    if (iteration_cap > 0) base.iteration_cap = iteration_cap;
    base.corruption = !no_corruption;
    base.samples = samples;
    if (llm_flags.enabled()) {
      base.driver = llm_flags.driver(base.lock.key_prefix);
      base.extra_config = llm_flags.echo();
    }

    std::vector<int> codes(inputs.size(), kExitOk);
    std::vector<std::string> lines(inputs.size());
    std::atomic<std::size_t> next{0};
    std::mutex err_mu;
    auto worker = [&] {
      for (std::size_t i; (i = next++) < inputs.size();) {
        try {
          PipelineOptions opt = base;
          std::unique_ptr<llm::Transport> transport;
          if (llm_flags.enabled()) {
            transport = llm_flags.transport();
            opt.transport = transport.get();
          }
          auto run = run_pipeline(read_text_file(inputs[i]), inputs[i], opt);
          if (!report.empty()) write_text_file(report_path(run.report.circuit), dump_report(run.report));
          std::string dir;
          if (!run_dir.empty()) dir = write_run_directory(run, run_dir).string();
          const auto& rep = run.report;
          std::string line = rep.circuit + ": functional=" +
                             std::string(to_string(rep.verdict->functional.kind));
          if (rep.attack) {
            line += " attack=" + std::string(to_string(rep.attack->status)) +
                    " iterations=" + std::to_string(rep.attack->iterations);
          }
          if (rep.corruption) line += " corruption_rate=" + std::to_string(rep.corruption->corruption_rate);
          if (!dir.empty()) line += " run_dir=" + dir;
          lines[i] = line;
          codes[i] = run.ok ? kExitOk : kExitFailure;
        } catch (const Error& e) {
          std::lock_guard lk(err_mu);
          codes[i] = report_error(e.kind(), inputs[i] + ": " + e.what(), exit_code_for(e));
        }
      }
    };
    const unsigned n = std::min<unsigned>(jobs, static_cast<unsigned>(inputs.size()));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    for (const auto& l : lines) {
      if (!l.empty()) std::cout << l << "\n";
    }
    code = *std::max_element(codes.begin(), codes.end());
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Logic locking, SAT attack and verification toolkit", "obfus"};
  app.set_version_flag("--version", std::string(tool_version()));
  app.add_flag("--json-errors", g_json_errors, "Write errors as a JSON object on stderr");
  app.require_subcommand(1);

  ConvertCmd convert;
  LockCmd lock_cmd;
  AttackCmd attack;
  VerifyCmd verify;
  CorruptCmd corrupt;
  LlmLockCmd llm_lock;
  PipelineCmd pipeline;
  convert.add(app);
  lock_cmd.add(app);
  attack.add(app);
  verify.add(app);
  corrupt.add(app);
  llm_lock.add(app);
  pipeline.add(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    if (g_json_errors) return report_error(e.get_name(), e.what(), kExitUsage);
    app.exit(e);
    return kExitUsage;
  } catch (const Error& e) {
    return report_error(e.kind(), e.what(), exit_code_for(e));
  } catch (const nlohmann::json::exception& e) {
    return report_error("InputError", e.what(), kExitUsage);
  } catch (const std::exception& e) {
    return report_error("InternalError", e.what(), kExitFailure);
  }
  for (int c : {convert.code, lock_cmd.code, attack.code, verify.code, corrupt.code, llm_lock.code, pipeline.code}) {
    if (c != kExitOk) return c;
  }
  return kExitOk;
}
