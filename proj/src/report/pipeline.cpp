#include "obfus/pipeline.hpp"

#include <fstream>
#include <sstream>

#include "obfus/error.hpp"
#include "obfus/verilog.hpp"

namespace obfus {

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  out << text;
  if (!out.flush()) throw InputError("cannot write '" + path.string() + "'");
}

namespace {

bool is_verilog(const std::string& name) {
  return name.size() >= 2 && name.compare(name.size() - 2, 2, ".v") == 0;
}

std::string stem(const std::string& name) {
  auto s = std::filesystem::path(name).stem().string();
  return s.empty() ? "circuit" : s;
}

}  // namespace

PipelineRun run_pipeline(const std::string& source_text, const std::string& source_name,
                         const PipelineOptions& options) {
  PipelineRun run;
  Report& rep = run.report;
  rep.command = "pipeline";
  rep.started_at = utc_timestamp();

  const LockConfig cfg = options.lock.resolved();
  cfg.validate();

  Json config;
  config["input"] = source_name;
  config["lock"] = to_json(cfg);
  config["verify"] = {{"mode", to_string(options.verify_mode)}};
  config["attack"] = options.attack ? Json{{"timeout_ms", options.attack_timeout.count()},
                                           {"iteration_cap", options.iteration_cap ? Json(*options.iteration_cap)
                                                                                   : Json(nullptr)}}
                                    : Json(nullptr);
  config["corruption"] = options.corruption ? Json{{"wrong_keys", options.samples.wrong_keys},
                                                   {"inputs", options.samples.inputs},
                                                   {"seed", cfg.seed}}
                                            : Json(nullptr);
  if (options.transport) {
    Json llm{{"model", options.driver.model},
             {"max_repairs", options.driver.max_repairs},
             {"fallback", options.driver.fallback},
             {"max_continuations", options.driver.limits.max_continuations}};
    for (const auto& [k, v] : options.extra_config.items()) llm[k] = v;
    config["llm"] = llm;
  } else {
    config["llm"] = nullptr;
  }
  rep.config = std::move(config);

  if (is_verilog(source_name)) {
    if (options.transport) {
      auto conv = llm::llm_convert(*options.transport, source_text, options.driver);
      run.original = std::move(conv.netlist);
      rep.llm.push_back(std::move(conv.record));
    } else {
      run.original = parse_verilog_subset(source_text);
    }
  } else {
    BenchParseOptions po;
    po.name = stem(source_name);
    po.key_prefix = cfg.key_prefix;
    run.original = parse_bench(source_text, po);
  }
  rep.circuit = run.original.name;
  rep.stats_before = stats(run.original);

  if (options.transport) {
    auto ob = llm::llm_obfuscate(*options.transport, run.original, cfg, options.driver);
    run.locked = std::move(ob.locked);
    rep.llm.push_back(std::move(ob.record));
  } else {
    run.locked = lock(run.original, cfg);
  }
  rep.stats_after = stats(run.locked.netlist);
  run.locked_bench = emit_bench(run.locked.netlist);
  run.key_file = write_key_file(run.locked.correct_key,
                                {"circuit " + run.original.name, "seed " + std::to_string(cfg.seed)});

  VerifyOptions vo;
  vo.mode = options.verify_mode;
  vo.key_prefix = cfg.key_prefix;
  rep.verdict = functional_verify(run.locked, run.original, run.locked.correct_key, vo);
  run.ok = rep.verdict->functional.kind == FunctionalResult::Kind::Equivalent;

  Oracle oracle(run.original);
  if (options.attack && run.ok) {
    AttackOptions ao;
    ao.key_prefix = cfg.key_prefix;
    ao.timeout = options.attack_timeout;
    ao.iteration_cap = options.iteration_cap;
    rep.attack = sat_attack(run.locked.netlist, oracle, ao);
    run.ok = rep.attack->status == AttackStatus::KeyRecovered;
  }
  if (options.corruption && cfg.key_size > 0) {
    rep.corruption = corruption_stats(run.locked.netlist, oracle, run.locked.correct_key, options.samples,
                                      cfg.seed, cfg.key_prefix);
  }
  rep.finished_at = utc_timestamp();
  return run;
}

std::filesystem::path write_run_directory(const PipelineRun& run, const std::filesystem::path& root) {
  std::string stamp = run.report.started_at;
  std::erase(stamp, '-');
  std::erase(stamp, ':');
  const auto seed = run.report.config.at("lock").at("seed").get<std::uint64_t>();
  const std::string base = stamp + "_s" + std::to_string(seed);

  std::error_code ec;
  std::filesystem::create_directories(root, ec);
  if (ec) throw InputError("cannot create '" + root.string() + "': " + ec.message());
  std::filesystem::path dir = root / base;
  for (int n = 1; !std::filesystem::create_directory(dir, ec); ++n) {
    if (ec) throw InputError("cannot create '" + dir.string() + "': " + ec.message());
    dir = root / (base + "-" + std::to_string(n));
  }

  write_text_file(dir / "locked.bench", run.locked_bench);
  write_text_file(dir / "key.txt", run.key_file);
  write_text_file(dir / "report.json", dump_report(run.report));
  for (const auto& rec : run.report.llm) {
    write_text_file(dir / ("transcript." + rec.template_id + ".json"), to_json(rec.transcript).dump(2) + "\n");
  }
  return dir;
}

}  // namespace obfus
