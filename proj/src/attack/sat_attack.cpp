#include <algorithm>
#include <set>

#include "obfus/attack.hpp"
#include "obfus/error.hpp"
#include "obfus/locking.hpp"

namespace obfus {

std::string_view to_string(AttackStatus s) {
  switch (s) {
    case AttackStatus::KeyRecovered: return "key_recovered";
    case AttackStatus::AbortedTimeout: return "aborted_timeout";
    case AttackStatus::AbortedIterationCap: return "aborted_iteration_cap";
  }
  return "?";
}

namespace {

using Clock = std::chrono::steady_clock;

// Feeds the growing formula either to one incremental solver or, for
// external backends, re-solves it from scratch.
class Engine {
 public:
  explicit Engine(std::shared_ptr<SatBackend> backend) : backend_(std::move(backend)) {}

  CnfFormula cnf;

  SatStatus solve(std::span<const Lit> assumptions, const SolveLimits& limits) {
    if (backend_) {
      SatOutcome o = backend_->solve(cnf, assumptions, limits);
      stats_ += o.stats;
      model_ = std::move(o.model);
      return o.status;
    }
    incremental_.add_formula(cnf, fed_);
    fed_ = cnf.clauses.size();
    const SolverStats before = incremental_.stats();
    SatStatus s = incremental_.solve(assumptions, limits);
    if (s == SatStatus::Sat) {
      model_ = incremental_.model();
      if (!cnf.satisfied_by(model_)) throw SolverError("solver returned a model that violates a clause");
    }
    SolverStats delta = incremental_.stats();
    delta.decisions -= before.decisions;
    delta.conflicts -= before.conflicts;
    delta.propagations -= before.propagations;
    delta.restarts -= before.restarts;
    delta.learnt_clauses -= before.learnt_clauses;
    stats_ += delta;
    return s;
  }

  bool value(Lit l) const {
    bool v = model_.at(static_cast<std::size_t>(std::abs(l)));
    return l > 0 ? v : !v;
  }
  const SolverStats& stats() const { return stats_; }

 private:
  std::shared_ptr<SatBackend> backend_;
  Solver incremental_;
  std::size_t fed_ = 0;
  std::vector<bool> model_;
  SolverStats stats_;
};

}  // namespace

AttackResult sat_attack(const Netlist& locked, const Oracle& oracle, const AttackOptions& options) {
  const auto start = Clock::now();
  const auto deadline = start + options.timeout;
  NetGraph graph(locked);

  MiterOptions mo;
  mo.key_prefix = options.key_prefix;
  mo.gate_difference = true;
  Miter miter = build_miter(locked, mo);

  // Oracle ports must match the locked ports minus the key inputs.
  Netlist visible;
  visible.inputs = miter.inputs;
  visible.outputs = locked.outputs;
  check_same_interface(oracle.netlist(), visible);

  AttackResult r;
  r.input_names = miter.inputs;
  r.output_names = locked.outputs;
  r.key_inputs = miter.key_inputs;
  const std::size_t k = miter.key_inputs.size();
  r.iteration_cap = options.iteration_cap.value_or(std::uint64_t{1} << std::min<std::size_t>(k, 20));

  std::vector<std::size_t> oracle_pos;  // oracle PI index for each miter input
  {
    const auto& oin = oracle.netlist().inputs;
    for (const auto& name : miter.inputs) {
      oracle_pos.push_back(static_cast<std::size_t>(std::find(oin.begin(), oin.end(), name) - oin.begin()));
    }
  }
  std::vector<std::size_t> oracle_out;  // oracle PO index for each locked PO
  {
    const auto& oout = oracle.netlist().outputs;
    for (const auto& name : locked.outputs) {
      oracle_out.push_back(static_cast<std::size_t>(std::find(oout.begin(), oout.end(), name) - oout.begin()));
    }
  }

  Engine engine(options.backend);
  engine.cnf = std::move(miter.cnf);
  const Lit t = engine.cnf.new_var();
  engine.cnf.add({t});

  std::vector<bool> is_key(graph.net_count(), false);
  for (const auto& name : miter.key_inputs) is_key[graph.id(name)] = true;

  auto add_copy = [&](const std::vector<Lit>& keys, const Bits& x, const Bits& y) {
    std::vector<Lit> bound(graph.input_count(), 0);
    std::size_t xi = 0, ki = 0;
    for (NetId i = 0; i < graph.input_count(); ++i) {
      bound[i] = is_key[i] ? keys[ki++] : (x[xi++] ? t : -t);
    }
    auto lits = encode_circuit(graph, engine.cnf, bound);
    const auto& pos = graph.output_ids();
    for (std::size_t o = 0; o < pos.size(); ++o) {
      Lit l = lits[pos[o]];
      engine.cnf.add({y[o] ? l : -l});
    }
  };

  SolveLimits limits;
  limits.deadline = deadline;
  auto finish = [&](AttackStatus status) {
    r.status = status;
    r.solver_stats = engine.stats();
    r.elapsed_ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
    return r;
  };

  const Lit act = miter.activation;
  for (;;) {
    if (Clock::now() >= deadline) return finish(AttackStatus::AbortedTimeout);
    SatStatus s = engine.solve(std::span<const Lit>(&act, 1), limits);
    if (s == SatStatus::Aborted) return finish(AttackStatus::AbortedTimeout);
    if (s == SatStatus::Unsat) break;
    if (r.iterations >= r.iteration_cap) return finish(AttackStatus::AbortedIterationCap);

    Bits x(miter.inputs.size());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = engine.value(miter.input_vars[i]);
    Bits ox(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) ox[oracle_pos[i]] = x[i];
    Bits oy = oracle.query(ox);
    Bits y(locked.outputs.size());
    for (std::size_t o = 0; o < y.size(); ++o) y[o] = oy[oracle_out[o]];

    add_copy(miter.key_a, x, y);
    add_copy(miter.key_b, x, y);
    r.dips.push_back({std::move(x), std::move(y)});
    ++r.iterations;
    r.clause_counts.push_back(engine.cnf.clauses.size());
  }

  // Any key consistent with every observed DIP is correct.
  const Lit off = -act;
  SatStatus s = engine.solve(std::span<const Lit>(&off, 1), limits);
  if (s == SatStatus::Aborted) return finish(AttackStatus::AbortedTimeout);
  if (s == SatStatus::Unsat) {
    throw AttackError("no key is consistent with the oracle responses; the locked netlist does not "
                      "match the oracle");
  }
  Key key;
  for (Lit l : miter.key_a) key.bits.push_back(engine.value(l));
  r.recovered_key = key;

  EquivalenceOptions eo;
  eo.backend = options.backend;
  auto eq = equivalence_check(apply_key(locked, miter.key_inputs, key), oracle.netlist(), eo);
  if (!eq.equivalent()) throw AttackError("recovered key failed the equivalence check");
  r.verified = true;
  return finish(AttackStatus::KeyRecovered);
}

}  // namespace obfus
