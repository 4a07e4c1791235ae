#include "obfus/attack.hpp"
#include "obfus/error.hpp"

namespace obfus {

EquivalenceResult equivalence_check(const Netlist& a, const Netlist& b, const EquivalenceOptions& options) {
  check_same_interface(a, b);
  NetGraph ga(a);
  NetGraph gb(b);

  CnfFormula cnf;
  auto la = encode_circuit(ga, cnf);
  std::vector<Lit> bound(gb.input_count(), 0);
  for (NetId i = 0; i < gb.input_count(); ++i) bound[i] = la[ga.id(gb.name(i))];
  auto lb = encode_circuit(gb, cnf, bound);

  std::vector<Lit> some;
  for (NetId po : ga.output_ids()) {
    Lit d = cnf.new_var();
    encode_xor2(cnf, d, la[po], lb[gb.id(ga.name(po))]);
    some.push_back(d);
  }
  cnf.add(std::move(some));

  SatOutcome outcome = options.backend ? options.backend->solve(cnf, {}, options.limits)
                                       : solve(cnf, {}, options.limits);
  EquivalenceResult r;
  r.stats = outcome.stats;
  if (outcome.status == SatStatus::Unsat) {
    r.status = EquivalenceResult::Status::Equivalent;
    return r;
  }
  if (outcome.status == SatStatus::Aborted) {
    r.status = EquivalenceResult::Status::Aborted;
    return r;
  }
  Assignment x;
  for (NetId i = 0; i < ga.input_count(); ++i) {
    x[ga.name(i)] = outcome.model[static_cast<std::size_t>(la[i])];
  }
  if (simulate(a, x) == simulate(b, x)) {
    throw SolverError("equivalence counterexample does not reproduce in simulation");
  }
  r.status = EquivalenceResult::Status::Different;
  r.counterexample = std::move(x);
  return r;
}

}  // namespace obfus
