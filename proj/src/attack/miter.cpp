#include <algorithm>

#include "obfus/attack.hpp"
#include "obfus/error.hpp"
#include "obfus/locking.hpp"

namespace obfus {

Oracle::Oracle(Netlist netlist) : netlist_(std::move(netlist)), sim_(netlist_) {}

Bits Oracle::query(const Bits& inputs) const {
  ++queries_;
  return sim_.evaluate(inputs);
}

Assignment Oracle::query(const Assignment& inputs) const {
  Bits in;
  in.reserve(netlist_.inputs.size());
  for (const auto& pi : netlist_.inputs) {
    auto it = inputs.find(pi);
    if (it == inputs.end()) throw InputError("missing value for primary input '" + pi + "'");
    in.push_back(it->second);
  }
  Bits out = query(in);
  Assignment result;
  for (std::size_t o = 0; o < out.size(); ++o) result[netlist_.outputs[o]] = out[o];
  return result;
}

Miter build_miter(const Netlist& locked, const MiterOptions& options) {
  NetGraph graph(locked);
  Miter m;
  m.key_inputs = key_inputs_of(locked, options.key_prefix);
  if (m.key_inputs.empty() && !options.allow_no_keys) {
    throw AttackError("no key inputs with prefix '" + options.key_prefix + "': nothing to attack");
  }
  std::vector<bool> is_key(graph.net_count(), false);
  for (const auto& k : m.key_inputs) is_key[graph.id(k)] = true;

  auto lits_a = encode_circuit(graph, m.cnf);
  std::vector<Lit> bound(graph.input_count(), 0);
  for (NetId i = 0; i < graph.input_count(); ++i) {
    if (!is_key[i]) bound[i] = lits_a[i];
  }
  auto lits_b = encode_circuit(graph, m.cnf, bound);

  for (NetId i = 0; i < graph.net_count(); ++i) {
    m.copy_a.bind(graph.name(i), lits_a[i]);
    m.copy_b.bind(graph.name(i), lits_b[i]);
  }
  for (NetId i = 0; i < graph.input_count(); ++i) {
    if (is_key[i]) continue;
    m.inputs.push_back(graph.name(i));
    m.input_vars.push_back(lits_a[i]);
  }
  for (const auto& k : m.key_inputs) {
    m.key_a.push_back(lits_a[graph.id(k)]);
    m.key_b.push_back(lits_b[graph.id(k)]);
  }

  for (NetId po : graph.output_ids()) {
    Lit d = m.cnf.new_var();
    encode_xor2(m.cnf, d, lits_a[po], lits_b[po]);
    m.diff.push_back(d);
  }
  std::vector<Lit> some(m.diff);
  if (options.gate_difference) {
    m.activation = m.cnf.new_var();
    some.insert(some.begin(), -m.activation);
  }
  m.cnf.add(std::move(some));
  return m;
}

void check_same_interface(const Netlist& a, const Netlist& b) {
  auto diff = [](const std::vector<NetName>& x, const std::vector<NetName>& y) {
    std::vector<NetName> sx(x), sy(y), out;
    std::sort(sx.begin(), sx.end());
    std::sort(sy.begin(), sy.end());
    std::set_difference(sx.begin(), sx.end(), sy.begin(), sy.end(), std::back_inserter(out));
    return out;
  };
  auto join = [](const std::vector<NetName>& v) {
    std::string s;
    for (const auto& n : v) s += (s.empty() ? "" : ", ") + n;
    return s;
  };
  std::string msg;
  auto report = [&](const char* what, const std::vector<NetName>& x, const std::vector<NetName>& y) {
    auto missing = diff(x, y);
    auto extra = diff(y, x);
    if (!missing.empty()) msg += std::string(msg.empty() ? "" : "; ") + what + " missing from second: " + join(missing);
    if (!extra.empty()) msg += std::string(msg.empty() ? "" : "; ") + what + " extra in second: " + join(extra);
  };
  report("inputs", a.inputs, b.inputs);
  report("outputs", a.outputs, b.outputs);
  if (!msg.empty()) throw InterfaceError("interface mismatch: " + msg);
}

}  // namespace obfus
