#include <algorithm>
#include <optional>
#include <set>
#include <stdexcept>
#include <unordered_map>

#include "obfus/error.hpp"
#include "obfus/locking.hpp"

namespace obfus {

namespace {

// Result of folding constants into one gate: either a constant, or a
// (possibly smaller) gate over the remaining inputs.
struct Folded {
  std::optional<bool> constant;
  Gate gate;
  bool synthetic_buffer = false;
};

Folded fold_gate(const Gate& g, const std::vector<std::optional<bool>>& value, const NetGraph& graph) {
  auto val = [&](const NetName& n) { return value[graph.id(n)]; };
  Folded f;
  f.gate = g;
  auto unary = [&](const NetName& in, bool invert) {
    f.gate = {g.output, invert ? GateKind::Not : GateKind::Buff, {in}};
    f.synthetic_buffer = !invert;
  };

  switch (g.kind) {
    case GateKind::And:
    case GateKind::Nand:
    case GateKind::Or:
    case GateKind::Nor: {
      const bool is_and = g.kind == GateKind::And || g.kind == GateKind::Nand;
      const bool invert = g.kind == GateKind::Nand || g.kind == GateKind::Nor;
      const bool controlling = !is_and;  // 0 for AND, 1 for OR
      std::vector<NetName> rest;
      for (const auto& in : g.inputs) {
        auto v = val(in);
        if (!v) {
          rest.push_back(in);
        } else if (*v == controlling) {
          f.constant = controlling != invert;
          return f;
        }
      }
      if (rest.empty()) {
        f.constant = !controlling != invert;
      } else if (rest.size() == 1) {
        unary(rest[0], invert);
      } else {
        f.gate.inputs = std::move(rest);
      }
      return f;
    }
    case GateKind::Xor:
    case GateKind::Xnor: {
      bool parity = g.kind == GateKind::Xnor;
      std::vector<NetName> rest;
      for (const auto& in : g.inputs) {
        auto v = val(in);
        if (v) {
          parity ^= *v;
        } else {
          rest.push_back(in);
        }
      }
      if (rest.empty()) {
        f.constant = parity;
      } else if (rest.size() == 1) {
        unary(rest[0], parity);
      } else {
        f.gate.kind = parity ? GateKind::Xnor : GateKind::Xor;
        f.gate.inputs = std::move(rest);
      }
      return f;
    }
    case GateKind::Not:
    case GateKind::Buff: {
      if (auto v = val(g.inputs[0])) f.constant = *v != (g.kind == GateKind::Not);
      return f;
    }
    case GateKind::Mux: {
      const auto& s = g.inputs[0];
      const auto& a = g.inputs[1];
      const auto& b = g.inputs[2];
      if (auto sv = val(s)) {
        const NetName& pick = *sv ? b : a;
        if (auto pv = val(pick)) {
          f.constant = *pv;
        } else {
          unary(pick, false);
        }
        return f;
      }
      auto av = val(a);
      auto bv = val(b);
      if (av && bv) {
        if (*av == *bv) {
          f.constant = *av;
        } else {
          unary(s, *av);  // (0,1) -> s, (1,0) -> NOT s
        }
      } else if (a == b) {
        unary(a, false);
      }
      return f;
    }
  }
  return f;
}

std::unordered_map<NetName, std::size_t> load_counts(const Netlist& n) {
  std::unordered_map<NetName, std::size_t> loads;
  for (const auto& g : n.gates) {
    for (const auto& in : g.inputs) ++loads[in];
  }
  return loads;
}

}  // namespace

Netlist apply_key(const Netlist& locked, const std::vector<NetName>& key_inputs, const Key& key) {
  if (key.size() != key_inputs.size()) {
    throw LockError("key has " + std::to_string(key.size()) + " bits but the netlist has " +
                    std::to_string(key_inputs.size()) + " key inputs");
  }
  NetGraph graph(locked);
  std::vector<std::optional<bool>> value(graph.net_count());
  std::set<NetName> keys;
  for (std::size_t i = 0; i < key_inputs.size(); ++i) {
    NetId id = graph.id(key_inputs[i]);
    if (!graph.is_input(id)) throw LockError("key net '" + key_inputs[i] + "' is not an input");
    if (!keys.insert(key_inputs[i]).second) {
      throw LockError("key input '" + key_inputs[i] + "' listed twice");
    }
    value[id] = key.bits[i] != 0;
  }

  Netlist out;
  out.name = locked.name;
  out.outputs = locked.outputs;
  for (const auto& pi : locked.inputs) {
    if (!keys.count(pi)) out.inputs.push_back(pi);
  }

  std::vector<Folded> folded(locked.gates.size());
  for (std::size_t gi : graph.topo_gates()) {
    const Gate& g = locked.gates[gi];
    folded[gi] = fold_gate(g, value, graph);
    value[graph.id(g.output)] = folded[gi].constant;
  }

  // Constant nets still read by logic (or by a port) become self-paired
  // XOR/XNOR gates over a primary input.
  std::set<NetName> needed;
  for (const auto& f : folded) {
    if (f.constant) continue;
    for (const auto& in : f.gate.inputs) {
      if (value[graph.id(in)]) needed.insert(in);
    }
  }
  for (const auto& po : locked.outputs) {
    if (value[graph.id(po)]) needed.insert(po);
  }
  auto constant_gate = [&](const NetName& name) {
    if (out.inputs.empty()) {
      throw LockError("cannot express constant net '" + name + "' without a primary input");
    }
    const NetName& p = out.inputs.front();
    return Gate{name, *value[graph.id(name)] ? GateKind::Xnor : GateKind::Xor, {p, p}};
  };

  std::set<NetName> synthetic;
  std::set<NetName> had_loads;
  for (std::size_t i = 0; i < graph.net_count(); ++i) {
    if (!graph.loads(static_cast<NetId>(i)).empty()) had_loads.insert(graph.name(static_cast<NetId>(i)));
  }
  for (const auto& pi : locked.inputs) {
    if (keys.count(pi) && needed.count(pi)) out.gates.push_back(constant_gate(pi));
  }
  for (std::size_t gi = 0; gi < locked.gates.size(); ++gi) {
    const Folded& f = folded[gi];
    if (f.constant) {
      if (needed.count(f.gate.output)) out.gates.push_back(constant_gate(f.gate.output));
      continue;
    }
    if (f.synthetic_buffer) synthetic.insert(f.gate.output);
    out.gates.push_back(f.gate);
  }

  std::set<NetName> pos(out.outputs.begin(), out.outputs.end());

  // Drop logic that only fed simplified-away key gates. Nets that were
  // already unloaded in the locked netlist are left alone.
  for (bool changed = true; changed;) {
    changed = false;
    auto loads = load_counts(out);
    auto dead = [&](const Gate& g) {
      return !loads.count(g.output) && !pos.count(g.output) && had_loads.count(g.output);
    };
    auto it = std::remove_if(out.gates.begin(), out.gates.end(), dead);
    if (it != out.gates.end()) {
      out.gates.erase(it, out.gates.end());
      changed = true;
    }
  }

  // Fold buffers left behind by key gates: y = BUFF(x).
  for (bool changed = true; changed;) {
    changed = false;
    auto loads = load_counts(out);
    for (std::size_t i = 0; i < out.gates.size(); ++i) {
      const Gate g = out.gates[i];
      if (g.kind != GateKind::Buff || !synthetic.count(g.output)) continue;
      const NetName& x = g.inputs[0];
      auto driver = std::find_if(out.gates.begin(), out.gates.end(),
                                 [&](const Gate& d) { return d.output == x; });
      if (driver != out.gates.end() && !pos.count(x) && loads[x] == 1) {
        driver->output = g.output;
        synthetic.erase(g.output);
        if (synthetic.count(x)) {
          synthetic.erase(x);
          synthetic.insert(g.output);
        }
      } else if (!pos.count(g.output)) {
        for (auto& other : out.gates) {
          for (auto& in : other.inputs) {
            if (in == g.output) in = x;
          }
        }
        synthetic.erase(g.output);
      } else {
        continue;
      }
      out.gates.erase(out.gates.begin() + static_cast<std::ptrdiff_t>(i));
      changed = true;
      break;
    }
  }

  for (const auto& d : validate(out)) {
    throw std::logic_error("apply_key produced an invalid netlist: " + d.message);
  }
  return out;
}

}  // namespace obfus
