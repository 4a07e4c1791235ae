#include "obfus/netlist.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <queue>

#include "obfus/error.hpp"

namespace obfus {

std::string_view to_string(GateKind kind) {
  switch (kind) {
    case GateKind::And: return "AND";
    case GateKind::Nand: return "NAND";
    case GateKind::Or: return "OR";
    case GateKind::Nor: return "NOR";
    case GateKind::Xor: return "XOR";
    case GateKind::Xnor: return "XNOR";
    case GateKind::Not: return "NOT";
    case GateKind::Buff: return "BUFF";
    case GateKind::Mux: return "MUX";
  }
  return "?";
}

std::optional<GateKind> parse_gate_kind(std::string_view text) {
  std::string upper(text);
  for (auto& c : upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (upper == "BUF") return GateKind::Buff;
  for (GateKind k : kAllGateKinds) {
    if (to_string(k) == upper) return k;
  }
  return std::nullopt;
}

bool arity_ok(GateKind kind, std::size_t inputs) {
  switch (kind) {
    case GateKind::Not:
    case GateKind::Buff: return inputs == 1;
    case GateKind::Mux: return inputs == 3;
    default: return inputs >= 2;
  }
}

bool is_valid_net_name(std::string_view name) {
  if (name.empty()) return false;
  return std::all_of(name.begin(), name.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  });
}

bool structurally_equal(const Netlist& a, const Netlist& b) {
  if (a.name != b.name || a.inputs != b.inputs || a.outputs != b.outputs ||
      a.gates.size() != b.gates.size()) {
    return false;
  }
  std::map<NetName, const Gate*> by_output;
  for (const auto& g : a.gates) by_output[g.output] = &g;
  for (const auto& g : b.gates) {
    auto it = by_output.find(g.output);
    if (it == by_output.end() || !(*it->second == g)) return false;
  }
  return true;
}

std::string_view to_string(Diagnostic::Kind kind) {
  switch (kind) {
    case Diagnostic::Kind::InvalidName: return "invalid-name";
    case Diagnostic::Kind::MultiDriver: return "multi-driver";
    case Diagnostic::Kind::Undriven: return "undriven";
    case Diagnostic::Kind::BadArity: return "bad-arity";
    case Diagnostic::Kind::Cycle: return "cycle";
    case Diagnostic::Kind::UnknownOutput: return "unknown-output";
    case Diagnostic::Kind::DuplicatePort: return "duplicate-port";
  }
  return "?";
}

namespace {

struct DriverTable {
  // Driver per net name: -1 for a primary input, gate index otherwise.
  std::map<NetName, std::ptrdiff_t> driver;
};

// Finds a net lying on a cycle among `stuck` gates (those Kahn's algorithm
// could not schedule). Walks fanins until a net repeats.
NetName find_cycle_net(const Netlist& n, const std::map<NetName, std::ptrdiff_t>& driver,
                       const std::vector<bool>& stuck) {
  std::size_t start = 0;
  while (start < stuck.size() && !stuck[start]) ++start;
  if (start == stuck.size()) return {};
  std::map<std::size_t, std::size_t> seen;  // gate -> step
  std::size_t g = start;
  for (std::size_t step = 0;; ++step) {
    if (seen.count(g) != 0) return n.gates[g].output;
    seen[g] = step;
    bool moved = false;
    for (const auto& in : n.gates[g].inputs) {
      auto it = driver.find(in);
      if (it != driver.end() && it->second >= 0 &&
          stuck[static_cast<std::size_t>(it->second)]) {
        g = static_cast<std::size_t>(it->second);
        moved = true;
        break;
      }
    }
    if (!moved) return n.gates[g].output;
  }
}

// Stable Kahn's algorithm over the first driver of every net. Returns the
// scheduled gate indices; unscheduled gates are flagged in `stuck`.
std::vector<std::size_t> kahn(const Netlist& n,
                              const std::map<NetName, std::ptrdiff_t>& driver,
                              std::vector<bool>& stuck) {
  const std::size_t count = n.gates.size();
  std::vector<std::size_t> pending(count, 0);
  std::vector<std::vector<std::size_t>> readers(count);
  for (std::size_t i = 0; i < count; ++i) {
    for (const auto& in : n.gates[i].inputs) {
      auto it = driver.find(in);
      if (it != driver.end() && it->second >= 0) {
        ++pending[i];
        readers[static_cast<std::size_t>(it->second)].push_back(i);
      }
    }
  }
  std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
  for (std::size_t i = 0; i < count; ++i) {
    if (pending[i] == 0) ready.push(i);
  }
  std::vector<std::size_t> order;
  order.reserve(count);
  while (!ready.empty()) {
    std::size_t g = ready.top();
    ready.pop();
    order.push_back(g);
    for (std::size_t r : readers[g]) {
      if (--pending[r] == 0) ready.push(r);
    }
  }
  stuck.assign(count, true);
  for (std::size_t g : order) stuck[g] = false;
  return order;
}

}  // namespace

std::vector<Diagnostic> validate(const Netlist& n) {
  using K = Diagnostic::Kind;
  std::vector<Diagnostic> out;
  std::map<NetName, std::ptrdiff_t> driver;

  for (const auto& pi : n.inputs) {
    if (!is_valid_net_name(pi)) {
      out.push_back({K::InvalidName, pi, "invalid net name '" + pi + "'"});
    }
    if (!driver.emplace(pi, -1).second) {
      out.push_back({K::DuplicatePort, pi, "primary input '" + pi + "' listed twice"});
    }
  }
  for (std::size_t i = 0; i < n.gates.size(); ++i) {
    const Gate& g = n.gates[i];
    if (!is_valid_net_name(g.output)) {
      out.push_back({K::InvalidName, g.output, "invalid net name '" + g.output + "'"});
    }
    if (!arity_ok(g.kind, g.inputs.size())) {
      out.push_back({K::BadArity, g.output,
                     "gate '" + g.output + "' of kind " + std::string(to_string(g.kind)) +
                         " has " + std::to_string(g.inputs.size()) + " inputs"});
    }
    auto [it, fresh] = driver.emplace(g.output, static_cast<std::ptrdiff_t>(i));
    if (!fresh) {
      out.push_back({K::MultiDriver, g.output, "net '" + g.output + "' has more than one driver"});
    }
  }
  for (const Gate& g : n.gates) {
    for (const auto& in : g.inputs) {
      if (driver.count(in) == 0) {
        out.push_back({K::Undriven, in,
                       "net '" + in + "' read by gate '" + g.output + "' has no driver"});
      }
    }
  }
  std::set<NetName> seen_po;
  for (const auto& po : n.outputs) {
    if (driver.count(po) == 0) {
      out.push_back({K::UnknownOutput, po, "primary output '" + po + "' names no net"});
    }
    if (!seen_po.insert(po).second) {
      out.push_back({K::DuplicatePort, po, "primary output '" + po + "' listed twice"});
    }
  }

  std::vector<bool> stuck;
  kahn(n, driver, stuck);
  if (std::find(stuck.begin(), stuck.end(), true) != stuck.end()) {
    NetName net = find_cycle_net(n, driver, stuck);
    out.push_back({K::Cycle, net, "combinational cycle through net '" + net + "'"});
  }
  return out;
}

namespace {

[[noreturn]] void throw_diagnostics(const std::vector<Diagnostic>& diags) {
  std::string msg = diags.front().message;
  if (diags.size() > 1) msg += " (and " + std::to_string(diags.size() - 1) + " more)";
  throw StructuralError(msg);
}

}  // namespace

NetGraph::NetGraph(const Netlist& netlist) : netlist_(netlist) {
  auto diags = validate(netlist_);
  if (!diags.empty()) throw_diagnostics(diags);

  const std::size_t nets = netlist_.inputs.size() + netlist_.gates.size();
  names_.reserve(nets);
  for (const auto& pi : netlist_.inputs) names_.push_back(pi);
  for (const auto& g : netlist_.gates) names_.push_back(g.output);
  index_.reserve(nets);
  for (NetId i = 0; i < names_.size(); ++i) index_.emplace(names_[i], i);

  fanins_.resize(nets);
  loads_.resize(nets);
  for (std::size_t gi = 0; gi < netlist_.gates.size(); ++gi) {
    NetId out = static_cast<NetId>(netlist_.inputs.size() + gi);
    for (const auto& in : netlist_.gates[gi].inputs) {
      NetId src = index_.at(in);
      fanins_[out].push_back(src);
      loads_[src].push_back(out);
    }
  }
  po_slots_.assign(nets, 0);
  for (const auto& po : netlist_.outputs) {
    NetId id = index_.at(po);
    outputs_.push_back(id);
    ++po_slots_[id];
  }

  std::map<NetName, std::ptrdiff_t> driver;
  for (NetId i = 0; i < names_.size(); ++i) {
    driver.emplace(names_[i], is_input(i) ? -1 : static_cast<std::ptrdiff_t>(i - input_count()));
  }
  std::vector<bool> stuck;
  topo_ = kahn(netlist_, driver, stuck);
}

std::optional<NetId> NetGraph::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

NetId NetGraph::id(std::string_view name) const {
  auto found = find(name);
  if (!found) throw UnknownNet("unknown net '" + std::string(name) + "'");
  return *found;
}

std::ptrdiff_t NetGraph::driver(NetId net) const {
  if (is_input(net)) return -1;
  return static_cast<std::ptrdiff_t>(net - input_count());
}

std::span<const NetId> NetGraph::fanins(NetId net) const { return fanins_[net]; }

std::vector<bool> NetGraph::tfi_mask(NetId net) const {
  std::vector<bool> seen(net_count(), false);
  std::vector<NetId> stack(fanins_[net].begin(), fanins_[net].end());
  while (!stack.empty()) {
    NetId n = stack.back();
    stack.pop_back();
    if (seen[n]) continue;
    seen[n] = true;
    for (NetId f : fanins_[n]) {
      if (!seen[f]) stack.push_back(f);
    }
  }
  return seen;
}

std::vector<bool> NetGraph::tfo_mask(NetId net) const {
  std::vector<bool> seen(net_count(), false);
  std::vector<NetId> stack(loads_[net].begin(), loads_[net].end());
  while (!stack.empty()) {
    NetId n = stack.back();
    stack.pop_back();
    if (seen[n]) continue;
    seen[n] = true;
    for (NetId f : loads_[n]) {
      if (!seen[f]) stack.push_back(f);
    }
  }
  return seen;
}

namespace {
std::vector<NetId> mask_to_ids(const std::vector<bool>& mask) {
  std::vector<NetId> out;
  for (NetId i = 0; i < mask.size(); ++i) {
    if (mask[i]) out.push_back(i);
  }
  return out;
}
}  // namespace

std::vector<NetId> NetGraph::tfi(NetId net) const { return mask_to_ids(tfi_mask(net)); }
std::vector<NetId> NetGraph::tfo(NetId net) const { return mask_to_ids(tfo_mask(net)); }

std::vector<Gate> topo_order(const Netlist& netlist) {
  NetGraph graph(netlist);
  std::vector<Gate> out;
  out.reserve(netlist.gates.size());
  for (std::size_t g : graph.topo_gates()) out.push_back(netlist.gates[g]);
  return out;
}

std::set<NetName> tfi(const Netlist& netlist, std::string_view net) {
  NetGraph graph(netlist);
  std::set<NetName> out;
  for (NetId id : graph.tfi(graph.id(net))) out.insert(graph.name(id));
  return out;
}

std::set<NetName> tfo(const Netlist& netlist, std::string_view net) {
  NetGraph graph(netlist);
  std::set<NetName> out;
  for (NetId id : graph.tfo(graph.id(net))) out.insert(graph.name(id));
  return out;
}

std::size_t fanout_count(const Netlist& netlist, std::string_view net) {
  NetGraph graph(netlist);
  NetId id = graph.id(net);
  return graph.loads(id).size() + graph.output_slots(id);
}

NetlistStats stats(const Netlist& netlist) {
  NetlistStats s;
  s.inputs = netlist.inputs.size();
  s.outputs = netlist.outputs.size();
  s.gates = netlist.gates.size();
  for (const auto& g : netlist.gates) ++s.by_kind[g.kind];
  return s;
}

FreshNames::FreshNames(const Netlist& netlist) {
  for (const auto& pi : netlist.inputs) taken_.insert(pi);
  for (const auto& g : netlist.gates) taken_.insert(g.output);
}

NetName FreshNames::make(std::string_view base) {
  for (;;) {
    NetName candidate = std::string(base) + "_nl" + std::to_string(counter_++);
    if (taken_.insert(candidate).second) return candidate;
  }
}

}  // namespace obfus
