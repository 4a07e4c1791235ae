#include "obfus/locking.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "obfus/error.hpp"
#include "obfus/rng.hpp"

namespace obfus {

std::string_view to_string(KeyGatePolicy p) {
  switch (p) {
    case KeyGatePolicy::XorOnly: return "xor_only";
    case KeyGatePolicy::MuxOnly: return "mux_only";
    case KeyGatePolicy::Mixed: return "mixed";
  }
  return "?";
}

std::string_view to_string(Selection s) {
  switch (s) {
    case Selection::Random: return "random";
    case Selection::ConeSize: return "cone_size";
    case Selection::Scoap: return "scoap";
    case Selection::Sll: return "sll";
    case Selection::FanHeavy: return "fan_heavy";
  }
  return "?";
}

std::string_view to_string(DummyPolicy d) {
  switch (d) {
    case DummyPolicy::Constant: return "constant";
    case DummyPolicy::PrimaryInput: return "primary_input";
    case DummyPolicy::OtherConeNet: return "other_cone_net";
    case DummyPolicy::RandomFunction: return "random_function";
  }
  return "?";
}

std::string_view to_string(Preset p) {
  switch (p) {
    case Preset::SatHard: return "sat_hard";
  }
  return "?";
}

void LockConfig::validate() const {
  if (key_size == 0 && !allow_empty_key) throw ConfigError("key size must be at least 1");
  if (!(xor_fraction >= 0.0 && xor_fraction <= 1.0)) {
    throw ConfigError("xor fraction must lie in [0, 1]");
  }
  if (key_prefix.empty() || !is_valid_net_name(key_prefix)) {
    throw ConfigError("invalid key prefix '" + key_prefix + "'");
  }
}

LockConfig LockConfig::resolved() const {
  LockConfig c = *this;
  if (preset == Preset::SatHard) {
    c.keygate = KeyGatePolicy::Mixed;
    c.xor_fraction = 0.5;
    c.selection = Selection::FanHeavy;
    c.dummy = DummyPolicy::OtherConeNet;
  }
  return c;
}

namespace {

class LockBuilder {
 public:
  LockBuilder(const Netlist& base, std::string_view prefix, std::uint64_t dummy_seed)
      : prefix_(prefix), fresh_(base), rng_(Rng::stream(dummy_seed, rng_stream::kDummy)) {
    out_.netlist = base;
    for (const auto& pi : base.inputs) {
      if (pi.rfind(prefix_, 0) != 0) base_pis_.push_back(pi);
    }
    base_nets_ = eligible_nets(base, prefix_);
  }

  void xor_gate(std::size_t index, const NetName& target, bool bit) {
    NetName key = add_key_input(index);
    auto [original, keyed] = split(target);
    GateKind kind = bit ? GateKind::Xnor : GateKind::Xor;
    out_.netlist.gates.push_back({keyed, kind, {original, key}});
    LockRecord rec;
    rec.key_index = index;
    rec.target = keyed;
    rec.original = original;
    rec.gate = kind;
    record(std::move(rec), bit);
  }

  void mux_gate(std::size_t index, const NetName& target, bool bit, DummyPolicy policy) {
    NetName key = add_key_input(index);
    LockRecord rec;
    rec.key_index = index;
    rec.gate = GateKind::Mux;
    rec.dummy = policy;
    // Cone candidates are judged before the split; the original function
    // keeps the target's cones. Dummy gates are added after it so a
    // primary-input target's rewiring cannot reach them.
    std::vector<NetName> cands;
    if (policy == DummyPolicy::OtherConeNet || policy == DummyPolicy::RandomFunction) {
      cands = other_cone_candidates(target, true);
    }
    // A random function may fall back to fan-in nets; only fan-out nets
    // would close a loop.
    if (policy == DummyPolicy::RandomFunction && cands.size() < 2) {
      cands = other_cone_candidates(target, false);
    }
    auto [original, keyed] = split(target);
    NetName dummy = make_dummy(target, policy, rec, cands);
    std::vector<NetName> ins = bit ? std::vector<NetName>{key, dummy, original}
                                   : std::vector<NetName>{key, original, dummy};
    out_.netlist.gates.push_back({keyed, GateKind::Mux, std::move(ins)});
    rec.target = keyed;
    rec.original = original;
    rec.original_slot = bit ? 1 : 0;
    record(std::move(rec), bit);
  }

  LockedNetlist finish() { return std::move(out_); }

 private:
  NetName add_key_input(std::size_t index) {
    NetName name = prefix_ + std::to_string(index);
    if (fresh_.taken(name)) {
      throw LockError("key input name '" + name + "' collides with an existing net");
    }
    fresh_.reserve(name);
    out_.netlist.inputs.push_back(name);
    out_.key_inputs.push_back(name);
    return name;
  }

  // Returns {net carrying the original function, net the key gate drives}.
  std::pair<NetName, NetName> split(const NetName& target) {
    Netlist& n = out_.netlist;
    auto driver = std::find_if(n.gates.begin(), n.gates.end(),
                               [&](const Gate& g) { return g.output == target; });
    if (driver != n.gates.end()) {
      NetName renamed = fresh_.make(target);
      driver->output = renamed;
      return {renamed, target};
    }
    if (std::find(n.inputs.begin(), n.inputs.end(), target) == n.inputs.end()) {
      throw UnknownNet("cannot lock unknown net '" + target + "'");
    }
    NetName keyed = fresh_.make(target);
    for (auto& g : n.gates) {
      for (auto& in : g.inputs) {
        if (in == target) in = keyed;
      }
    }
    return {target, keyed};
  }

  void record(LockRecord rec, bool bit) {
    out_.correct_key.bits.push_back(bit);
    out_.ledger.push_back(std::move(rec));
    // A cycle here is a bug in candidate filtering, not a user error.
    for (const auto& d : validate(out_.netlist)) {
      throw std::logic_error("key-gate insertion broke netlist invariants: " + d.message);
    }
  }

  std::vector<NetName> other_cone_candidates(const NetName& target, bool exclude_fanin) {
    NetGraph graph(out_.netlist);
    NetId t = graph.id(target);
    auto in = graph.tfi_mask(t);
    auto out = graph.tfo_mask(t);
    std::vector<NetName> cands;
    for (const auto& name : base_nets_) {
      auto id = graph.find(name);
      if (!id || *id == t || (exclude_fanin && in[*id]) || out[*id]) continue;
      cands.push_back(name);
    }
    return cands;
  }

  NetName make_dummy(const NetName& target, DummyPolicy policy, LockRecord& rec,
                     const std::vector<NetName>& cands) {
    switch (policy) {
      case DummyPolicy::Constant: {
        if (base_pis_.empty()) throw DummyError("no primary input to build a constant for '" + target + "'");
        const NetName& x = base_pis_[rng_.below(base_pis_.size())];
        bool value = rng_.bit();
        NetName c = fresh_.make(target);
        out_.netlist.gates.push_back({c, value ? GateKind::Xnor : GateKind::Xor, {x, x}});
        rec.constant = value;
        rec.dummy_sources = {c};
        return c;
      }
      case DummyPolicy::PrimaryInput: {
        std::vector<NetName> pis;
        for (const auto& p : base_pis_) {
          if (p != target) pis.push_back(p);
        }
        if (pis.empty()) throw DummyError("no primary input other than '" + target + "' to use as dummy");
        NetName d = pis[rng_.below(pis.size())];
        rec.dummy_sources = {d};
        return d;
      }
      case DummyPolicy::OtherConeNet: {
        if (cands.empty()) throw DummyError("no net outside the cones of '" + target + "'");
        NetName d = cands[rng_.below(cands.size())];
        rec.dummy_sources = {d};
        return d;
      }
      case DummyPolicy::RandomFunction: {
        if (cands.size() < 2) {
          throw DummyError("fewer than two nets outside the fan-out cone of '" + target +
                           "' for a random function");
        }
        std::size_t width = std::min<std::size_t>(2 + rng_.below(2), cands.size());
        auto leaves = rng_.sample(cands, width);
        static constexpr GateKind kKinds[] = {GateKind::And, GateKind::Or,  GateKind::Nand,
                                              GateKind::Nor, GateKind::Xor, GateKind::Xnor};
        auto pick = [&] { return kKinds[rng_.below(std::size(kKinds))]; };
        NetName first = fresh_.make(target);
        out_.netlist.gates.push_back({first, pick(), {leaves[0], leaves[1]}});
        rec.dummy_sources = {first};
        NetName root = first;
        if (width == 3) {
          root = fresh_.make(target);
          out_.netlist.gates.push_back({root, pick(), {first, leaves[2]}});
          rec.dummy_sources.insert(rec.dummy_sources.begin(), root);
        }
        rec.dummy_sources.insert(rec.dummy_sources.end(), leaves.begin(), leaves.end());
        return root;
      }
    }
    throw std::logic_error("unhandled dummy policy");
  }

  std::string prefix_;
  FreshNames fresh_;
  Rng rng_;
  std::vector<NetName> base_pis_;
  std::vector<NetName> base_nets_;
  LockedNetlist out_;
};

void check_targets(const Netlist& netlist, const std::vector<NetName>& nets, const Key& key) {
  if (nets.size() != key.size()) {
    throw LockError(std::to_string(nets.size()) + " target nets but " +
                    std::to_string(key.size()) + " key bits");
  }
  std::set<NetName> seen;
  for (const auto& n : nets) {
    if (!seen.insert(n).second) throw LockError("net '" + n + "' targeted twice");
  }
  NetGraph graph(netlist);
  for (const auto& n : nets) graph.id(n);
}

LockedNetlist insert(const Netlist& netlist, const std::vector<NetName>& nets, const Key& key,
                     const std::vector<bool>& use_mux, DummyPolicy dummy, std::uint64_t seed,
                     std::string_view prefix) {
  check_targets(netlist, nets, key);
  LockBuilder b(netlist, prefix, seed);
  for (std::size_t i = 0; i < nets.size(); ++i) {
    if (use_mux[i]) {
      b.mux_gate(i, nets[i], key.bits[i] != 0, dummy);
    } else {
      b.xor_gate(i, nets[i], key.bits[i] != 0);
    }
  }
  return b.finish();
}

}  // namespace

LockedNetlist insert_xor_keygates(const Netlist& netlist, const std::vector<NetName>& nets,
                                  const Key& key_bits, std::string_view key_prefix) {
  return insert(netlist, nets, key_bits, std::vector<bool>(nets.size(), false),
                DummyPolicy::Constant, 0, key_prefix);
}

LockedNetlist insert_mux_keygates(const Netlist& netlist, const std::vector<NetName>& nets,
                                  const Key& key_bits, DummyPolicy dummy, std::uint64_t seed,
                                  std::string_view key_prefix) {
  return insert(netlist, nets, key_bits, std::vector<bool>(nets.size(), true), dummy, seed,
                key_prefix);
}

LockedNetlist lock(const Netlist& netlist, const LockConfig& config) {
  const LockConfig cfg = config.resolved();
  cfg.validate();
  NetGraph graph(netlist);  // validates the input

  const std::size_t k = cfg.key_size;
  Key key = generate_key(k, cfg.seed);
  std::vector<NetName> nets = select_nets(netlist, cfg.selection, k, cfg.seed, cfg.key_prefix);

  std::vector<bool> use_mux(k, cfg.keygate == KeyGatePolicy::MuxOnly);
  if (cfg.keygate == KeyGatePolicy::Mixed) {
    const auto xor_count =
        static_cast<std::size_t>(std::llround(cfg.xor_fraction * static_cast<double>(k)));
    std::vector<std::size_t> order(k);
    for (std::size_t i = 0; i < k; ++i) order[i] = i;
    Rng rng = Rng::stream(cfg.seed, rng_stream::kSplit);
    rng.shuffle(order);
    for (std::size_t i = xor_count; i < k; ++i) use_mux[order[i]] = true;
  }
  return insert(netlist, nets, key, use_mux, cfg.dummy, cfg.seed, cfg.key_prefix);
}

}  // namespace obfus
