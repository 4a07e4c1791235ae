#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "obfus/error.hpp"
#include "obfus/sat.hpp"

namespace obfus {

SolverStats& SolverStats::operator+=(const SolverStats& o) {
  decisions += o.decisions;
  conflicts += o.conflicts;
  propagations += o.propagations;
  restarts += o.restarts;
  learnt_clauses += o.learnt_clauses;
  return *this;
}

std::string_view to_string(SatStatus s) {
  switch (s) {
    case SatStatus::Sat: return "sat";
    case SatStatus::Unsat: return "unsat";
    case SatStatus::Aborted: return "aborted";
  }
  return "?";
}

namespace {

// Internal literal: 2 * var + sign, var 0-based, sign 1 = negative.
using ILit = std::uint32_t;
constexpr std::uint32_t kNoReason = UINT32_MAX;
constexpr std::uint8_t kTrue = 0, kFalse = 1, kUndef = 2;

inline ILit to_ilit(Lit l) {
  return static_cast<ILit>(2 * (std::abs(l) - 1) + (l < 0 ? 1 : 0));
}
inline std::uint32_t var_of(ILit l) { return l >> 1; }
inline bool sign_of(ILit l) { return (l & 1) != 0; }
inline ILit neg(ILit l) { return l ^ 1; }

double luby(double y, int x) {
  int size = 1, seq = 0;
  while (size < x + 1) {
    ++seq;
    size = 2 * size + 1;
  }
  while (size - 1 != x) {
    size = (size - 1) >> 1;
    --seq;
    x = x % size;
  }
  return std::pow(y, seq);
}

}  // namespace

struct Solver::Impl {
  struct Clause {
    std::vector<ILit> lits;
    double activity = 0;
    bool learnt = false;
    bool deleted = false;
  };
  struct Watcher {
    std::uint32_t cref;
    ILit blocker;
  };

  std::vector<Clause> clauses;
  std::vector<std::vector<Watcher>> watches;  // by literal
  std::vector<std::uint8_t> assigns;          // by var: kTrue/kFalse/kUndef
  std::vector<int> level;
  std::vector<std::uint32_t> reason;
  std::vector<std::uint8_t> polarity;  // saved phase, 1 = negative
  std::vector<double> activity;
  std::vector<std::uint8_t> seen;
  std::vector<ILit> trail;
  std::vector<std::size_t> trail_lim;
  std::size_t qhead = 0;
  bool ok = true;

  // Binary max-heap over variable activity.
  std::vector<std::uint32_t> heap;
  std::vector<int> heap_pos;  // -1 when absent

  double var_inc = 1.0;
  double cla_inc = 1.0;
  std::size_t learnt_count = 0;
  double max_learnts = 0;
  std::vector<std::uint8_t> model;  // by var
  SolverStats stats;

  int nvars() const { return static_cast<int>(assigns.size()); }

  std::uint8_t value(ILit l) const {
    std::uint8_t a = assigns[var_of(l)];
    return a == kUndef ? kUndef : static_cast<std::uint8_t>(a ^ (l & 1));
  }
  int decision_level() const { return static_cast<int>(trail_lim.size()); }

  // --- heap ---
  bool heap_less(std::uint32_t a, std::uint32_t b) const { return activity[a] > activity[b]; }
  void heap_up(std::size_t i) {
    std::uint32_t v = heap[i];
    while (i > 0) {
      std::size_t p = (i - 1) / 2;
      if (!heap_less(v, heap[p])) break;
      heap[i] = heap[p];
      heap_pos[heap[i]] = static_cast<int>(i);
      i = p;
    }
    heap[i] = v;
    heap_pos[v] = static_cast<int>(i);
  }
  void heap_down(std::size_t i) {
    std::uint32_t v = heap[i];
    for (;;) {
      std::size_t c = 2 * i + 1;
      if (c >= heap.size()) break;
      if (c + 1 < heap.size() && heap_less(heap[c + 1], heap[c])) ++c;
      if (!heap_less(heap[c], v)) break;
      heap[i] = heap[c];
      heap_pos[heap[i]] = static_cast<int>(i);
      i = c;
    }
    heap[i] = v;
    heap_pos[v] = static_cast<int>(i);
  }
  void heap_insert(std::uint32_t v) {
    if (heap_pos[v] >= 0) return;
    heap.push_back(v);
    heap_up(heap.size() - 1);
  }
  std::uint32_t heap_pop() {
    std::uint32_t top = heap[0];
    heap_pos[top] = -1;
    std::uint32_t last = heap.back();
    heap.pop_back();
    if (!heap.empty()) {
      heap[0] = last;
      heap_pos[last] = 0;
      heap_down(0);
    }
    return top;
  }

  void bump_var(std::uint32_t v) {
    if ((activity[v] += var_inc) > 1e100) {
      for (auto& a : activity) a *= 1e-100;
      var_inc *= 1e-100;
    }
    if (heap_pos[v] >= 0) heap_up(static_cast<std::size_t>(heap_pos[v]));
  }
  void bump_clause(Clause& c) {
    if ((c.activity += cla_inc) > 1e20) {
      for (auto& cl : clauses) {
        if (cl.learnt) cl.activity *= 1e-20;
      }
      cla_inc *= 1e-20;
    }
  }

  int new_var() {
    auto v = static_cast<std::uint32_t>(assigns.size());
    assigns.push_back(kUndef);
    level.push_back(0);
    reason.push_back(kNoReason);
    polarity.push_back(1);
    activity.push_back(0);
    seen.push_back(0);
    model.push_back(kUndef);
    heap_pos.push_back(-1);
    watches.emplace_back();
    watches.emplace_back();
    heap_insert(v);
    return static_cast<int>(v) + 1;
  }

  void enqueue(ILit l, std::uint32_t from) {
    std::uint32_t v = var_of(l);
    assigns[v] = sign_of(l) ? kFalse : kTrue;
    level[v] = decision_level();
    reason[v] = from;
    trail.push_back(l);
  }

  void attach(std::uint32_t cref) {
    const auto& c = clauses[cref].lits;
    watches[neg(c[0])].push_back({cref, c[1]});
    watches[neg(c[1])].push_back({cref, c[0]});
  }

  void backtrack(int lvl) {
    if (decision_level() <= lvl) return;
    for (std::size_t i = trail.size(); i > trail_lim[static_cast<std::size_t>(lvl)]; --i) {
      std::uint32_t v = var_of(trail[i - 1]);
      assigns[v] = kUndef;
      reason[v] = kNoReason;
      polarity[v] = sign_of(trail[i - 1]) ? 1 : 0;
      heap_insert(v);
    }
    trail.resize(trail_lim[static_cast<std::size_t>(lvl)]);
    trail_lim.resize(static_cast<std::size_t>(lvl));
    qhead = trail.size();
  }

  std::uint32_t propagate() {
    std::uint32_t conflict = kNoReason;
    while (qhead < trail.size()) {
      ILit p = trail[qhead++];
      ILit false_lit = neg(p);
      auto& ws = watches[p];
      ++stats.propagations;
      std::size_t i = 0, j = 0;
      const std::size_t end = ws.size();
      while (i < end) {
        Watcher w = ws[i];
        if (value(w.blocker) == kTrue) {
          ws[j++] = ws[i++];
          continue;
        }
        Clause& cl = clauses[w.cref];
        if (cl.deleted) {
          ++i;
          continue;
        }
        auto& c = cl.lits;
        if (c[0] == false_lit) std::swap(c[0], c[1]);
        ++i;
        ILit first = c[0];
        Watcher nw{w.cref, first};
        if (first != w.blocker && value(first) == kTrue) {
          ws[j++] = nw;
          continue;
        }
        bool moved = false;
        for (std::size_t k = 2; k < c.size(); ++k) {
          if (value(c[k]) != kFalse) {
            std::swap(c[1], c[k]);
            watches[neg(c[1])].push_back(nw);
            moved = true;
            break;
          }
        }
        if (moved) continue;
        ws[j++] = nw;
        if (value(first) == kFalse) {
          conflict = w.cref;
          qhead = trail.size();
          while (i < end) ws[j++] = ws[i++];
        } else {
          enqueue(first, w.cref);
        }
      }
      ws.resize(j);
      if (conflict != kNoReason) break;
    }
    return conflict;
  }

  // Drops a literal whose reason clause is fully covered by the clause.
  bool redundant(ILit l) const {
    std::uint32_t r = reason[var_of(l)];
    if (r == kNoReason) return false;
    for (ILit q : clauses[r].lits) {
      std::uint32_t v = var_of(q);
      if (v == var_of(l)) continue;
      if (!seen[v] && level[v] > 0) return false;
    }
    return true;
  }

  void analyze(std::uint32_t confl, std::vector<ILit>& learnt, int& bt_level) {
    learnt.assign(1, 0);
    int pending = 0;
    ILit p = 0;
    bool have_p = false;
    std::size_t index = trail.size();
    do {
      Clause& c = clauses[confl];
      if (c.learnt) bump_clause(c);
      for (ILit q : c.lits) {
        if (have_p && q == p) continue;
        std::uint32_t v = var_of(q);
        if (!seen[v] && level[v] > 0) {
          bump_var(v);
          seen[v] = 1;
          if (level[v] >= decision_level()) {
            ++pending;
          } else {
            learnt.push_back(q);
          }
        }
      }
      while (!seen[var_of(trail[--index])]) {
      }
      p = trail[index];
      have_p = true;
      confl = reason[var_of(p)];
      seen[var_of(p)] = 0;
      --pending;
    } while (pending > 0);
    learnt[0] = neg(p);

    std::vector<ILit> all(learnt.begin() + 1, learnt.end());
    std::size_t j = 1;
    for (std::size_t i = 1; i < learnt.size(); ++i) {
      if (!redundant(learnt[i])) learnt[j++] = learnt[i];
    }
    learnt.resize(j);
    for (ILit q : all) seen[var_of(q)] = 0;

    bt_level = 0;
    if (learnt.size() > 1) {
      std::size_t max_i = 1;
      for (std::size_t i = 2; i < learnt.size(); ++i) {
        if (level[var_of(learnt[i])] > level[var_of(learnt[max_i])]) max_i = i;
      }
      std::swap(learnt[1], learnt[max_i]);
      bt_level = level[var_of(learnt[1])];
    }
  }

  bool locked(std::uint32_t cref) const {
    const auto& c = clauses[cref].lits;
    std::uint32_t v = var_of(c[0]);
    return reason[v] == cref && value(c[0]) == kTrue;
  }

  void reduce_db() {
    std::vector<std::uint32_t> learnts;
    for (std::uint32_t i = 0; i < clauses.size(); ++i) {
      if (clauses[i].learnt && !clauses[i].deleted) learnts.push_back(i);
    }
    std::sort(learnts.begin(), learnts.end(), [&](std::uint32_t a, std::uint32_t b) {
      const auto& ca = clauses[a];
      const auto& cb = clauses[b];
      if ((ca.lits.size() > 2) != (cb.lits.size() > 2)) return ca.lits.size() > 2;
      if (ca.activity != cb.activity) return ca.activity < cb.activity;
      return a < b;
    });
    const double extra_lim = cla_inc / static_cast<double>(std::max<std::size_t>(learnts.size(), 1));
    for (std::size_t i = 0; i < learnts.size(); ++i) {
      Clause& c = clauses[learnts[i]];
      if (c.lits.size() <= 2 || locked(learnts[i])) continue;
      if (i < learnts.size() / 2 || c.activity < extra_lim) {
        c.deleted = true;
        c.lits.clear();
        c.lits.shrink_to_fit();
        --learnt_count;
      }
    }
    for (auto& ws : watches) {
      ws.erase(std::remove_if(ws.begin(), ws.end(),
                              [&](const Watcher& w) { return clauses[w.cref].deleted; }),
               ws.end());
    }
  }

  bool add_clause(std::span<const Lit> input) {
    if (!ok) return false;
    backtrack(0);
    std::vector<ILit> c;
    c.reserve(input.size());
    for (Lit l : input) {
      if (l == 0) throw std::invalid_argument("literal 0 in clause");
      while (std::abs(l) > nvars()) new_var();
      c.push_back(to_ilit(l));
    }
    std::sort(c.begin(), c.end());
    std::size_t j = 0;
    for (std::size_t i = 0; i < c.size(); ++i) {
      ILit l = c[i];
      if (value(l) == kTrue) return true;
      if (j > 0 && l == neg(c[j - 1])) return true;  // tautology
      if (value(l) == kFalse) continue;
      if (j > 0 && l == c[j - 1]) continue;
      c[j++] = l;
    }
    c.resize(j);
    if (c.empty()) {
      ok = false;
      return false;
    }
    if (c.size() == 1) {
      enqueue(c[0], kNoReason);
      if (propagate() != kNoReason) ok = false;
      return ok;
    }
    clauses.push_back({std::move(c), 0, false, false});
    attach(static_cast<std::uint32_t>(clauses.size() - 1));
    return true;
  }

  ILit pick_branch() {
    while (!heap.empty()) {
      std::uint32_t v = heap_pop();
      if (assigns[v] == kUndef) return 2 * v + polarity[v];
    }
    return UINT32_MAX;
  }

  bool out_of_budget(const SolveLimits& limits, std::uint64_t start_conflicts) const {
    if (limits.abort && limits.abort->load(std::memory_order_relaxed)) return true;
    if (limits.conflict_limit && stats.conflicts - start_conflicts >= limits.conflict_limit) {
      return true;
    }
    return limits.deadline && std::chrono::steady_clock::now() >= *limits.deadline;
  }

  // kTrue = sat, kFalse = unsat, kUndef = restart or budget.
  std::uint8_t search(std::uint64_t budget, const std::vector<ILit>& assumptions,
                      const SolveLimits& limits, std::uint64_t start_conflicts, bool& aborted) {
    std::uint64_t local = 0;
    std::vector<ILit> learnt;
    for (;;) {
      std::uint32_t confl = propagate();
      if (confl != kNoReason) {
        ++stats.conflicts;
        ++local;
        if (decision_level() == 0) {
          ok = false;
          return kFalse;
        }
        int bt;
        analyze(confl, learnt, bt);
        backtrack(bt);
        if (learnt.size() == 1) {
          enqueue(learnt[0], kNoReason);
        } else {
          clauses.push_back({learnt, 0, true, false});
          auto cref = static_cast<std::uint32_t>(clauses.size() - 1);
          attach(cref);
          bump_clause(clauses[cref]);
          enqueue(learnt[0], cref);
          ++learnt_count;
          ++stats.learnt_clauses;
        }
        var_inc *= 1 / 0.95;
        cla_inc *= 1 / 0.999;
        if ((stats.conflicts & 255) == 0 && out_of_budget(limits, start_conflicts)) {
          aborted = true;
          return kUndef;
        }
        continue;
      }
      if (local >= budget) return kUndef;
      if (static_cast<double>(learnt_count) >= max_learnts + static_cast<double>(trail.size())) {
        reduce_db();
        max_learnts *= 1.1;
      }
      ILit next = UINT32_MAX;
      while (static_cast<std::size_t>(decision_level()) < assumptions.size()) {
        ILit a = assumptions[static_cast<std::size_t>(decision_level())];
        if (value(a) == kTrue) {
          trail_lim.push_back(trail.size());
        } else if (value(a) == kFalse) {
          return kFalse;
        } else {
          next = a;
          break;
        }
      }
      if (next == UINT32_MAX) {
        ++stats.decisions;
        if ((stats.decisions & 1023) == 0 && out_of_budget(limits, start_conflicts)) {
          aborted = true;
          return kUndef;
        }
        next = pick_branch();
        if (next == UINT32_MAX) return kTrue;
      }
      trail_lim.push_back(trail.size());
      enqueue(next, kNoReason);
    }
  }

  SatStatus solve(std::span<const Lit> assumptions_in, const SolveLimits& limits) {
    model.assign(assigns.size(), kUndef);
    if (!ok) return SatStatus::Unsat;
    backtrack(0);
    std::vector<ILit> assumptions;
    for (Lit l : assumptions_in) {
      if (l == 0 || std::abs(l) > nvars()) {
        throw std::invalid_argument("assumption " + std::to_string(l) + " out of range");
      }
      assumptions.push_back(to_ilit(l));
    }
    std::size_t original = 0;
    for (const auto& c : clauses) original += c.learnt ? 0 : 1;
    max_learnts = std::max(static_cast<double>(original) / 3.0, 2000.0);

    const std::uint64_t start_conflicts = stats.conflicts;
    std::uint8_t status = kUndef;
    bool aborted = false;
    for (int restart = 0; status == kUndef && !aborted; ++restart) {
      const auto budget = static_cast<std::uint64_t>(luby(2.0, restart) * 100);
      status = search(budget, assumptions, limits, start_conflicts, aborted);
      if (status == kUndef) {
        ++stats.restarts;
        backtrack(0);
        if (!aborted && out_of_budget(limits, start_conflicts)) aborted = true;
      }
    }
    if (status == kTrue) {
      for (std::size_t v = 0; v < assigns.size(); ++v) model[v] = assigns[v];
    }
    backtrack(0);
    if (status == kTrue) return SatStatus::Sat;
    if (status == kFalse) return SatStatus::Unsat;
    return SatStatus::Aborted;
  }
};

Solver::Solver() : impl_(std::make_unique<Impl>()) {}
Solver::~Solver() = default;

int Solver::new_var() { return impl_->new_var(); }
void Solver::reserve_vars(int n) {
  while (impl_->nvars() < n) impl_->new_var();
}
int Solver::var_count() const { return impl_->nvars(); }

bool Solver::add_clause(std::span<const Lit> lits) { return impl_->add_clause(lits); }

void Solver::add_formula(const CnfFormula& cnf, std::size_t first) {
  reserve_vars(cnf.var_count);
  for (std::size_t i = first; i < cnf.clauses.size(); ++i) impl_->add_clause(cnf.clauses[i]);
}

SatStatus Solver::solve(std::span<const Lit> assumptions, const SolveLimits& limits) {
  return impl_->solve(assumptions, limits);
}

bool Solver::model_value(int var) const {
  return impl_->model.at(static_cast<std::size_t>(var - 1)) == kTrue;
}

std::vector<bool> Solver::model() const {
  std::vector<bool> m(impl_->model.size() + 1, false);
  for (std::size_t v = 0; v < impl_->model.size(); ++v) m[v + 1] = impl_->model[v] == kTrue;
  return m;
}

const SolverStats& Solver::stats() const { return impl_->stats; }

SatOutcome solve(const CnfFormula& cnf, std::span<const Lit> assumptions, const SolveLimits& limits) {
  Solver s;
  s.reserve_vars(cnf.var_count);
  s.add_formula(cnf);
  SatOutcome out;
  out.status = s.solve(assumptions, limits);
  out.stats = s.stats();
  if (out.status == SatStatus::Sat) {
    out.model = s.model();
    out.model.resize(static_cast<std::size_t>(cnf.var_count) + 1);
    if (!cnf.satisfied_by(out.model)) throw SolverError("solver returned a model that violates a clause");
    for (Lit a : assumptions) {
      if (out.model[static_cast<std::size_t>(std::abs(a))] != (a > 0)) {
        throw SolverError("solver returned a model that violates an assumption");
      }
    }
  }
  return out;
}

SatOutcome InternalBackend::solve(const CnfFormula& cnf, std::span<const Lit> assumptions,
                                  const SolveLimits& limits) {
  return obfus::solve(cnf, assumptions, limits);
}

std::shared_ptr<SatBackend> make_internal_backend() { return std::make_shared<InternalBackend>(); }

}  // namespace obfus
