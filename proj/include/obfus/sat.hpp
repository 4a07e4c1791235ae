#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "obfus/cnf.hpp"

namespace obfus {

struct SolverStats {
  std::uint64_t decisions = 0;
  std::uint64_t conflicts = 0;
  std::uint64_t propagations = 0;
  std::uint64_t restarts = 0;
  std::uint64_t learnt_clauses = 0;

  SolverStats& operator+=(const SolverStats& o);
};

struct SolveLimits {
  std::optional<std::chrono::steady_clock::time_point> deadline;
  /// 0 = unlimited.
  std::uint64_t conflict_limit = 0;
  const std::atomic<bool>* abort = nullptr;
};

enum class SatStatus { Sat, Unsat, Aborted };
std::string_view to_string(SatStatus s);

/// Incremental CDCL solver: two-watched-literal propagation, first-UIP
/// learning with local minimisation, VSIDS, phase saving, Luby restarts,
/// activity-based learnt clause deletion, assumptions.
class Solver {
 public:
  Solver();
  ~Solver();
  Solver(const Solver&) = delete;
  Solver& operator=(const Solver&) = delete;

  int new_var();
  /// Grows the variable set to at least `n`.
  void reserve_vars(int n);
  int var_count() const;

  /// Returns false once the clause set is unsatisfiable at level 0.
  bool add_clause(std::span<const Lit> lits);
  bool add_clause(std::initializer_list<Lit> lits) {
    return add_clause(std::span<const Lit>(lits.begin(), lits.size()));
  }
  /// Adds clauses [first, end) of `cnf` and grows variables to match.
  void add_formula(const CnfFormula& cnf, std::size_t first = 0);

  SatStatus solve(std::span<const Lit> assumptions = {}, const SolveLimits& limits = {});

  /// Valid after Sat; variables are 1-based.
  bool model_value(int var) const;
  /// model()[v] for v in 1..var_count; index 0 unused.
  std::vector<bool> model() const;

  const SolverStats& stats() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct SatOutcome {
  SatStatus status = SatStatus::Unsat;
  /// Total over 1..var_count when sat; index 0 unused.
  std::vector<bool> model;
  SolverStats stats;
};

/// One-shot solve with the built-in solver. A sat model is checked against
/// every clause; a failing check throws SolverError.
SatOutcome solve(const CnfFormula& cnf, std::span<const Lit> assumptions = {},
                 const SolveLimits& limits = {});

/// Solver selection for non-incremental callers.
class SatBackend {
 public:
  virtual ~SatBackend() = default;
  virtual std::string name() const = 0;
  virtual SatOutcome solve(const CnfFormula& cnf, std::span<const Lit> assumptions,
                           const SolveLimits& limits) = 0;
};

class InternalBackend final : public SatBackend {
 public:
  std::string name() const override { return "internal-cdcl"; }
  SatOutcome solve(const CnfFormula& cnf, std::span<const Lit> assumptions,
                   const SolveLimits& limits) override;
};

/// Runs a DIMACS solver as a subprocess. `{cnf}` and `{model}` in argv are
/// replaced by temporary file paths; the model is read from `{model}` when
/// that placeholder appears, otherwise from standard output. Assumptions
/// are passed as unit clauses.
struct ExternalSolverConfig {
  std::vector<std::string> argv;
  int sat_exit_code = 10;
  int unsat_exit_code = 20;
};

class ExternalBackend final : public SatBackend {
 public:
  explicit ExternalBackend(ExternalSolverConfig config);
  std::string name() const override;
  SatOutcome solve(const CnfFormula& cnf, std::span<const Lit> assumptions,
                   const SolveLimits& limits) override;

 private:
  ExternalSolverConfig config_;
};

std::shared_ptr<SatBackend> make_internal_backend();

}  // namespace obfus
