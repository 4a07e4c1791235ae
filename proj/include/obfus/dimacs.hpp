#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "obfus/cnf.hpp"

namespace obfus {

/// `c` lines for each comment, then `p cnf V C`, then one clause per line
/// terminated by 0.
std::string emit_dimacs(const CnfFormula& cnf, const std::vector<std::string>& comments = {});

/// Accepts comments, clauses spanning lines and a trailing `%` marker.
/// Throws ParseError on a malformed header, a literal out of range, or a
/// clause count that disagrees with the header.
CnfFormula parse_dimacs(std::string_view text);

struct DimacsModel {
  enum class Status { Sat, Unsat, Unknown };
  Status status = Status::Unknown;
  std::map<int, bool> values;
};

/// Competition output (`s SATISFIABLE`, `v 1 -2 0`) or MiniSat result
/// files (`SAT` followed by a bare literal line). Throws ParseError.
DimacsModel parse_dimacs_model(std::string_view text);

}  // namespace obfus
