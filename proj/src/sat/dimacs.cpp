#include "obfus/dimacs.hpp"

#include <charconv>
#include <cstdlib>

#include "obfus/error.hpp"

namespace obfus {

std::string emit_dimacs(const CnfFormula& cnf, const std::vector<std::string>& comments) {
  std::string out;
  for (const auto& c : comments) out += "c " + c + "\n";
  out += "p cnf " + std::to_string(cnf.var_count) + " " + std::to_string(cnf.clauses.size()) + "\n";
  for (const auto& clause : cnf.clauses) {
    for (Lit l : clause) {
      out += std::to_string(l);
      out += ' ';
    }
    out += "0\n";
  }
  return out;
}

namespace {

struct Lines {
  std::string_view text;
  std::size_t pos = 0;
  std::size_t number = 0;

  bool next(std::string_view& line) {
    if (pos >= text.size()) return false;
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    line = text.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos = end + 1;
    ++number;
    return true;
  }
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

// Splits on blanks; each token is parsed as an integer.
std::vector<long long> integers(std::string_view s, std::size_t line) {
  std::vector<long long> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    if (i >= s.size()) break;
    std::size_t start = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t') ++i;
    long long v = 0;
    auto tok = s.substr(start, i - start);
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || p != tok.data() + tok.size()) {
      throw ParseError("expected an integer, found '" + std::string(tok) + "'", line, start + 1);
    }
    out.push_back(v);
  }
  return out;
}

}  // namespace

CnfFormula parse_dimacs(std::string_view text) {
  Lines lines{text};
  std::string_view line;
  CnfFormula cnf;
  bool header = false;
  long long declared = 0;
  std::vector<Lit> clause;
  while (lines.next(line)) {
    line = trim(line);
    if (line.empty() || line.front() == 'c') continue;
    if (line.front() == '%') break;
    if (line.front() == 'p') {
      if (header) throw ParseError("duplicate problem line", lines.number);
      auto rest = trim(line.substr(1));
      if (rest.substr(0, 3) != "cnf") throw ParseError("expected 'p cnf <vars> <clauses>'", lines.number);
      auto nums = integers(rest.substr(3), lines.number);
      if (nums.size() != 2 || nums[0] < 0 || nums[1] < 0) {
        throw ParseError("expected 'p cnf <vars> <clauses>'", lines.number);
      }
      cnf.var_count = static_cast<int>(nums[0]);
      declared = nums[1];
      header = true;
      continue;
    }
    if (!header) throw ParseError("clause before the problem line", lines.number);
    for (long long v : integers(line, lines.number)) {
      if (v == 0) {
        cnf.clauses.push_back(std::move(clause));
        clause.clear();
        continue;
      }
      if (std::llabs(v) > cnf.var_count) {
        throw ParseError("literal " + std::to_string(v) + " exceeds the declared variable count",
                         lines.number);
      }
      clause.push_back(static_cast<Lit>(v));
    }
  }
  if (!header) throw ParseError("missing problem line", lines.number == 0 ? 1 : lines.number);
  if (!clause.empty()) throw ParseError("last clause is not terminated by 0", lines.number);
  if (static_cast<long long>(cnf.clauses.size()) != declared) {
    throw ParseError("header declares " + std::to_string(declared) + " clauses but " +
                         std::to_string(cnf.clauses.size()) + " were found",
                     lines.number);
  }
  return cnf;
}

DimacsModel parse_dimacs_model(std::string_view text) {
  Lines lines{text};
  std::string_view line;
  DimacsModel m;
  bool bare_values = false;  // MiniSat result file: literals follow "SAT"
  auto take = [&](std::string_view body) {
    for (long long v : integers(body, lines.number)) {
      if (v == 0) continue;
      m.values[static_cast<int>(std::llabs(v))] = v > 0;
    }
  };
  while (lines.next(line)) {
    line = trim(line);
    if (line.empty() || line.front() == 'c') continue;
    if (line == "SAT" || line == "SATISFIABLE") {
      m.status = DimacsModel::Status::Sat;
      bare_values = true;
    } else if (line == "UNSAT" || line == "UNSATISFIABLE") {
      m.status = DimacsModel::Status::Unsat;
    } else if (line == "INDET" || line == "UNKNOWN") {
      m.status = DimacsModel::Status::Unknown;
    } else if (line.front() == 's') {
      auto s = trim(line.substr(1));
      if (s == "SATISFIABLE") {
        m.status = DimacsModel::Status::Sat;
      } else if (s == "UNSATISFIABLE") {
        m.status = DimacsModel::Status::Unsat;
      } else if (s == "UNKNOWN" || s == "INDETERMINATE") {
        m.status = DimacsModel::Status::Unknown;
      } else {
        throw ParseError("unknown status line '" + std::string(line) + "'", lines.number);
      }
    } else if (line.front() == 'v') {
      take(line.substr(1));
    } else if (bare_values) {
      take(line);
    } else {
      throw ParseError("unexpected line '" + std::string(line) + "'", lines.number);
    }
  }
  if (!m.values.empty() && m.status == DimacsModel::Status::Unknown) m.status = DimacsModel::Status::Sat;
  return m;
}

}  // namespace obfus
