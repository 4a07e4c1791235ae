#include "obfus/bench_io.hpp"

#include <cctype>
#include <map>
#include <sstream>

#include "obfus/error.hpp"

namespace obfus {

std::vector<NetName> BenchDocument::key_inputs() const {
  std::vector<NetName> keys;
  for (const auto& pi : netlist.inputs) {
    if (pi.rfind(key_prefix, 0) == 0) keys.push_back(pi);
  }
  return keys;
}

namespace {

bool name_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

std::string upper(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

class LineCursor {
 public:
  LineCursor(std::string_view text, std::size_t line) : text_(text), line_(line) {}

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool at_end() {
    skip_ws();
    return pos_ == text_.size();
  }
  bool peek(char c) {
    skip_ws();
    return pos_ < text_.size() && text_[pos_] == c;
  }
  void expect(char c) {
    skip_ws();
    if (pos_ >= text_.size() || text_[pos_] != c) {
      fail(std::string("expected '") + c + "'" +
           (pos_ < text_.size() ? std::string(", found '") + text_[pos_] + "'" : ", found end of line"));
    }
    ++pos_;
  }
  std::string name(const char* what) {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < text_.size() && name_char(text_[pos_])) ++pos_;
    if (start == pos_) {
      fail(std::string("expected ") + what +
           (pos_ < text_.size() ? std::string(", found '") + text_[pos_] + "'" : ", found end of line"));
    }
    return std::string(text_.substr(start, pos_ - start));
  }
  std::size_t column() const { return pos_ + 1; }
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, line_, pos_ + 1); }

 private:
  std::string_view text_;
  std::size_t line_;
  std::size_t pos_ = 0;
};

}  // namespace

BenchDocument parse_bench_document(std::string_view text, const BenchParseOptions& options) {
  BenchDocument doc;
  doc.key_prefix = options.key_prefix;
  doc.netlist.name = options.name;
  std::map<NetName, std::size_t> defined_at;
  bool in_header = true;

  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    std::size_t hash = line.find('#');
    if (hash != std::string_view::npos) {
      std::string_view before = line.substr(0, hash);
      bool only_comment = before.find_first_not_of(" \t") == std::string_view::npos;
      if (only_comment && in_header) {
        std::string_view body = line.substr(hash + 1);
        if (!body.empty() && body.front() == ' ') body.remove_prefix(1);
        while (!body.empty() && std::isspace(static_cast<unsigned char>(body.back()))) {
          body.remove_suffix(1);
        }
        doc.comments.emplace_back(body);
        continue;
      }
      line = before;
    }

    LineCursor cur(line, line_no);
    if (cur.at_end()) continue;
    in_header = false;

    std::string first = cur.name("net name or INPUT/OUTPUT");
    std::string kw = upper(first);
    if ((kw == "INPUT" || kw == "OUTPUT") && cur.peek('(')) {
      cur.expect('(');
      std::string net = cur.name("net name");
      cur.expect(')');
      if (!cur.at_end()) cur.fail("unexpected text after declaration");
      if (kw == "INPUT") {
        doc.netlist.inputs.push_back(net);
        defined_at.emplace(net, line_no);
      } else {
        doc.netlist.outputs.push_back(net);
      }
      continue;
    }

    cur.expect('=');
    cur.skip_ws();
    std::size_t kind_col = cur.column();
    std::string kind_text = cur.name("gate kind");
    auto kind = parse_gate_kind(kind_text);
    if (!kind) throw UnsupportedGate(kind_text, line_no, kind_col);
    Gate gate{first, *kind, {}};
    cur.expect('(');
    if (!cur.peek(')')) {
      gate.inputs.push_back(cur.name("net name"));
      while (cur.peek(',')) {
        cur.expect(',');
        gate.inputs.push_back(cur.name("net name"));
      }
    }
    cur.expect(')');
    if (!cur.at_end()) cur.fail("unexpected text after gate");
    defined_at.emplace(gate.output, line_no);
    doc.netlist.gates.push_back(std::move(gate));
  }

  auto diags = validate(doc.netlist);
  if (!diags.empty()) {
    const Diagnostic& d = diags.front();
    auto it = defined_at.find(d.net);
    std::string where = it != defined_at.end() ? "line " + std::to_string(it->second) + ": " : "";
    throw StructuralError(where + d.message);
  }
  return doc;
}

Netlist parse_bench(std::string_view text, const BenchParseOptions& options) {
  return parse_bench_document(text, options).netlist;
}

std::vector<std::string> bench_header(const Netlist& netlist) {
  return {netlist.name, std::to_string(netlist.inputs.size()) + " inputs, " +
                            std::to_string(netlist.outputs.size()) + " outputs, " +
                            std::to_string(netlist.gates.size()) + " gates"};
}

namespace {

void write_gate(std::ostringstream& os, const NetName& out, GateKind kind,
                const std::vector<NetName>& inputs) {
  os << out << " = " << to_string(kind) << '(';
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (i != 0) os << ", ";
    os << inputs[i];
  }
  os << ")\n";
}

// Base kind of the 2-input chain used when splitting an n-ary gate.
GateKind chain_kind(GateKind k) {
  switch (k) {
    case GateKind::Nand: return GateKind::And;
    case GateKind::Nor: return GateKind::Or;
    case GateKind::Xnor: return GateKind::Xor;
    default: return k;
  }
}

}  // namespace

std::string emit_bench(const Netlist& netlist, const BenchEmitOptions& options) {
  std::vector<Gate> ordered = topo_order(netlist);
  const bool strict = options.dialect == BenchDialect::Strict;
  if (strict && !options.lower_mux) {
    for (const auto& g : ordered) {
      if (g.kind == GateKind::Mux) {
        throw DialectError("strict dialect has no MUX (gate '" + g.output +
                           "'); enable MUX lowering");
      }
    }
  }

  FreshNames fresh(netlist);
  std::ostringstream os;
  for (const auto& line : options.header.empty() ? bench_header(netlist) : options.header) {
    os << "# " << line << '\n';
  }
  os << '\n';
  for (const auto& pi : netlist.inputs) os << "INPUT(" << pi << ")\n";
  os << '\n';
  for (const auto& po : netlist.outputs) os << "OUTPUT(" << po << ")\n";
  os << '\n';

  for (const auto& g : ordered) {
    if (g.kind == GateKind::Mux && strict) {
      const NetName& s = g.inputs[0];
      NetName ns = fresh.make(g.output);
      NetName t0 = fresh.make(g.output);
      NetName t1 = fresh.make(g.output);
      write_gate(os, ns, GateKind::Not, {s});
      write_gate(os, t0, GateKind::And, {ns, g.inputs[1]});
      write_gate(os, t1, GateKind::And, {s, g.inputs[2]});
      write_gate(os, g.output, GateKind::Or, {t0, t1});
      continue;
    }
    const bool nary = g.kind != GateKind::Not && g.kind != GateKind::Buff &&
                      g.kind != GateKind::Mux && g.inputs.size() > 2;
    if (options.two_input_only && nary) {
      NetName acc = g.inputs[0];
      for (std::size_t i = 1; i + 1 < g.inputs.size(); ++i) {
        NetName t = fresh.make(g.output);
        write_gate(os, t, chain_kind(g.kind), {acc, g.inputs[i]});
        acc = t;
      }
      write_gate(os, g.output, g.kind, {acc, g.inputs.back()});
      continue;
    }
    write_gate(os, g.output, g.kind, g.inputs);
  }
  return os.str();
}

}  // namespace obfus
