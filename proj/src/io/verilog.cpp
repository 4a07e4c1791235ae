#include "obfus/verilog.hpp"

#include <cctype>
#include <map>
#include <optional>
#include <set>

#include "obfus/error.hpp"

namespace obfus {

namespace {

struct Token {
  enum class Kind { Ident, Number, Punct, End } kind;
  std::string text;
  std::size_t line;
  std::size_t column;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space_and_comments();
      if (pos_ >= src_.size()) {
        out.push_back({Token::Kind::End, "", line_, col_});
        return out;
      }
      const std::size_t line = line_, col = col_;
      char c = src_[pos_];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_' ||
                src_[pos_] == '$')) {
          advance();
        }
        out.push_back({Token::Kind::Ident, std::string(src_.substr(start, pos_ - start)), line, col});
      } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '\'') {
        std::size_t start = pos_;
        while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
                                      src_[pos_] == '\'' || src_[pos_] == '_')) {
          advance();
        }
        out.push_back({Token::Kind::Number, std::string(src_.substr(start, pos_ - start)), line, col});
      } else if (c == '\\') {
        throw UnsupportedConstruct("escaped identifier", line, col);
      } else {
        advance();
        out.push_back({Token::Kind::Punct, std::string(1, c), line, col});
      }
    }
  }

 private:
  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_space_and_comments() {
    for (;;) {
      while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) advance();
      if (src_.substr(pos_, 2) == "//") {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else if (src_.substr(pos_, 2) == "/*") {
        const std::size_t line = line_, col = col_;
        std::size_t end = src_.find("*/", pos_ + 2);
        if (end == std::string_view::npos) throw ParseError("unterminated block comment", line, col);
        while (pos_ < end + 2) advance();
      } else {
        return;
      }
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

const std::set<std::string>& primitives() {
  static const std::set<std::string> p = {"and", "nand", "or", "nor", "xor", "xnor", "not", "buf"};
  return p;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  VerilogModule run() {
    VerilogModule m;
    expect_ident("module");
    m.name = ident("module name");
    header(m);
    expect(";");
    while (!is_ident("endmodule")) {
      const Token& t = peek();
      if (t.kind == Token::Kind::End) fail("missing 'endmodule'");
      if (t.kind != Token::Kind::Ident) unsupported(t);
      if (t.text == "input" || t.text == "output") {
        next();
        declare(m, t.text == "input" ? VerilogModule::Direction::Input
                                     : VerilogModule::Direction::Output);
      } else if (t.text == "wire") {
        next();
        for (auto& n : ident_list()) m.wires.push_back(std::move(n));
        expect(";");
      } else if (t.text == "assign") {
        assign(m);
      } else if (primitives().count(t.text) != 0) {
        instances(m);
      } else {
        unsupported(t);
      }
    }
    next();
    if (peek().kind != Token::Kind::End) unsupported(peek());
    for (const auto& p : m.ports) {
      if (!directions_.count(p.name)) {
        throw ParseError("port '" + p.name + "' has no input/output declaration", header_line_);
      }
    }
    for (auto& p : m.ports) p.direction = directions_.at(p.name);
    return m;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
  bool is_ident(std::string_view s) const {
    return peek().kind == Token::Kind::Ident && peek().text == s;
  }
  bool is_punct(std::string_view s) const {
    return peek().kind == Token::Kind::Punct && peek().text == s;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg, peek().line, peek().column);
  }

  [[noreturn]] static void unsupported(const Token& t) {
    if (t.kind == Token::Kind::Number) {
      throw UnsupportedConstruct("constant '" + t.text + "'", t.line, t.column);
    }
    if (t.kind == Token::Kind::Punct && (t.text == "[" || t.text == "]")) {
      throw UnsupportedConstruct("bus or bit-select", t.line, t.column);
    }
    if (t.kind == Token::Kind::Punct && t.text == "#") {
      throw UnsupportedConstruct("delay or parameter", t.line, t.column);
    }
    if (t.kind == Token::Kind::End) throw ParseError("unexpected end of input", t.line, t.column);
    throw UnsupportedConstruct("'" + t.text + "'", t.line, t.column);
  }

  void expect(std::string_view punct) {
    if (!is_punct(punct)) {
      const Token& t = peek();
      if (t.kind == Token::Kind::Number || t.text == "[" || t.text == "#") unsupported(t);
      fail("expected '" + std::string(punct) + "', found '" + t.text + "'");
    }
    next();
  }

  void expect_ident(std::string_view word) {
    if (!is_ident(word)) fail("expected '" + std::string(word) + "'");
    next();
  }

  std::string ident(const char* what) {
    const Token& t = peek();
    if (t.kind != Token::Kind::Ident) {
      if (t.kind == Token::Kind::Number || t.text == "[" || t.text == "#") unsupported(t);
      fail(std::string("expected ") + what);
    }
    next();
    return t.text;
  }

  std::vector<std::string> ident_list() {
    std::vector<std::string> out;
    if (is_punct("[")) unsupported(peek());
    out.push_back(ident("net name"));
    while (is_punct(",")) {
      next();
      out.push_back(ident("net name"));
    }
    if (is_punct("[")) unsupported(peek());
    return out;
  }

  void header(VerilogModule& m) {
    header_line_ = peek().line;
    if (!is_punct("(")) return;
    next();
    if (is_punct(")")) {
      next();
      return;
    }
    std::optional<VerilogModule::Direction> ansi;
    for (;;) {
      if (is_ident("input") || is_ident("output")) {
        ansi = next().text == "input" ? VerilogModule::Direction::Input
                                      : VerilogModule::Direction::Output;
        if (is_ident("wire")) next();
      }
      std::string name = ident("port name");
      if (ansi) directions_[name] = *ansi;
      m.ports.push_back({name, VerilogModule::Direction::Input});
      if (is_punct(",")) {
        next();
        continue;
      }
      expect(")");
      return;
    }
  }

  void declare(VerilogModule& m, VerilogModule::Direction dir) {
    if (is_ident("wire")) next();
    std::size_t line = peek().line;
    for (auto& n : ident_list()) {
      bool in_header = false;
      for (const auto& p : m.ports) in_header |= p.name == n;
      if (!in_header) throw ParseError("'" + n + "' is declared as a port but not listed in the module header", line);
      directions_[n] = dir;
    }
    expect(";");
  }

  void assign(VerilogModule& m) {
    const Token& kw = next();
    std::string lhs = ident("assignment target");
    expect("=");
    std::string rhs = ident("assignment source");
    if (!is_punct(";")) {
      throw UnsupportedConstruct("assign with an operator expression", peek().line, peek().column);
    }
    next();
    m.instances.push_back({"buf", "", {lhs, rhs}, kw.line});
  }

  void instances(VerilogModule& m) {
    const Token& prim = next();
    if (is_punct("#")) unsupported(peek());
    for (;;) {
      VerilogModule::Instance inst;
      inst.primitive = prim.text;
      inst.line = peek().line;
      if (peek().kind == Token::Kind::Ident) inst.name = next().text;
      expect("(");
      inst.terminals = ident_list();
      expect(")");
      m.instances.push_back(std::move(inst));
      if (is_punct(",")) {
        next();
        continue;
      }
      expect(";");
      return;
    }
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::size_t header_line_ = 1;
  std::map<std::string, VerilogModule::Direction> directions_;
};

}  // namespace

VerilogModule parse_verilog_module(std::string_view text) {
  return Parser(Lexer(text).run()).run();
}

Netlist to_netlist(const VerilogModule& module) {
  Netlist n;
  n.name = module.name;
  for (const auto& p : module.ports) {
    (p.direction == VerilogModule::Direction::Input ? n.inputs : n.outputs).push_back(p.name);
  }
  for (const auto& inst : module.instances) {
    GateKind kind = *parse_gate_kind(inst.primitive);
    const auto& t = inst.terminals;
    if (kind == GateKind::Not || kind == GateKind::Buff) {
      if (t.size() < 2) {
        throw ParseError(inst.primitive + " needs an output and an input", inst.line);
      }
      for (std::size_t o = 0; o + 1 < t.size(); ++o) n.gates.push_back({t[o], kind, {t.back()}});
    } else {
      if (t.size() < 3) {
        throw ParseError(inst.primitive + " needs an output and at least two inputs", inst.line);
      }
      n.gates.push_back({t.front(), kind, std::vector<NetName>(t.begin() + 1, t.end())});
    }
  }
  auto diags = validate(n);
  if (!diags.empty()) throw StructuralError(diags.front().message);
  return n;
}

}  // namespace obfus
