#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "obfus/netlist.hpp"

namespace obfus {

inline constexpr std::string_view kDefaultKeyPrefix = "keyinput";

struct BenchParseOptions {
  /// Circuit identifier stored in Netlist::name.
  std::string name = "circuit";
  /// Inputs starting with this prefix are key inputs. Parsing itself treats
  /// them as ordinary inputs; the prefix travels with the document.
  std::string key_prefix = std::string(kDefaultKeyPrefix);
};

/// A parsed file: the leading `#` comment block (without the `#` and one
/// following space) plus the netlist.
struct BenchDocument {
  std::vector<std::string> comments;
  Netlist netlist;
  std::string key_prefix = std::string(kDefaultKeyPrefix);

  /// Inputs carrying the key prefix, in port order.
  std::vector<NetName> key_inputs() const;
};

BenchDocument parse_bench_document(std::string_view text, const BenchParseOptions& options = {});
Netlist parse_bench(std::string_view text, const BenchParseOptions& options = {});

enum class BenchDialect {
  /// MUX(s, a, b) allowed.
  Extended,
  /// Classic ISCAS alphabet only.
  Strict,
};

struct BenchEmitOptions {
  BenchDialect dialect = BenchDialect::Extended;
  /// Strict dialect only: rewrite MUX as NOT/AND/AND/OR instead of failing.
  bool lower_mux = true;
  /// Rewrite every n-ary AND/NAND/OR/NOR/XOR/XNOR as 2-input gates.
  bool two_input_only = false;
  /// Replaces the generated header comment when non-empty.
  std::vector<std::string> header;
};

/// Canonical text: header comment, INPUT lines, OUTPUT lines, gates in
/// topological order, one space after each comma. Gates synthesised by
/// lowering get `<base>_nl<counter>` names.
std::string emit_bench(const Netlist& netlist, const BenchEmitOptions& options = {});

/// Default header lines for a netlist.
std::vector<std::string> bench_header(const Netlist& netlist);

}  // namespace obfus
