#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "obfus/netlist.hpp"

namespace obfus {

/// One structural module: ports, wires and gate-primitive instances.
struct VerilogModule {
  enum class Direction { Input, Output };
  struct Port {
    std::string name;
    Direction direction;
  };
  struct Instance {
    std::string primitive;  // and, nand, or, nor, xor, xnor, not, buf
    std::string name;       // may be empty
    std::vector<std::string> terminals;  // outputs first
    std::size_t line = 0;
  };

  std::string name;
  std::vector<Port> ports;  // header order
  std::vector<std::string> wires;
  std::vector<Instance> instances;
};

/// Accepts a single module of gate primitives (and `assign a = b;` as a
/// buffer). Anything else throws UnsupportedConstruct with its location.
VerilogModule parse_verilog_module(std::string_view text);

/// n-input primitives stay n-input. `not`/`buf` with several outputs become
/// one gate per output. Throws StructuralError on invalid connectivity.
Netlist to_netlist(const VerilogModule& module);

inline Netlist parse_verilog_subset(std::string_view text) {
  return to_netlist(parse_verilog_module(text));
}

}  // namespace obfus
