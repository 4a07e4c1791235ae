#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace obfus {

/// Base of every error the toolkit throws. `kind()` is a stable tag used
/// in machine-readable error objects.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

/// Text-level error with a 1-based source location (column 0 = unknown).
class ParseError : public Error {
 public:
  ParseError(const std::string& msg, std::size_t line, std::size_t column = 0,
             std::string kind = "ParseError")
      : Error(std::move(kind), format(msg, line, column)),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  static std::string format(const std::string& msg, std::size_t line,
                            std::size_t column) {
    std::string loc = "line " + std::to_string(line);
    if (column != 0) loc += ", column " + std::to_string(column);
    return loc + ": " + msg;
  }

  std::size_t line_;
  std::size_t column_;
};

class UnsupportedGate : public ParseError {
 public:
  UnsupportedGate(const std::string& gate, std::size_t line, std::size_t column = 0)
      : ParseError("unsupported gate kind '" + gate + "'", line, column,
                   "UnsupportedGate") {}
};

class UnsupportedConstruct : public ParseError {
 public:
  UnsupportedConstruct(const std::string& what, std::size_t line,
                       std::size_t column = 0)
      : ParseError("unsupported construct: " + what, line, column,
                   "UnsupportedConstruct") {}
};

#define OBFUS_DEFINE_ERROR(Name)                                   \
  class Name : public Error {                                      \
   public:                                                         \
    explicit Name(const std::string& what) : Error(#Name, what) {} \
  }

OBFUS_DEFINE_ERROR(StructuralError);
OBFUS_DEFINE_ERROR(InputError);
OBFUS_DEFINE_ERROR(UnknownNet);
OBFUS_DEFINE_ERROR(DialectError);
OBFUS_DEFINE_ERROR(ConfigError);
OBFUS_DEFINE_ERROR(SelectionError);
OBFUS_DEFINE_ERROR(LockError);
OBFUS_DEFINE_ERROR(DummyError);
OBFUS_DEFINE_ERROR(AttackError);
OBFUS_DEFINE_ERROR(InterfaceError);
OBFUS_DEFINE_ERROR(StatError);
OBFUS_DEFINE_ERROR(VerifyError);
OBFUS_DEFINE_ERROR(SolverError);
OBFUS_DEFINE_ERROR(TransportError);
OBFUS_DEFINE_ERROR(TruncationError);
OBFUS_DEFINE_ERROR(LlmError);

#undef OBFUS_DEFINE_ERROR

}  // namespace obfus
