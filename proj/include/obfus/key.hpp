#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace obfus {

/// Bit i drives key input `<prefix><i>`.
struct Key {
  std::vector<std::uint8_t> bits;

  std::size_t size() const noexcept { return bits.size(); }
  bool operator==(const Key&) const = default;

  /// "0110..." with bit 0 first.
  std::string to_string() const;
  /// Throws ParseError on anything but '0'/'1'.
  static Key from_string(std::string_view text);
  /// Every bit flipped.
  Key complemented() const;
  /// Low `width` bits of `value`, bit 0 first.
  static Key from_integer(std::uint64_t value, std::size_t width);
};

/// Deterministic bits from the seeded generator.
Key generate_key(std::size_t key_size, std::uint64_t seed);

/// Key file: optional `#` comment lines, then one line of '0'/'1'.
std::string write_key_file(const Key& key, const std::vector<std::string>& comments = {});
Key read_key_file(std::string_view text);

}  // namespace obfus
