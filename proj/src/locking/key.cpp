#include "obfus/key.hpp"

#include <optional>

#include "obfus/error.hpp"
#include "obfus/rng.hpp"

namespace obfus {

std::string Key::to_string() const {
  std::string s;
  s.reserve(bits.size());
  for (auto b : bits) s.push_back(b ? '1' : '0');
  return s;
}

Key Key::from_string(std::string_view text) {
  Key k;
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (c != '0' && c != '1') {
      throw ParseError(std::string("key bits must be '0' or '1', found '") + c + "'", 1, i + 1);
    }
    k.bits.push_back(c == '1');
  }
  return k;
}

Key Key::complemented() const {
  Key k = *this;
  for (auto& b : k.bits) b = !b;
  return k;
}

Key Key::from_integer(std::uint64_t value, std::size_t width) {
  Key k;
  for (std::size_t i = 0; i < width; ++i) k.bits.push_back((value >> i) & 1);
  return k;
}

Key generate_key(std::size_t key_size, std::uint64_t seed) {
  Rng rng = Rng::stream(seed, rng_stream::kKey);
  Key k;
  k.bits.reserve(key_size);
  for (std::size_t i = 0; i < key_size; ++i) k.bits.push_back(rng.bit());
  return k;
}

std::string write_key_file(const Key& key, const std::vector<std::string>& comments) {
  std::string out;
  for (const auto& c : comments) out += "# " + c + "\n";
  out += key.to_string() + "\n";
  return out;
}

Key read_key_file(std::string_view text) {
  std::size_t line_no = 0;
  std::size_t start = 0;
  std::optional<Key> key;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) {
      line.remove_suffix(1);
    }
    std::size_t indent = 0;
    while (indent < line.size() && (line[indent] == ' ' || line[indent] == '\t')) ++indent;
    line.remove_prefix(indent);
    if (line.empty() || line.front() == '#') continue;
    if (key) throw ParseError("key file has more than one key line", line_no);
    try {
      key = Key::from_string(line);
    } catch (const ParseError& e) {
      throw ParseError("key bits must be '0' or '1'", line_no, indent + e.column());
    }
  }
  // A zero-width key is written as an empty line.
  return key ? *key : Key{};
}

}  // namespace obfus
