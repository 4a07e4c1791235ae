#include "obfus/error.hpp"
#include "obfus/llm/llm.hpp"

namespace obfus::llm {

MockTransport::MockTransport(std::vector<Reply> script) : script_(std::move(script)) {
  if (script_.empty()) throw std::invalid_argument("mock transport needs at least one reply");
}

Completion MockTransport::send(const Transcript& transcript, const std::string&, const DecodingParams&) {
  requests_.push_back(transcript);
  const Reply& r = script_[std::min(next_, script_.size() - 1)];
  ++next_;
  if (r.fail) throw TransportError("mock transport failure");
  return {r.text, r.finish_reason};
}

}  // namespace obfus::llm
