#pragma once

#include <chrono>
#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "obfus/locking.hpp"
#include "obfus/netlist.hpp"

namespace obfus::llm {

enum class Role { System, User, Assistant };
std::string_view to_string(Role r);

struct ChatMessage {
  Role role = Role::User;
  std::string content;

  bool operator==(const ChatMessage&) const = default;
};
using Transcript = std::vector<ChatMessage>;

struct DecodingParams {
  double temperature = 0.0;
  double top_p = 1.0;
  int max_tokens = 4096;
};

struct Completion {
  std::string text;
  /// "stop", "length", ... as reported by the endpoint; may be empty.
  std::string finish_reason;
};

/// Stateless chat endpoint. Failures throw TransportError.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual Completion send(const Transcript& transcript, const std::string& model,
                          const DecodingParams& params) = 0;
};

/// Scripted replies for offline runs. Once the script is exhausted the
/// last entry repeats.
class MockTransport final : public Transport {
 public:
  struct Reply {
    std::string text;
    std::string finish_reason = "stop";
    bool fail = false;  // throw TransportError instead of answering
  };

  explicit MockTransport(std::vector<Reply> script);
  Completion send(const Transcript& transcript, const std::string& model,
                  const DecodingParams& params) override;

  /// Every transcript received, in call order.
  const std::vector<Transcript>& requests() const noexcept { return requests_; }

 private:
  std::vector<Reply> script_;
  std::size_t next_ = 0;
  std::vector<Transcript> requests_;
};

/// OpenAI-style `chat/completions` over HTTP(S). The bearer token comes
/// from `api_key`, or from OBFUS_API_KEY when that is empty.
struct HttpConfig {
  std::string endpoint;  // e.g. https://api.openai.com/v1/chat/completions
  std::string api_key;
  std::chrono::seconds timeout{120};
};

class HttpTransport final : public Transport {
 public:
  explicit HttpTransport(HttpConfig config);
  Completion send(const Transcript& transcript, const std::string& model,
                  const DecodingParams& params) override;

 private:
  HttpConfig config_;
  std::string scheme_host_port_;
  std::string path_;
};

// --- prompts -----------------------------------------------------------

inline constexpr std::string_view kContinuePrompt = "Continue from the last line";

struct PromptTemplate {
  std::string_view id;    // e.g. "convert.v1"
  std::string_view text;  // with {{placeholders}}
};
const PromptTemplate& convert_template();
const PromptTemplate& obfuscate_template();
const PromptTemplate& repair_template();

/// Replaces every {{name}}; throws std::invalid_argument for a placeholder
/// without a value.
std::string render(std::string_view tmpl, const std::map<std::string, std::string>& values);

enum class StrategyHint { FanHeavy, SymmetryBreaking, Multiplexers, Randomness, CorruptionPlacement };
std::string_view to_string(StrategyHint h);

struct ObfuscatePrompt {
  std::size_t key_size = 1;
  std::vector<GateKind> keygate_kinds{GateKind::Xor, GateKind::Xnor};
  std::vector<StrategyHint> hints;
  std::string key_prefix = std::string(kDefaultKeyPrefix);
};

/// Hints matching a locking configuration (random insertion is always on).
std::vector<StrategyHint> hints_for(const LockConfig& config);
std::vector<GateKind> keygate_kinds_for(const LockConfig& config);

Transcript render_convert_prompt(std::string_view verilog);
Transcript render_obfuscate_prompt(std::string_view bench, const ObfuscatePrompt& prompt);
Transcript render_repair_prompt(std::string_view error);

// --- continuation ------------------------------------------------------

struct ContinuationLimits {
  std::size_t max_continuations = 8;
  std::size_t transport_retries = 2;
  std::chrono::milliseconds retry_backoff{0};
};

/// True when the finish reason is "length" or the last non-blank,
/// non-comment line is an unfinished bench statement: unbalanced
/// parentheses, an assignment or INPUT/OUTPUT without the closing ')', or
/// a bare net name after complete statements. Prose is not truncated.
bool looks_truncated(std::string_view text, std::string_view finish_reason = {});

/// Removes ``` fence lines.
std::string strip_code_fences(std::string_view text);

/// Appends `next` to `previous`, dropping lines that repeat the end of
/// `previous` and merging a cut-off final line.
std::string stitch(std::string_view previous, std::string_view next);

struct ContinuationResult {
  std::string text;
  std::size_t continuations = 0;
  std::size_t transport_retries = 0;
};

/// Sends `transcript`, appending each assistant reply and every
/// continuation request to it. Throws TruncationError when the output is
/// still cut off after `limits.max_continuations` follow-ups, and
/// TransportError when retries are exhausted.
ContinuationResult run_with_continuation(Transport& transport, Transcript& transcript,
                                         const std::string& model, const DecodingParams& params,
                                         const ContinuationLimits& limits);

// --- driver ------------------------------------------------------------

struct ValidationOutcome {
  std::size_t attempt = 0;
  bool ok = false;
  std::string stage;  // transport, truncation, parse, structural, key, functional
  std::string message;
};

enum class FinalSource { Llm, Fallback };
std::string_view to_string(FinalSource s);

struct LlmRunRecord {
  std::string template_id;
  std::string model;
  DecodingParams params;
  Transcript transcript;
  std::size_t continuation_count = 0;
  std::size_t transport_retries = 0;
  std::vector<ValidationOutcome> validations;
  FinalSource final_source = FinalSource::Llm;
};

struct DriverConfig {
  std::string model = "gpt-3.5-turbo";
  DecodingParams params;
  ContinuationLimits limits;
  /// Repair prompts after the first attempt.
  std::size_t max_repairs = 2;
  bool fallback = true;
  std::string key_prefix = std::string(kDefaultKeyPrefix);
};

struct ConvertResult {
  Netlist netlist;
  LlmRunRecord record;
};

/// Verilog -> bench through the model. Accepted output must parse and be
/// equivalent to the local Verilog parse when that parse succeeds. With
/// fallback on, the local parse is returned after the retry cap. Throws
/// LlmError otherwise.
ConvertResult llm_convert(Transport& transport, std::string_view verilog, const DriverConfig& config);

struct ObfuscateResult {
  LockedNetlist locked;
  LlmRunRecord record;
};

/// Locking through the model. A candidate must parse, pass the structural
/// check with exactly `config.key_size` key inputs, and have a correct key:
/// the declared `# key=` value, or for widths <= 8 the first key found by
/// exhaustive search; wider keys must be declared and are checked with a
/// SAT miter. With fallback on, the locking engine's output for `config`
/// is returned after the retry cap. Throws LlmError otherwise.
ObfuscateResult llm_obfuscate(Transport& transport, const Netlist& netlist, const LockConfig& config,
                              const DriverConfig& driver);

}  // namespace obfus::llm
