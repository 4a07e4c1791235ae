#include <algorithm>
#include <cctype>
#include <thread>

#include "obfus/error.hpp"
#include "obfus/llm/llm.hpp"

namespace obfus::llm {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    lines.push_back(text.substr(pos, end - pos));
    pos = end + 1;
  }
  return lines;
}

bool is_fence(std::string_view line) { return trim(line).substr(0, 3) == "```"; }

bool starts_with_keyword(std::string_view line, std::string_view kw) {
  if (line.size() < kw.size()) return false;
  for (std::size_t i = 0; i < kw.size(); ++i) {
    if (std::toupper(static_cast<unsigned char>(line[i])) != kw[i]) return false;
  }
  return true;
}

bool has_statement(const std::vector<std::string_view>& lines) {
  for (auto l : lines) {
    auto t = trim(l);
    if (t.empty() || t.front() == '#') continue;
    if (t.back() == ')' && t.find('(') != std::string_view::npos) return true;
  }
  return false;
}

}  // namespace

std::string strip_code_fences(std::string_view text) {
  std::string out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    const bool last = end == std::string_view::npos;
    if (last) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    if (!is_fence(line)) {
      out.append(line);
      if (!last) out += '\n';
    }
    pos = end + 1;
  }
  return out;
}

bool looks_truncated(std::string_view text, std::string_view finish_reason) {
  if (finish_reason == "length") return true;
  auto lines = split_lines(text);
  std::string_view last;
  for (auto it = lines.rbegin(); it != lines.rend(); ++it) {
    auto t = trim(*it);
    if (!t.empty() && !is_fence(t)) {
      last = t;
      break;
    }
  }
  if (last.empty() || last.front() == '#') return false;
  int depth = 0;
  for (char c : last) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
  }
  if (depth != 0) return true;
  if (last.back() == ')') return false;
  // An unfinished statement: `name = KIND(...`, `INPUT(`, or a bare net
  // name cut off after earlier statements.
  if (last.find('=') != std::string_view::npos) return true;
  if (starts_with_keyword(last, "INPUT") || starts_with_keyword(last, "OUTPUT")) return true;
  const bool bare_name = std::all_of(last.begin(), last.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  });
  return bare_name && has_statement(lines);
}

std::string stitch(std::string_view previous, std::string_view next_raw) {
  std::string next = strip_code_fences(next_raw);
  if (previous.empty()) return next;

  std::string head(previous);
  const std::size_t nl = head.rfind('\n');
  std::string_view tail = nl == std::string::npos ? std::string_view(head) : std::string_view(head).substr(nl + 1);
  if (!trim(tail).empty() && looks_truncated(tail)) {
    std::string_view first = trim(next.substr(0, next.find('\n')));
    if (first.substr(0, trim(tail).size()) != trim(tail)) {
      // The reply resumes mid-line.
      return head + next;
    }
    // The reply restates the cut-off line in full.
    head.resize(nl == std::string::npos ? 0 : nl + 1);
  } else if (!head.empty() && head.back() != '\n') {
    head += '\n';
  }

  auto prev_lines = split_lines(head);
  auto next_lines = split_lines(next);
  const std::size_t max_overlap = std::min(prev_lines.size(), next_lines.size());
  std::size_t drop = 0;
  for (std::size_t m = max_overlap; m >= 1; --m) {
    bool same = true;
    bool blank = true;
    for (std::size_t i = 0; i < m && same; ++i) {
      auto a = trim(prev_lines[prev_lines.size() - m + i]);
      auto b = trim(next_lines[i]);
      same = a == b;
      blank = blank && a.empty();
    }
    if (same && !blank) {
      drop = m;
      break;
    }
  }
  std::size_t cut = 0;
  for (std::size_t i = 0; i < drop; ++i) {
    std::size_t end = next.find('\n', cut);
    cut = end == std::string::npos ? next.size() : end + 1;
  }
  return head + next.substr(cut);
}

ContinuationResult run_with_continuation(Transport& transport, Transcript& transcript, const std::string& model,
                                         const DecodingParams& params, const ContinuationLimits& limits) {
  ContinuationResult r;
  for (;;) {
    Completion c;
    for (std::size_t attempt = 0;; ++attempt) {
      try {
        c = transport.send(transcript, model, params);
        break;
      } catch (const TransportError&) {
        if (attempt >= limits.transport_retries) throw;
        ++r.transport_retries;
        if (limits.retry_backoff.count() > 0) std::this_thread::sleep_for(limits.retry_backoff * (attempt + 1));
      }
    }
    transcript.push_back({Role::Assistant, c.text});
    r.text = stitch(r.text, c.text);
    if (!looks_truncated(r.text, c.finish_reason)) return r;
    if (r.continuations >= limits.max_continuations) {
      throw TruncationError("output still truncated after " + std::to_string(r.continuations) +
                            " continuation requests");
    }
    transcript.push_back({Role::User, std::string(kContinuePrompt)});
    ++r.continuations;
  }
}

}  // namespace obfus::llm
