// Copyright 2026 The echogrid Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

namespace echogrid {

// What a request is for. Scripted backends dispatch on it; the live backend
// only mirrors it into the audit log.
enum class CallRole { Agent, Summarize, IdentifyGoals, InferTrajectory, Reflect, Workflow };
std::string_view to_string(CallRole role) noexcept;

struct ChatMessage {
  std::string role;  // "user" or "assistant"
  std::string content;
  friend bool operator==(const ChatMessage&, const ChatMessage&) = default;
};

struct LMParams {
  double temperature = 0.0;
  int max_new_tokens = 4000;
  friend bool operator==(const LMParams&, const LMParams&) = default;
};

struct LMRequest {
  CallRole role = CallRole::Agent;
  std::string system_prompt;
  std::vector<ChatMessage> messages;
  LMParams params;

  // Throws ConfigError on negative temperature or non-positive token budget.
  void validate() const;
};

struct BackendCapabilities {
  bool deterministic = false;
  bool live = false;
};

// Implementations must be callable concurrently from several episode
// runners.
class LMBackend {
 public:
  virtual ~LMBackend() = default;
  // Returns the assistant text. Throws BackendError on failure; never
  // returns silently empty because of a transport problem.
  virtual std::string complete(const LMRequest& request) = 0;
  virtual BackendCapabilities capabilities() const = 0;
};

// ---------------------------------------------------------------------------
// Structured-output parsing. Total: every input yields a value or an error.

struct ParseError {
  std::string message;
  std::string missing_key;  // set when a required key is absent
};

template <typename T>
class Parsed {
 public:
  Parsed(T value) : v_(std::move(value)) {}  // NOLINT(google-explicit-constructor)
  Parsed(ParseError error) : v_(std::move(error)) {}  // NOLINT(google-explicit-constructor)

  bool ok() const noexcept { return v_.index() == 0; }
  explicit operator bool() const noexcept { return ok(); }
  const T& value() const { return std::get<0>(v_); }
  T& value() { return std::get<0>(v_); }
  const ParseError& error() const { return std::get<1>(v_); }

 private:
  std::variant<T, ParseError> v_;
};

// First balanced {...} in the text that parses as a JSON object. Code
// fences and surrounding prose are skipped.
std::optional<nlohmann::json> extract_json_object(std::string_view text);

struct ParsedChoice {
  std::string thought;
  int choice = 0;
  friend bool operator==(const ParsedChoice&, const ParsedChoice&) = default;
};

// {"thought": X, "choice": Y}; Y may be an integer, an integral float, or a
// string of digits.
Parsed<ParsedChoice> parse_choice(std::string_view text);

enum class FieldType { Text, TextList };

struct PayloadField {
  std::string name;
  FieldType type = FieldType::Text;
};

using PayloadValue = std::variant<std::string, std::vector<std::string>>;
using Payload = std::map<std::string, PayloadValue>;

Parsed<Payload> parse_json_payload(std::string_view text, std::span<const PayloadField> fields);

// ---------------------------------------------------------------------------
// Live chat-completion backend.

struct UsageSnapshot {
  std::uint64_t calls = 0;
  std::uint64_t retries = 0;
  std::uint64_t prompt_tokens = 0;
  std::uint64_t completion_tokens = 0;
};

struct LiveConfig {
  std::string base_url = "https://api.openai.com/v1";
  std::string api_key;
  std::string model = "gpt-4o";
  std::chrono::milliseconds timeout{120000};
  int max_attempts = 3;
  std::chrono::milliseconds initial_backoff{1000};
  double requests_per_minute = 0.0;  // 0 disables rate limiting
  std::function<void(const std::string&)> log;  // retry notices; stderr when empty

  // Reads LM_API_KEY, LM_BASE_URL and LM_MODEL. Throws ConfigError when
  // LM_API_KEY is unset.
  static LiveConfig from_env();
};

// Blocking token bucket; capacity of one minute's worth of requests.
class TokenBucket {
 public:
  explicit TokenBucket(double per_minute);
  void acquire();

 private:
  std::mutex mu_;
  double per_second_;
  double capacity_;
  double tokens_;
  std::chrono::steady_clock::time_point last_;
};

class LiveBackend final : public LMBackend {
 public:
  explicit LiveBackend(LiveConfig config);
  ~LiveBackend() override;

  std::string complete(const LMRequest& request) override;
  BackendCapabilities capabilities() const override { return {false, true}; }
  UsageSnapshot usage() const noexcept;

  // The request body sent for `request`.
  nlohmann::json request_body(const LMRequest& request) const;

 private:
  LiveConfig config_;
  std::string origin_;  // scheme://host[:port]
  std::string path_;    // prefix + "/chat/completions"
  std::unique_ptr<TokenBucket> bucket_;
  std::atomic<std::uint64_t> calls_{0};
  std::atomic<std::uint64_t> retries_{0};
  std::atomic<std::uint64_t> prompt_tokens_{0};
  std::atomic<std::uint64_t> completion_tokens_{0};
};

// Extracts choices[0].message.content from a chat-completion response.
// Throws BackendError when the body lacks it.
std::string extract_completion_text(const nlohmann::json& response);

// Append-only JSONL mirror of every request and response.
class AuditLog {
 public:
  explicit AuditLog(const std::filesystem::path& path);
  void record(const LMRequest& request, const std::string& outcome, bool ok);

 private:
  std::mutex mu_;
  std::ofstream out_;
};

class AuditingBackend final : public LMBackend {
 public:
  AuditingBackend(std::shared_ptr<LMBackend> inner, std::shared_ptr<AuditLog> log)
      : inner_(std::move(inner)), log_(std::move(log)) {}

  std::string complete(const LMRequest& request) override;
  BackendCapabilities capabilities() const override { return inner_->capabilities(); }

 private:
  std::shared_ptr<LMBackend> inner_;
  std::shared_ptr<AuditLog> log_;
};

// Thread-safe call counter around any backend.
class CountingBackend final : public LMBackend {
 public:
  explicit CountingBackend(std::shared_ptr<LMBackend> inner) : inner_(std::move(inner)) {}

  std::string complete(const LMRequest& request) override;
  BackendCapabilities capabilities() const override { return inner_->capabilities(); }
  std::uint64_t calls() const noexcept { return calls_.load(); }

 private:
  std::shared_ptr<LMBackend> inner_;
  std::atomic<std::uint64_t> calls_{0};
};

}  // namespace echogrid
