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

#include <cstdlib>
#include <iostream>
#include <regex>
#include <thread>

#include <httplib.h>

#include "echogrid/errors.hpp"
#include "echogrid/lm.hpp"

namespace echogrid {

namespace {

constexpr std::size_t kMaxErrorBody = 512;

bool transient(int status) { return status == 408 || status == 429 || status >= 500; }

std::string getenv_or(const char* name, std::string fallback) {
  const char* v = std::getenv(name);
  return v && *v ? std::string(v) : std::move(fallback);
}

}  // namespace

LiveConfig LiveConfig::from_env() {
  LiveConfig c;
  c.api_key = getenv_or("LM_API_KEY", "");
  if (c.api_key.empty()) throw ConfigError("LM_API_KEY is not set; the live backend needs an API key");
  c.base_url = getenv_or("LM_BASE_URL", c.base_url);
  c.model = getenv_or("LM_MODEL", c.model);
  return c;
}

LiveBackend::LiveBackend(LiveConfig config) : config_(std::move(config)) {
  static const std::regex kUrl(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(config_.base_url, m, kUrl)) {
    throw ConfigError("LM_BASE_URL must look like http(s)://host[:port][/path], got " + config_.base_url);
  }
  origin_ = m[1].str();
  std::string prefix = m[2].matched ? m[2].str() : "";
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  path_ = prefix + "/chat/completions";
  if (config_.max_attempts < 1) throw ConfigError("max_attempts must be >= 1");
  if (config_.requests_per_minute > 0) bucket_ = std::make_unique<TokenBucket>(config_.requests_per_minute);
}

LiveBackend::~LiveBackend() = default;

nlohmann::json LiveBackend::request_body(const LMRequest& request) const {
  nlohmann::json messages = nlohmann::json::array();
  messages.push_back({{"role", "system"}, {"content", request.system_prompt}});
  for (const auto& m : request.messages) messages.push_back({{"role", m.role}, {"content", m.content}});
  return {{"model", config_.model},
          {"messages", messages},
          {"temperature", request.params.temperature},
          {"max_tokens", request.params.max_new_tokens}};
}

std::string LiveBackend::complete(const LMRequest& request) {
  request.validate();
  const std::string body =
      request_body(request).dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
  const httplib::Headers headers = {{"Authorization", "Bearer " + config_.api_key}};
  calls_.fetch_add(1);

  int last_status = 0;
  std::string last_body;
  for (int attempt = 1; attempt <= config_.max_attempts; ++attempt) {
    if (attempt > 1) {
      retries_.fetch_add(1);
      const auto delay = config_.initial_backoff * (1LL << (attempt - 2));
      const std::string note = "lm: retry " + std::to_string(attempt - 1) + " after status " +
                               std::to_string(last_status) + ", waiting " +
                               std::to_string(delay.count()) + " ms";
      if (config_.log) config_.log(note);
      else std::cerr << note << '\n';
      std::this_thread::sleep_for(delay);
    }
    if (bucket_) bucket_->acquire();

    httplib::Client client(origin_);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(config_.timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());
    auto res = client.Post(path_, headers, body, "application/json");
    if (!res) {
      last_status = 0;
      last_body = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    last_status = res->status;
    last_body = res->body.substr(0, kMaxErrorBody);
    if (res->status == 200) {
      auto doc = nlohmann::json::parse(res->body, nullptr, false);
      if (doc.is_discarded()) throw BackendError("response body is not JSON", 200, last_body);
      std::string text = extract_completion_text(doc);
      if (doc.contains("usage") && doc["usage"].is_object()) {
        const auto& u = doc["usage"];
        if (u.contains("prompt_tokens") && u["prompt_tokens"].is_number_unsigned())
          prompt_tokens_.fetch_add(u["prompt_tokens"].get<std::uint64_t>());
        if (u.contains("completion_tokens") && u["completion_tokens"].is_number_unsigned())
          completion_tokens_.fetch_add(u["completion_tokens"].get<std::uint64_t>());
      }
      return text;
    }
    if (!transient(res->status)) break;
  }
  throw BackendError("chat completion failed with status " + std::to_string(last_status) + ": " + last_body,
                     last_status, last_body);
}

UsageSnapshot LiveBackend::usage() const noexcept {
  return {calls_.load(), retries_.load(), prompt_tokens_.load(), completion_tokens_.load()};
}

}  // namespace echogrid
