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

#include <algorithm>
#include <cmath>
#include <thread>

#include "echogrid/errors.hpp"
#include "echogrid/lm.hpp"

namespace echogrid {

std::string_view to_string(CallRole role) noexcept {
  switch (role) {
    case CallRole::Agent: return "agent";
    case CallRole::Summarize: return "summarize";
    case CallRole::IdentifyGoals: return "identify_goals";
    case CallRole::InferTrajectory: return "infer_traj";
    case CallRole::Reflect: return "reflect";
    case CallRole::Workflow: return "workflow";
  }
  return "unknown";
}

void LMRequest::validate() const {
  if (!(params.temperature >= 0.0)) throw ConfigError("temperature must be >= 0");
  if (params.max_new_tokens <= 0) throw ConfigError("max_new_tokens must be > 0");
}

TokenBucket::TokenBucket(double per_minute)
    : per_second_(per_minute / 60.0),
      capacity_(std::max(1.0, per_minute)),
      tokens_(capacity_),
      last_(std::chrono::steady_clock::now()) {
  if (!(per_minute > 0.0)) throw ConfigError("rate limit must be positive");
}

void TokenBucket::acquire() {
  std::unique_lock lock(mu_);
  for (;;) {
    const auto now = std::chrono::steady_clock::now();
    const double elapsed = std::chrono::duration<double>(now - last_).count();
    last_ = now;
    tokens_ = std::min(capacity_, tokens_ + elapsed * per_second_);
    if (tokens_ >= 1.0) {
      tokens_ -= 1.0;
      return;
    }
    const double wait = (1.0 - tokens_) / per_second_;
    lock.unlock();
    std::this_thread::sleep_for(std::chrono::duration<double>(wait));
    lock.lock();
  }
}

std::string extract_completion_text(const nlohmann::json& response) {
  const auto* choices = response.is_object() && response.contains("choices") ? &response["choices"] : nullptr;
  if (!choices || !choices->is_array() || choices->empty()) {
    throw BackendError("response has no choices", 200, response.dump().substr(0, 512));
  }
  const auto& first = (*choices)[0];
  if (!first.is_object() || !first.contains("message") || !first["message"].is_object() ||
      !first["message"].contains("content") || !first["message"]["content"].is_string()) {
    throw BackendError("response has no message content", 200, response.dump().substr(0, 512));
  }
  return first["message"]["content"].get<std::string>();
}

AuditLog::AuditLog(const std::filesystem::path& path) : out_(path, std::ios::app) {
  if (!out_) throw IoError("cannot open audit log " + path.string());
}

void AuditLog::record(const LMRequest& request, const std::string& outcome, bool ok) {
  nlohmann::json messages = nlohmann::json::array();
  for (const auto& m : request.messages) messages.push_back({{"role", m.role}, {"content", m.content}});
  const nlohmann::json entry = {{"role", to_string(request.role)},
                                {"system", request.system_prompt},
                                {"messages", messages},
                                {"temperature", request.params.temperature},
                                {"max_new_tokens", request.params.max_new_tokens},
                                {ok ? "response" : "error", outcome}};
  std::lock_guard lock(mu_);
  out_ << entry.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace) << '\n';
  out_.flush();
}

std::string AuditingBackend::complete(const LMRequest& request) {
  try {
    std::string text = inner_->complete(request);
    log_->record(request, text, true);
    return text;
  } catch (const BackendError& e) {
    log_->record(request, e.what(), false);
    throw;
  }
}

std::string CountingBackend::complete(const LMRequest& request) {
  calls_.fetch_add(1);
  return inner_->complete(request);
}

}  // namespace echogrid
