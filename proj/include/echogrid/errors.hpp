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

#include <stdexcept>
#include <string>

namespace echogrid {

// Base of every exception thrown by the core library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration or a request the model cannot satisfy.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Malformed persisted data (JSONL logs, snapshots, CSV).
class FormatError : public Error {
 public:
  using Error::Error;
};

class RangeError : public Error {
 public:
  using Error::Error;
};

// A language-model backend failed to produce a completion.
// Bad command-line style input: a count of zero, a missing required flag.
class UsageError : public Error {
 public:
  using Error::Error;
};

class BackendError : public Error {
 public:
  BackendError(const std::string& what, int http_status = 0, std::string body = {})
      : Error(what), http_status_(http_status), body_(std::move(body)) {}

  int http_status() const noexcept { return http_status_; }
  const std::string& body() const noexcept { return body_; }

 private:
  int http_status_;
  std::string body_;
};

// The policy could not produce an action (unparseable output after retry,
// backend failure). Aborts the episode, never the run.
class PolicyError : public Error {
 public:
  explicit PolicyError(const std::string& what, int lm_calls = 0)
      : Error(what), lm_calls_(lm_calls) {}

  // LM requests spent on the failed decision.
  int lm_calls() const noexcept { return lm_calls_; }

 private:
  int lm_calls_;
};

}  // namespace echogrid
