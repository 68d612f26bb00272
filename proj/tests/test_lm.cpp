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

#include <doctest.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <thread>

#include <httplib.h>

#include "echogrid/errors.hpp"
#include "echogrid/lm.hpp"
#include "echogrid/rng.hpp"

using namespace echogrid;

namespace {

const std::vector<PayloadField> kGoalWorkflow = {{"goal", FieldType::Text}, {"workflow", FieldType::Text}};
const std::vector<PayloadField> kGoals = {{"possible_goals", FieldType::TextList}};

// Local chat-completion stub. `statuses` is consumed one per request; the
// last one repeats.
class StubServer {
 public:
  StubServer(std::vector<int> statuses, std::string content) : statuses_(std::move(statuses)) {
    server_.Post("/v1/chat/completions", [this, content](const httplib::Request& req, httplib::Response& res) {
      const std::size_t i = hits_++;
      bodies_.push_back(req.body);
      auth_ = req.get_header_value("Authorization");
      const int status = statuses_[std::min(i, statuses_.size() - 1)];
      res.status = status;
      if (status == 200) {
        const nlohmann::json body = {
            {"choices", {{{"message", {{"role", "assistant"}, {"content", content}}}}}},
            {"usage", {{"prompt_tokens", 11}, {"completion_tokens", 7}}}};
        res.set_content(body.dump(), "application/json");
      } else {
        res.set_content(R"({"error": "busy"})", "application/json");
      }
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~StubServer() {
    server_.stop();
    thread_.join();
  }

  LiveConfig config() const {
    LiveConfig c;
    c.base_url = "http://127.0.0.1:" + std::to_string(port_) + "/v1";
    c.api_key = "test-key";
    c.model = "stub-model";
    c.timeout = std::chrono::milliseconds(5000);
    c.initial_backoff = std::chrono::milliseconds(1);
    c.log = [](const std::string&) {};
    return c;
  }

  std::size_t hits() const { return hits_.load(); }
  const std::vector<std::string>& bodies() const { return bodies_; }
  const std::string& auth() const { return auth_; }

 private:
  httplib::Server server_;
  std::vector<int> statuses_;
  std::atomic<std::size_t> hits_{0};
  std::vector<std::string> bodies_;
  std::string auth_;
  int port_ = 0;
  std::thread thread_;
};

LMRequest sample_request() {
  return LMRequest{CallRole::Agent, "system text", {{"user", "hello"}}, LMParams{}};
}

}  // namespace

TEST_CASE("parse_choice") {
  SUBCASE("plain object") {
    const auto p = parse_choice(R"({"thought": "go to door", "choice": 2})");
    REQUIRE(p);
    CHECK(p.value() == ParsedChoice{"go to door", 2});
  }
  SUBCASE("fenced block with prose") {
    const auto p = parse_choice("Sure!\n```json\n{\"thought\": \"go to door\", \"choice\": 2}\n```\n");
    REQUIRE(p);
    CHECK(p.value() == ParsedChoice{"go to door", 2});
  }
  SUBCASE("integer coercion") {
    CHECK(parse_choice(R"({"thought": "", "choice": "4"})").value().choice == 4);
    CHECK(parse_choice(R"({"thought": "", "choice": 3.0})").value().choice == 3);
    CHECK_FALSE(parse_choice(R"({"thought": "", "choice": 3.5})"));
    CHECK_FALSE(parse_choice(R"({"thought": "", "choice": "two"})"));
    CHECK_FALSE(parse_choice(R"({"thought": "", "choice": 1e300})"));
    CHECK_FALSE(parse_choice(R"({"thought": "", "choice": null})"));
  }
  SUBCASE("missing keys are named") {
    const auto p = parse_choice(R"({"thought": "x"})");
    REQUIRE_FALSE(p);
    CHECK(p.error().missing_key == "choice");
  }
  SUBCASE("skips braces that are not objects") {
    const auto p = parse_choice(R"(set {a, b} then {"thought": "t", "choice": 1})");
    REQUIRE(p);
    CHECK(p.value().choice == 1);
  }
  SUBCASE("braces inside strings do not confuse extraction") {
    const auto p = parse_choice(R"({"thought": "a } brace", "choice": 5})");
    REQUIRE(p);
    CHECK(p.value().thought == "a } brace");
  }
  CHECK_FALSE(parse_choice("no braces at all"));
  CHECK_FALSE(parse_choice(""));
}

TEST_CASE("parse_json_payload") {
  SUBCASE("failure workflow") {
    const auto p = parse_json_payload("{\n  \"goal\": \"Pick up grey key.\",\n  \"workflow\": \"\"\n}", kGoalWorkflow);
    REQUIRE(p);
    CHECK(std::get<std::string>(p.value().at("goal")) == "Pick up grey key.");
    CHECK(std::get<std::string>(p.value().at("workflow")).empty());
  }
  SUBCASE("goal list") {
    const auto p = parse_json_payload(R"({"possible_goals": ["Pick up the grey star"]})", kGoals);
    REQUIRE(p);
    CHECK(std::get<std::vector<std::string>>(p.value().at("possible_goals")) ==
          std::vector<std::string>{"Pick up the grey star"});
  }
  SUBCASE("missing key") {
    const auto p = parse_json_payload(R"({"goal": "x"})", kGoalWorkflow);
    REQUIRE_FALSE(p);
    CHECK(p.error().missing_key == "workflow");
  }
  SUBCASE("wrong types") {
    CHECK_FALSE(parse_json_payload(R"({"possible_goals": "one"})", kGoals));
    CHECK_FALSE(parse_json_payload(R"({"possible_goals": [1]})", kGoals));
    CHECK_FALSE(parse_json_payload(R"({"goal": 1, "workflow": ""})", kGoalWorkflow));
  }
  CHECK_FALSE(parse_json_payload("text with no braces", kGoalWorkflow));
}

TEST_CASE("parsers are total on random text") {
  Rng rng(1);
  const std::string alphabet = "{}[]\":,0123456789.-+eE tfnulrachoiwkgs\\\n\x01\xff";
  for (int i = 0; i < 2000; ++i) {
    std::string s;
    const auto n = rng.below(80);
    for (std::uint64_t k = 0; k < n; ++k) s += alphabet[rng.below(alphabet.size())];
    CHECK_NOTHROW((void)parse_choice(s));
    CHECK_NOTHROW((void)parse_json_payload(s, kGoalWorkflow));
  }
}

TEST_CASE("request validation") {
  LMRequest r = sample_request();
  CHECK_NOTHROW(r.validate());
  r.params.temperature = -0.1;
  CHECK_THROWS_AS(r.validate(), ConfigError);
  r.params.temperature = 0;
  r.params.max_new_tokens = 0;
  CHECK_THROWS_AS(r.validate(), ConfigError);
}

TEST_CASE("live backend against a local stub") {
  SUBCASE("well-formed response returns the stub's payload and request body is OpenAI-shaped") {
    StubServer stub({200}, R"({"thought": "t", "choice": 1})");
    LiveBackend b(stub.config());
    CHECK(b.complete(sample_request()) == R"({"thought": "t", "choice": 1})");
    REQUIRE(stub.bodies().size() == 1);
    const auto body = nlohmann::json::parse(stub.bodies()[0]);
    CHECK(body == nlohmann::json::parse(R"({"model": "stub-model", "messages": [
        {"role": "system", "content": "system text"}, {"role": "user", "content": "hello"}],
        "temperature": 0.0, "max_tokens": 4000})"));
    CHECK(stub.auth() == "Bearer test-key");
    const auto u = b.usage();
    CHECK(u.calls == 1);
    CHECK(u.retries == 0);
    CHECK(u.prompt_tokens == 11);
    CHECK(u.completion_tokens == 7);
  }
  SUBCASE("429 then 200 retries once") {
    StubServer stub({429, 200}, "ok");
    std::vector<std::string> notes;
    auto c = stub.config();
    c.log = [&](const std::string& s) { notes.push_back(s); };
    LiveBackend b(c);
    CHECK(b.complete(sample_request()) == "ok");
    CHECK(stub.hits() == 2);
    CHECK(b.usage().retries == 1);
    CHECK(notes.size() == 1);
  }
  SUBCASE("persistent 500 fails after three attempts") {
    StubServer stub({500}, "");
    LiveBackend b(stub.config());
    try {
      b.complete(sample_request());
      FAIL("expected BackendError");
    } catch (const BackendError& e) {
      CHECK(e.http_status() == 500);
      CHECK(e.body().find("busy") != std::string::npos);
    }
    CHECK(stub.hits() == 3);
  }
  SUBCASE("non-transient status fails without retry") {
    StubServer stub({401}, "");
    LiveBackend b(stub.config());
    CHECK_THROWS_AS(b.complete(sample_request()), BackendError);
    CHECK(stub.hits() == 1);
  }
  SUBCASE("transport errors are retried then reported") {
    LiveConfig c;
    c.base_url = "http://127.0.0.1:1";
    c.api_key = "k";
    c.initial_backoff = std::chrono::milliseconds(1);
    c.timeout = std::chrono::milliseconds(500);
    c.log = [](const std::string&) {};
    LiveBackend b(c);
    CHECK_THROWS_AS(b.complete(sample_request()), BackendError);
    CHECK(b.usage().retries == 2);
  }
}

TEST_CASE("live configuration") {
  LiveConfig c;
  c.api_key = "k";
  c.base_url = "not a url";
  CHECK_THROWS_AS(LiveBackend{c}, ConfigError);
  ::unsetenv("LM_API_KEY");
  CHECK_THROWS_AS(LiveConfig::from_env(), ConfigError);
  ::setenv("LM_API_KEY", "abc", 1);
  ::setenv("LM_MODEL", "m", 1);
  const auto from = LiveConfig::from_env();
  CHECK(from.api_key == "abc");
  CHECK(from.model == "m");
  ::unsetenv("LM_API_KEY");
  ::unsetenv("LM_MODEL");
}

TEST_CASE("completion text extraction") {
  CHECK(extract_completion_text(nlohmann::json::parse(R"({"choices":[{"message":{"content":"hi"}}]})")) == "hi");
  CHECK_THROWS_AS(extract_completion_text(nlohmann::json::parse(R"({"choices":[]})")), BackendError);
  CHECK_THROWS_AS(extract_completion_text(nlohmann::json::parse(R"({})")), BackendError);
}

namespace {

class FixedBackend : public LMBackend {
 public:
  std::string complete(const LMRequest&) override { return "reply"; }
  BackendCapabilities capabilities() const override { return {true, false}; }
};

class FailingBackend : public LMBackend {
 public:
  std::string complete(const LMRequest&) override { throw BackendError("down", 503); }
  BackendCapabilities capabilities() const override { return {true, false}; }
};

}  // namespace

TEST_CASE("auditing and counting wrappers") {
  const auto path = std::filesystem::temp_directory_path() / "echogrid_audit_test.jsonl";
  std::filesystem::remove(path);
  {
    auto log = std::make_shared<AuditLog>(path);
    AuditingBackend ok(std::make_shared<FixedBackend>(), log);
    AuditingBackend bad(std::make_shared<FailingBackend>(), log);
    CHECK(ok.complete(sample_request()) == "reply");
    CHECK_THROWS_AS(bad.complete(sample_request()), BackendError);
  }
  std::ifstream in(path);
  std::string a, b;
  std::getline(in, a);
  std::getline(in, b);
  CHECK(nlohmann::json::parse(a).at("response") == "reply");
  CHECK(nlohmann::json::parse(b).contains("error"));
  std::filesystem::remove(path);

  CountingBackend counter(std::make_shared<FixedBackend>());
  std::vector<std::thread> threads;
  for (int t = 0; t < 4; ++t) {
    threads.emplace_back([&] {
      for (int i = 0; i < 100; ++i) counter.complete(sample_request());
    });
  }
  for (auto& t : threads) t.join();
  CHECK(counter.calls() == 400);
}

TEST_CASE("token bucket admits a burst up to its capacity") {
  TokenBucket bucket(6000);
  const auto start = std::chrono::steady_clock::now();
  for (int i = 0; i < 20; ++i) bucket.acquire();
  CHECK(std::chrono::steady_clock::now() - start < std::chrono::seconds(1));
}
