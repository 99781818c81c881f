/*
 * Copyright 2026 The defpipe Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <atomic>
#include <chrono>
#include <cstddef>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "defpipe/generator.hpp"
#include "defpipe/sdi.hpp"

// HTTP/JSON clients for the neural scorer and generator service.
//
//   POST /score        {"jargon": str, "sentence": str} -> {"confidence": float}
//   POST /score_batch  {"jargon": [str], "sentence": [str]} -> {"confidence": [float]}
//   POST /generate     {"input": str, "max_len": int, "beam_size": int}
//                      -> {"definition": str, "token_logprobs": [float]|null,
//                          "backend_id": str}
namespace defpipe::backend {

struct RetryPolicy {
  std::size_t max_retries = 2;
  std::chrono::milliseconds initial_backoff{100};
  double backoff_multiplier = 2.0;
  std::chrono::milliseconds max_backoff{2000};
  std::chrono::milliseconds connect_timeout{5000};
  std::chrono::milliseconds read_timeout{60000};

  std::chrono::milliseconds backoff_before(std::size_t retry) const;
};

struct Endpoint {
  std::string scheme_host_port;
  std::string base_path;

  // Accepts "http://host:port[/prefix]". Throws kInvalidArgument otherwise.
  static Endpoint parse(std::string_view url);
  std::string path(std::string_view route) const;
};

struct JsonReply {
  nlohmann::json body;
  // Header names lowercased.
  std::map<std::string, std::string> headers;
};

/// POSTs JSON with retries. Connection failures, 429 and 5xx are retried up to
/// max_retries times (so at most max_retries + 1 attempts) before
/// kBackendUnavailable. Other non-2xx statuses and unparsable bodies raise
/// kProtocolViolation immediately.
class JsonClient {
 public:
  JsonClient(Endpoint endpoint, RetryPolicy policy);

  JsonReply post(std::string_view route, const nlohmann::json& body) const;

  std::size_t attempts() const { return attempts_.load(); }
  const Endpoint& endpoint() const { return endpoint_; }

 private:
  Endpoint endpoint_;
  RetryPolicy policy_;
  mutable std::atomic<std::size_t> attempts_{0};
};

// Checks a /generate reply against the wire schema. backend_id is taken from
// the body, falling back to the X-Backend-Id header.
generator::GeneratedDefinition parse_generate_reply(const JsonReply& reply);

class HttpGenerator final : public generator::Seq2SeqBackend {
 public:
  HttpGenerator(Endpoint endpoint, RetryPolicy policy = {});

  generator::GeneratedDefinition generate(const Term& term, const generator::EncodedInput& input,
                                          const generator::DecodeParams& params) const override;

  const JsonClient& client() const { return client_; }

 private:
  JsonClient client_;
};

/// Remote scorer. The backend is responsible for the "[CLS] jargon [DEF]
/// sentence" concatenation; term and sentence travel as separate fields.
class HttpScorer final : public sdi::SentenceScorer {
 public:
  HttpScorer(Endpoint endpoint, RetryPolicy policy = {});

  double score(const Term& term, const SentenceRecord& sentence) const;
  std::vector<double> score_batch(const Term& term,
                                  std::span<const SentenceRecord> sentences) const override;

  const JsonClient& client() const { return client_; }

 private:
  JsonClient client_;
};

}  // namespace defpipe::backend
