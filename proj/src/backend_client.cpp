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

#include "defpipe/backend_client.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "httplib.h"

#include "defpipe/error.hpp"

namespace defpipe::backend {
namespace {

std::string lower(std::string s) {
  for (auto& c : s) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return s;
}

double confidence_value(const nlohmann::json& v) {
  if (!v.is_number()) throw Error(ErrorCode::kProtocolViolation, "confidence is not a number");
  const double c = v.get<double>();
  if (!std::isfinite(c) || c < 0.0 || c > 1.0) {
    throw Error(ErrorCode::kProtocolViolation, "confidence outside [0, 1]");
  }
  return c;
}

}  // namespace

std::chrono::milliseconds RetryPolicy::backoff_before(std::size_t retry) const {
  double ms = static_cast<double>(initial_backoff.count()) *
              std::pow(backoff_multiplier, static_cast<double>(retry));
  ms = std::min(ms, static_cast<double>(max_backoff.count()));
  return std::chrono::milliseconds(static_cast<long long>(ms));
}

Endpoint Endpoint::parse(std::string_view url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string_view::npos || url.substr(0, scheme_end) != "http") {
    throw Error(ErrorCode::kInvalidArgument, "endpoint must be an http:// URL: '" + std::string(url) + "'");
  }
  const auto path_start = url.find('/', scheme_end + 3);
  Endpoint e;
  e.scheme_host_port = std::string(url.substr(0, path_start));
  if (e.scheme_host_port.size() <= scheme_end + 3) {
    throw Error(ErrorCode::kInvalidArgument, "endpoint has no host: '" + std::string(url) + "'");
  }
  if (path_start != std::string_view::npos) {
    e.base_path = std::string(url.substr(path_start));
    while (!e.base_path.empty() && e.base_path.back() == '/') e.base_path.pop_back();
  }
  return e;
}

std::string Endpoint::path(std::string_view route) const { return base_path + std::string(route); }

JsonClient::JsonClient(Endpoint endpoint, RetryPolicy policy)
    : endpoint_(std::move(endpoint)), policy_(policy) {}

JsonReply JsonClient::post(std::string_view route, const nlohmann::json& body) const {
  httplib::Client cli(endpoint_.scheme_host_port);
  cli.set_connection_timeout(policy_.connect_timeout);
  cli.set_read_timeout(policy_.read_timeout);
  cli.set_write_timeout(policy_.read_timeout);
  const auto path = endpoint_.path(route);
  const auto payload = body.dump();

  std::string last_error;
  for (std::size_t attempt = 0; attempt <= policy_.max_retries; ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(policy_.backoff_before(attempt - 1));
    ++attempts_;
    auto res = cli.Post(path, payload, "application/json");
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status == 429 || res->status >= 500) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status < 200 || res->status >= 300) {
      throw Error(ErrorCode::kProtocolViolation,
                  "POST " + path + " returned HTTP " + std::to_string(res->status));
    }
    JsonReply reply;
    try {
      reply.body = nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::parse_error&) {
      throw Error(ErrorCode::kProtocolViolation, "POST " + path + " returned a non-JSON body");
    }
    for (const auto& [name, value] : res->headers) reply.headers.emplace(lower(name), value);
    return reply;
  }
  throw Error(ErrorCode::kBackendUnavailable,
              "backend unavailable: POST " + path + " failed after " +
                  std::to_string(policy_.max_retries + 1) + " attempts (" + last_error + ")");
}

generator::GeneratedDefinition parse_generate_reply(const JsonReply& reply) {
  const auto& b = reply.body;
  if (!b.is_object()) throw Error(ErrorCode::kProtocolViolation, "/generate reply is not an object");
  const auto def = b.find("definition");
  if (def == b.end() || !def->is_string() || def->get<std::string>().empty()) {
    throw Error(ErrorCode::kProtocolViolation, "/generate reply lacks a nonempty definition");
  }
  generator::GeneratedDefinition out;
  out.text = def->get<std::string>();

  if (auto id = b.find("backend_id"); id != b.end() && id->is_string()) {
    out.backend_id = id->get<std::string>();
  } else if (auto h = reply.headers.find("x-backend-id"); h != reply.headers.end()) {
    out.backend_id = h->second;
  } else {
    throw Error(ErrorCode::kProtocolViolation, "/generate reply lacks backend_id");
  }

  if (auto lp = b.find("token_logprobs"); lp != b.end() && !lp->is_null()) {
    if (!lp->is_array()) throw Error(ErrorCode::kProtocolViolation, "token_logprobs is not an array");
    std::vector<double> values;
    for (const auto& v : *lp) {
      if (!v.is_number()) throw Error(ErrorCode::kProtocolViolation, "token_logprobs has a non-number");
      const double x = v.get<double>();
      if (!(x <= 0.0)) throw Error(ErrorCode::kProtocolViolation, "token log-probability above 0");
      values.push_back(x);
    }
    out.token_logprobs = std::move(values);
  }
  return out;
}

HttpGenerator::HttpGenerator(Endpoint endpoint, RetryPolicy policy)
    : client_(std::move(endpoint), policy) {}

generator::GeneratedDefinition HttpGenerator::generate(const Term& term,
                                                       const generator::EncodedInput& input,
                                                       const generator::DecodeParams& params) const {
  const auto reply = client_.post("/generate", {{"input", input.text},
                                                {"max_len", params.max_len},
                                                {"beam_size", params.beam_size}});
  auto out = parse_generate_reply(reply);
  out.term = term;
  return out;
}

HttpScorer::HttpScorer(Endpoint endpoint, RetryPolicy policy) : client_(std::move(endpoint), policy) {}

double HttpScorer::score(const Term& term, const SentenceRecord& sentence) const {
  const auto reply = client_.post("/score", {{"jargon", term.surface}, {"sentence", sentence.text}});
  if (!reply.body.is_object() || !reply.body.contains("confidence")) {
    throw Error(ErrorCode::kProtocolViolation, "/score reply lacks confidence");
  }
  return confidence_value(reply.body.at("confidence"));
}

std::vector<double> HttpScorer::score_batch(const Term& term,
                                            std::span<const SentenceRecord> sentences) const {
  if (sentences.empty()) return {};
  nlohmann::json jargon = nlohmann::json::array();
  nlohmann::json text = nlohmann::json::array();
  for (const auto& s : sentences) {
    jargon.push_back(term.surface);
    text.push_back(s.text);
  }
  const auto reply = client_.post("/score_batch", {{"jargon", jargon}, {"sentence", text}});
  const auto& b = reply.body;
  if (!b.is_object() || !b.contains("confidence") || !b.at("confidence").is_array() ||
      b.at("confidence").size() != sentences.size()) {
    throw Error(ErrorCode::kProtocolViolation, "/score_batch reply does not match the request");
  }
  std::vector<double> out;
  out.reserve(sentences.size());
  for (const auto& v : b.at("confidence")) out.push_back(confidence_value(v));
  return out;
}

}  // namespace defpipe::backend
