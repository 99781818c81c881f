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

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "defpipe/cdi.hpp"
#include "defpipe/ingest.hpp"
#include "defpipe/sdi.hpp"
#include "defpipe/types.hpp"

namespace defpipe::generator {

enum class Backend { kExtractive, kExternal };

std::string_view to_string(Backend b);
Backend parse_backend(std::string_view s);

inline constexpr std::string_view kDefMarker = "[DEF]";
inline constexpr std::string_view kSepMarker = "[SEP]";

struct PipelineConfig {
  std::size_t k = 5;
  std::size_t kprime = 5;
  std::size_t token_budget = 480;
  Backend backend = Backend::kExtractive;
  std::optional<std::string> context;
  bool exclude_self = false;
};

// Throws kInvalidArgument when token_budget is 0.
void validate(const PipelineConfig& config);

// "CDM-S5,C5", "CDM-C5" when k = 0, "CDM-S5" when k' = 0, "CDM" when both are 0.
std::string model_name(const PipelineConfig& config);

struct EncodedInput {
  std::string text;
  std::size_t k_used = 0;
  std::size_t kprime_used = 0;
  bool truncated = false;
  bool has_context = false;

  friend bool operator==(const EncodedInput&, const EncodedInput&) = default;
};

struct GeneratedDefinition {
  Term term;
  std::string text;
  std::string backend_id;
  std::optional<std::vector<double>> token_logprobs;
};

// Collapses whitespace and defuses literal markers: "[DEF]" -> "(DEF)",
// "[SEP]" -> "(SEP)".
std::string sanitize_segment(std::string_view s);

/// `{surface} [DEF] s1 [SEP] ... [SEP] sk [DEF] c1 [SEP] ... [SEP] ck'`.
///
/// A segment with no sentences is omitted together with its marker. Sentences
/// are packed whole, SDI first, in rank order; packing stops at the first
/// sentence whose marker plus tokens would push the whitespace-token count of
/// the text past token_budget, and `truncated` is set.
EncodedInput encode_for_generator(const Term& term, std::span<const sdi::ScoredSentence> sdi,
                                  std::span<const cdi::RelatedDefinition> cdi,
                                  const PipelineConfig& config);

// `{surface} [SEP] {context} [DEF] ...`; context must be nonempty.
EncodedInput encode_context_variant(const Term& term, std::string_view context,
                                    std::span<const sdi::ScoredSentence> sdi,
                                    std::span<const cdi::RelatedDefinition> cdi,
                                    const PipelineConfig& config);

// Context variant when config.context is set, plain scheme otherwise.
EncodedInput encode(const Term& term, std::span<const sdi::ScoredSentence> sdi,
                    std::span<const cdi::RelatedDefinition> cdi, const PipelineConfig& config);

struct ParsedInput {
  std::string surface;
  std::optional<std::string> context;
  std::vector<std::string> sdi;
  std::vector<std::string> cdi;

  friend bool operator==(const ParsedInput&, const ParsedInput&) = default;
};

// Inverse of encode(). A lone [DEF] segment is attributed by k_used.
ParsedInput parse_encoded(const EncodedInput& encoded);

// Highest-ranked SDI sentence verbatim. Throws kNoCandidates when empty.
GeneratedDefinition generate_extractive(const Term& term, std::span<const sdi::ScoredSentence> sdi);

struct DecodeParams {
  std::size_t max_len = 96;
  std::size_t beam_size = 4;
};

/// A sequence-to-sequence model reachable through some transport.
class Seq2SeqBackend {
 public:
  virtual ~Seq2SeqBackend() = default;
  virtual GeneratedDefinition generate(const Term& term, const EncodedInput& input,
                                       const DecodeParams& params) const = 0;
};

// Calls the backend and enforces the response invariants (nonempty text,
// every log-probability <= 0); violations raise kProtocolViolation.
GeneratedDefinition generate_external(const Term& term, const EncodedInput& input,
                                      const Seq2SeqBackend& backend, const DecodeParams& params);

struct Resources {
  const ingest::SentenceIndex* web = nullptr;
  const sdi::SentenceScorer* scorer = nullptr;
  const cdi::Bm25Index* index = nullptr;
  const Seq2SeqBackend* backend = nullptr;
  DecodeParams decode;
};

struct GenerationResult {
  GeneratedDefinition definition;
  EncodedInput encoded;
  std::vector<sdi::ScoredSentence> sdi;
  std::vector<cdi::RelatedDefinition> cdi;
};

/// collect_candidates -> rank_sdi(k) -> retrieve_related(k') -> encode ->
/// backend. The extractive backend always ranks at least one sentence so it
/// can answer with the argmax even when k = 0.
GenerationResult cdm_generate(const Term& term, const Resources& resources,
                              const PipelineConfig& config);

// Batch output record: term, definition, backend_id, k_used, kprime_used,
// truncated.
nlohmann::json to_batch_record(const GenerationResult& result);

}  // namespace defpipe::generator
