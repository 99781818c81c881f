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

#include "defpipe/generator.hpp"

#include <algorithm>
#include <cmath>

#include "defpipe/error.hpp"
#include "defpipe/text.hpp"

namespace defpipe::generator {
namespace {

constexpr std::string_view kDefJoin = " [DEF] ";
constexpr std::string_view kSepJoin = " [SEP] ";

void replace_all(std::string& s, std::string_view from, std::string_view to) {
  std::size_t pos = 0;
  while ((pos = s.find(from, pos)) != std::string::npos) {
    s.replace(pos, from.size(), to);
    pos += to.size();
  }
}

std::vector<std::string> split_on(std::string_view s, std::string_view delim) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(delim, start);
    if (pos == std::string_view::npos) {
      out.emplace_back(s.substr(start));
      return out;
    }
    out.emplace_back(s.substr(start, pos - start));
    start = pos + delim.size();
  }
}

std::string join(const std::vector<std::string>& parts, std::string_view delim) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += delim;
    out += parts[i];
  }
  return out;
}

EncodedInput encode_impl(const Term& term, std::optional<std::string_view> context,
                         std::span<const sdi::ScoredSentence> sdi,
                         std::span<const cdi::RelatedDefinition> cdi,
                         const PipelineConfig& config) {
  validate(config);
  EncodedInput out;
  std::string header = sanitize_segment(term.surface);
  if (context) {
    const auto ctx = sanitize_segment(*context);
    if (ctx.empty()) throw Error(ErrorCode::kInvalidArgument, "context must be nonempty");
    header += kSepJoin;
    header += ctx;
    out.has_context = true;
  }

  std::size_t tokens = text::whitespace_token_count(header);
  std::vector<std::string> sdi_used;
  std::vector<std::string> cdi_used;
  auto pack = [&](std::string_view raw, std::vector<std::string>& segment) {
    auto sentence = sanitize_segment(raw);
    if (sentence.empty()) return true;
    const std::size_t cost = 1 + text::whitespace_token_count(sentence);
    if (tokens + cost > config.token_budget) {
      out.truncated = true;
      return false;
    }
    tokens += cost;
    segment.push_back(std::move(sentence));
    return true;
  };

  bool open = true;
  for (std::size_t i = 0; open && i < std::min(config.k, sdi.size()); ++i) {
    open = pack(sdi[i].sentence.text, sdi_used);
  }
  for (std::size_t i = 0; open && i < std::min(config.kprime, cdi.size()); ++i) {
    open = pack(cdi[i].definition, cdi_used);
  }

  out.text = std::move(header);
  if (!sdi_used.empty()) {
    out.text += kDefJoin;
    out.text += join(sdi_used, kSepJoin);
  }
  if (!cdi_used.empty()) {
    out.text += kDefJoin;
    out.text += join(cdi_used, kSepJoin);
  }
  out.k_used = sdi_used.size();
  out.kprime_used = cdi_used.size();
  return out;
}

}  // namespace

std::string_view to_string(Backend b) { return b == Backend::kExtractive ? "extractive" : "external"; }

Backend parse_backend(std::string_view s) {
  if (s == "extractive") return Backend::kExtractive;
  if (s == "external") return Backend::kExternal;
  throw Error(ErrorCode::kInvalidArgument, "unknown backend '" + std::string(s) + "'");
}

void validate(const PipelineConfig& config) {
  if (config.token_budget == 0) {
    throw Error(ErrorCode::kInvalidArgument, "token_budget must be positive");
  }
}

std::string model_name(const PipelineConfig& config) {
  std::string name = "CDM";
  if (config.k > 0) name += "-S" + std::to_string(config.k);
  if (config.kprime > 0) name += (config.k > 0 ? ",C" : "-C") + std::to_string(config.kprime);
  return name;
}

std::string sanitize_segment(std::string_view s) {
  auto out = text::collapse_whitespace(s);
  replace_all(out, kDefMarker, "(DEF)");
  replace_all(out, kSepMarker, "(SEP)");
  return out;
}

EncodedInput encode_for_generator(const Term& term, std::span<const sdi::ScoredSentence> sdi,
                                  std::span<const cdi::RelatedDefinition> cdi,
                                  const PipelineConfig& config) {
  return encode_impl(term, std::nullopt, sdi, cdi, config);
}

EncodedInput encode_context_variant(const Term& term, std::string_view context,
                                    std::span<const sdi::ScoredSentence> sdi,
                                    std::span<const cdi::RelatedDefinition> cdi,
                                    const PipelineConfig& config) {
  return encode_impl(term, context, sdi, cdi, config);
}

EncodedInput encode(const Term& term, std::span<const sdi::ScoredSentence> sdi,
                    std::span<const cdi::RelatedDefinition> cdi, const PipelineConfig& config) {
  if (config.context) return encode_context_variant(term, *config.context, sdi, cdi, config);
  return encode_for_generator(term, sdi, cdi, config);
}

ParsedInput parse_encoded(const EncodedInput& encoded) {
  const auto parts = split_on(encoded.text, kDefJoin);
  ParsedInput out;
  if (encoded.has_context) {
    const auto pos = parts[0].find(kSepJoin);
    if (pos == std::string::npos) {
      throw Error(ErrorCode::kParse, "context-encoded input lacks a [SEP] after the surface");
    }
    out.surface = parts[0].substr(0, pos);
    out.context = parts[0].substr(pos + kSepJoin.size());
  } else {
    out.surface = parts[0];
  }
  if (parts.size() > 3) throw Error(ErrorCode::kParse, "encoded input has more than two [DEF] segments");
  if (parts.size() == 3) {
    out.sdi = split_on(parts[1], kSepJoin);
    out.cdi = split_on(parts[2], kSepJoin);
  } else if (parts.size() == 2) {
    (encoded.k_used > 0 ? out.sdi : out.cdi) = split_on(parts[1], kSepJoin);
  }
  return out;
}

GeneratedDefinition generate_extractive(const Term& term, std::span<const sdi::ScoredSentence> sdi) {
  if (sdi.empty() || sdi.front().sentence.text.empty()) {
    throw Error(ErrorCode::kNoCandidates, "no candidates for '" + term.surface + "'");
  }
  return GeneratedDefinition{term, sdi.front().sentence.text, "extractive", std::nullopt};
}

GeneratedDefinition generate_external(const Term& term, const EncodedInput& input,
                                      const Seq2SeqBackend& backend, const DecodeParams& params) {
  auto out = backend.generate(term, input, params);
  if (out.text.empty()) throw Error(ErrorCode::kProtocolViolation, "backend returned an empty definition");
  if (out.token_logprobs) {
    for (double lp : *out.token_logprobs) {
      if (!(lp <= 0.0)) {
        throw Error(ErrorCode::kProtocolViolation, "backend returned a log-probability above 0");
      }
    }
  }
  out.term = term;
  return out;
}

GenerationResult cdm_generate(const Term& term, const Resources& resources,
                              const PipelineConfig& config) {
  validate(config);
  const bool extractive = config.backend == Backend::kExtractive;
  if (!extractive && !resources.backend) {
    throw Error(ErrorCode::kBackendUnavailable, "external backend requested but none configured");
  }

  GenerationResult result;
  std::vector<SentenceRecord> candidates;
  if (resources.web) candidates = sdi::collect_candidates(term, *resources.web);
  const std::size_t rank_k = extractive ? std::max<std::size_t>(config.k, 1) : config.k;
  if (rank_k > 0 && !candidates.empty()) {
    if (!resources.scorer) throw Error(ErrorCode::kInvalidArgument, "no sentence scorer configured");
    result.sdi = sdi::rank_sdi(term, candidates, rank_k, *resources.scorer);
  }
  if (resources.index && config.kprime > 0) {
    result.cdi = cdi::retrieve_related(*resources.index, term, config.kprime, config.exclude_self);
  }

  const auto sdi_for_encoding =
      std::span<const sdi::ScoredSentence>(result.sdi).first(std::min(config.k, result.sdi.size()));
  result.encoded = encode(term, sdi_for_encoding, result.cdi, config);
  result.definition = extractive ? generate_extractive(term, result.sdi)
                                 : generate_external(term, result.encoded, *resources.backend,
                                                     resources.decode);
  return result;
}

nlohmann::json to_batch_record(const GenerationResult& result) {
  return {{"term", result.definition.term.surface},
          {"definition", result.definition.text},
          {"backend_id", result.definition.backend_id},
          {"k_used", result.encoded.k_used},
          {"kprime_used", result.encoded.kprime_used},
          {"truncated", result.encoded.truncated}};
}

}  // namespace defpipe::generator
