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

#include "defpipe/types.hpp"

#include "defpipe/error.hpp"
#include "defpipe/text.hpp"

namespace defpipe {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kIo: return "io";
    case ErrorCode::kParse: return "parse";
    case ErrorCode::kEmptyIndex: return "empty_index";
    case ErrorCode::kDegenerateTraining: return "degenerate_training";
    case ErrorCode::kVersionMismatch: return "version_mismatch";
    case ErrorCode::kNoCandidates: return "no_candidates";
    case ErrorCode::kBackendUnavailable: return "backend_unavailable";
    case ErrorCode::kProtocolViolation: return "protocol_violation";
    case ErrorCode::kInvariant: return "invariant";
  }
  return "unknown";
}

std::string_view to_string(Field f) {
  switch (f) {
    case Field::kCS: return "cs";
    case Field::kMath: return "math";
    case Field::kPhy: return "phy";
    case Field::kOther: return "other";
  }
  return "other";
}

std::string_view to_string(Source s) {
  return s == Source::kEncyclopedia ? "encyclopedia" : "web";
}

std::string_view to_string(Label l) { return l == Label::kPositive ? "positive" : "negative"; }

std::string_view to_string(Split s) {
  switch (s) {
    case Split::kTrain: return "train";
    case Split::kValid: return "valid";
    case Split::kTest: return "test";
  }
  return "train";
}

Field parse_field(std::string_view s) {
  if (s == "cs") return Field::kCS;
  if (s == "math") return Field::kMath;
  if (s == "phy") return Field::kPhy;
  if (s == "other") return Field::kOther;
  throw Error(ErrorCode::kParse, "unknown field '" + std::string(s) + "'");
}

Source parse_source(std::string_view s) {
  if (s == "encyclopedia") return Source::kEncyclopedia;
  if (s == "web") return Source::kWeb;
  throw Error(ErrorCode::kParse, "unknown source '" + std::string(s) + "'");
}

Label parse_label(std::string_view s) {
  if (s == "positive") return Label::kPositive;
  if (s == "negative") return Label::kNegative;
  throw Error(ErrorCode::kParse, "unknown label '" + std::string(s) + "'");
}

Split parse_split(std::string_view s) {
  if (s == "train") return Split::kTrain;
  if (s == "valid") return Split::kValid;
  if (s == "test") return Split::kTest;
  throw Error(ErrorCode::kParse, "unknown split '" + std::string(s) + "'");
}

Term Term::from_surface(std::string_view surface, Field field, std::uint64_t ref_frequency) {
  Term t;
  t.surface = text::collapse_whitespace(surface);
  t.normalized = text::normalize_term(surface);
  if (t.normalized.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                "term '" + std::string(surface) + "' has an empty normalized form");
  }
  t.field = field;
  t.ref_frequency = ref_frequency;
  return t;
}

const Section* Document::find_section(std::string_view name) const {
  for (const auto& s : sections) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

void to_json(nlohmann::json& j, const Term& t) {
  j = nlohmann::json{{"surface", t.surface},
                     {"normalized", t.normalized},
                     {"field", to_string(t.field)},
                     {"ref_frequency", t.ref_frequency}};
}

void from_json(const nlohmann::json& j, Term& t) {
  const auto field = parse_field(j.value("field", std::string("other")));
  const auto freq = j.value("ref_frequency", std::uint64_t{0});
  t = Term::from_surface(j.at("surface").get<std::string>(), field, freq);
  if (auto it = j.find("normalized"); it != j.end() && it->is_string() &&
                                       !it->get<std::string>().empty()) {
    t.normalized = it->get<std::string>();
  }
}

void to_json(nlohmann::json& j, const Section& s) {
  j = nlohmann::json{{"name", s.name}, {"text", s.text}};
}

void from_json(const nlohmann::json& j, Section& s) {
  s.name = j.at("name").get<std::string>();
  s.text = j.at("text").get<std::string>();
}

void to_json(nlohmann::json& j, const Document& d) {
  j = nlohmann::json{{"doc_id", d.doc_id},
                     {"title", d.title},
                     {"source", to_string(d.source)},
                     {"url", d.url ? nlohmann::json(*d.url) : nlohmann::json(nullptr)},
                     {"sections", d.sections}};
}

void from_json(const nlohmann::json& j, Document& d) {
  d.doc_id = j.at("doc_id").get<std::string>();
  d.title = j.at("title").get<std::string>();
  d.source = parse_source(j.at("source").get<std::string>());
  const auto url = j.find("url");
  d.url = (url == j.end() || url->is_null()) ? std::nullopt
                                             : std::optional(url->get<std::string>());
  d.sections = j.at("sections").get<std::vector<Section>>();
}

void to_json(nlohmann::json& j, const SentenceRecord& s) {
  j = nlohmann::json{{"text", s.text},
                     {"doc_id", s.doc_id},
                     {"source", to_string(s.source)},
                     {"section", s.section},
                     {"contains_term", s.contains_term}};
}

void from_json(const nlohmann::json& j, SentenceRecord& s) {
  s.text = j.at("text").get<std::string>();
  s.doc_id = j.at("doc_id").get<std::string>();
  s.source = parse_source(j.at("source").get<std::string>());
  s.section = j.at("section").get<std::string>();
  s.contains_term = j.at("contains_term").get<bool>();
}

void to_json(nlohmann::json& j, const ExtractionExample& e) {
  j = nlohmann::json{{"term", e.term},
                     {"sentence", e.sentence},
                     {"label", to_string(e.label)},
                     {"split", to_string(e.split)}};
}

void from_json(const nlohmann::json& j, ExtractionExample& e) {
  e.term = j.at("term").get<Term>();
  e.sentence = j.at("sentence").get<SentenceRecord>();
  e.label = parse_label(j.at("label").get<std::string>());
  e.split = parse_split(j.at("split").get<std::string>());
}

void to_json(nlohmann::json& j, const GenerationExample& e) {
  j = nlohmann::json{{"term", e.term},
                     {"gold_definition", e.gold_definition},
                     {"candidate_sentences", e.candidate_sentences},
                     {"split", to_string(e.split)}};
}

void from_json(const nlohmann::json& j, GenerationExample& e) {
  e.term = j.at("term").get<Term>();
  e.gold_definition = j.at("gold_definition").get<std::string>();
  e.candidate_sentences = j.at("candidate_sentences").get<std::vector<SentenceRecord>>();
  e.split = parse_split(j.at("split").get<std::string>());
}

}  // namespace defpipe
