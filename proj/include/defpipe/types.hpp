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

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace defpipe {

enum class Field { kCS, kMath, kPhy, kOther };
enum class Source { kEncyclopedia, kWeb };
enum class Label { kPositive, kNegative };
enum class Split { kTrain, kValid, kTest };

std::string_view to_string(Field f);
std::string_view to_string(Source s);
std::string_view to_string(Label l);
std::string_view to_string(Split s);

Field parse_field(std::string_view s);
Source parse_source(std::string_view s);
Label parse_label(std::string_view s);
Split parse_split(std::string_view s);

/// A jargon term. `normalized` is the lowercased, head-lemmatized surface and
/// is the identity used for joins across corpora, indexes and datasets.
struct Term {
  std::string surface;
  std::string normalized;
  Field field = Field::kOther;
  std::uint64_t ref_frequency = 0;

  // Throws kInvalidArgument when the surface normalizes to nothing.
  static Term from_surface(std::string_view surface, Field field = Field::kOther,
                           std::uint64_t ref_frequency = 0);

  friend bool operator==(const Term&, const Term&) = default;
};

struct Section {
  std::string name;
  std::string text;

  friend bool operator==(const Section&, const Section&) = default;
};

struct Document {
  std::string doc_id;
  std::string title;
  Source source = Source::kWeb;
  std::optional<std::string> url;
  std::vector<Section> sections;

  const Section* find_section(std::string_view name) const;

  friend bool operator==(const Document&, const Document&) = default;
};

inline constexpr std::string_view kSummarySection = "summary";

struct SentenceRecord {
  std::string text;
  std::string doc_id;
  Source source = Source::kWeb;
  std::string section;
  bool contains_term = false;

  friend bool operator==(const SentenceRecord&, const SentenceRecord&) = default;
};

struct ExtractionExample {
  Term term;
  SentenceRecord sentence;
  Label label = Label::kNegative;
  Split split = Split::kTrain;

  friend bool operator==(const ExtractionExample&, const ExtractionExample&) = default;
};

struct GenerationExample {
  Term term;
  std::string gold_definition;
  std::vector<SentenceRecord> candidate_sentences;
  Split split = Split::kTrain;

  friend bool operator==(const GenerationExample&, const GenerationExample&) = default;
};

void to_json(nlohmann::json& j, const Term& t);
void from_json(const nlohmann::json& j, Term& t);
void to_json(nlohmann::json& j, const Section& s);
void from_json(const nlohmann::json& j, Section& s);
void to_json(nlohmann::json& j, const Document& d);
void from_json(const nlohmann::json& j, Document& d);
void to_json(nlohmann::json& j, const SentenceRecord& s);
void from_json(const nlohmann::json& j, SentenceRecord& s);
void to_json(nlohmann::json& j, const ExtractionExample& e);
void from_json(const nlohmann::json& j, ExtractionExample& e);
void to_json(nlohmann::json& j, const GenerationExample& e);
void from_json(const nlohmann::json& j, GenerationExample& e);

}  // namespace defpipe
