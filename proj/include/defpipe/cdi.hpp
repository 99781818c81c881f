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
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "defpipe/types.hpp"

// Correlative definitional information: definitions of related core terms,
// retrieved with an embedded Okapi BM25 index.
namespace defpipe::cdi {

struct CoreTermEntry {
  Term term;
  std::string definition;
  std::vector<std::string> doc_tokens;

  // Indexed text is the title followed by the definition.
  static CoreTermEntry make(Term term, std::string definition);
};

struct Posting {
  std::uint32_t entry = 0;
  std::uint32_t tf = 0;
};

inline constexpr double kDefaultK1 = 1.2;
inline constexpr double kDefaultB = 0.75;

/// Immutable BM25 index. IDF is ln(1 + (N - df + 0.5) / (df + 0.5)), which
/// keeps every score non-negative.
///
/// On-disk layout (JSONL):
///   line 1      {"format":"cdi-index","version":1,"k1":..,"b":..,"n_docs":N,
///                "avg_doc_length":..[, "provenance":{...}]}
///   next N      {"entry":i,"term":{...},"definition":str,"length":L}
///   remaining   {"token":t,"postings":[[entry,tf],...]} sorted by token
class Bm25Index {
 public:
  // Throws kEmptyIndex for no entries, kInvalidArgument for bad k1/b.
  static Bm25Index build(std::vector<CoreTermEntry> entries, double k1 = kDefaultK1,
                         double b = kDefaultB);

  std::size_t n_docs() const { return entries_.size(); }
  double avg_doc_length() const { return avg_doc_length_; }
  double k1() const { return k1_; }
  double b() const { return b_; }
  const CoreTermEntry& entry(std::size_t id) const { return entries_.at(id); }
  std::uint32_t doc_length(std::size_t id) const { return doc_lengths_.at(id); }

  std::span<const Posting> postings(const std::string& token) const;
  std::size_t document_frequency(const std::string& token) const { return postings(token).size(); }
  std::uint32_t term_frequency(const std::string& token, std::size_t entry) const;
  double idf(const std::string& token) const;

  // One query token's contribution to one entry's score.
  double contribution(double idf, std::uint32_t tf, std::uint32_t doc_length) const;

  std::size_t vocabulary_size() const { return postings_.size(); }

  void save(std::ostream& out, const std::optional<nlohmann::json>& provenance = std::nullopt) const;
  static Bm25Index load(std::istream& in);

 private:
  std::vector<CoreTermEntry> entries_;
  std::vector<std::uint32_t> doc_lengths_;
  std::unordered_map<std::string, std::vector<Posting>> postings_;
  double avg_doc_length_ = 0;
  double k1_ = kDefaultK1;
  double b_ = kDefaultB;
};

// Unknown tokens contribute 0. Repeated query tokens count repeatedly.
double bm25_score(const Bm25Index& index, std::span<const std::string> query_tokens,
                  std::size_t entry_id);

struct RelatedDefinition {
  Term term;
  std::string definition;
  double relevance = 0.0;

  friend bool operator==(const RelatedDefinition&, const RelatedDefinition&) = default;
};

std::vector<std::string> query_tokens(const Term& target);

/// Entries with a positive score, ordered by score descending, ties by
/// normalized term then surface. With `exclude_self` the entry whose
/// normalized term equals the target's is dropped before truncation to k.
std::vector<RelatedDefinition> retrieve_related(const Bm25Index& index, const Term& target,
                                                std::size_t k, bool exclude_self);

// Core-term input: JSONL {"surface": str, "definition": str[, "field": str]}.
std::vector<CoreTermEntry> read_core_terms(std::istream& in);

// First summary sentence of each encyclopedia document, keyed by its title.
std::vector<CoreTermEntry> core_terms_from_encyclopedia(std::span<const Document> docs);

}  // namespace defpipe::cdi
