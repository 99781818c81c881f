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
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "defpipe/text.hpp"
#include "defpipe/types.hpp"

namespace defpipe::ingest {

struct ParseResult {
  std::vector<Document> documents;
  std::size_t skipped = 0;
  std::vector<std::string> warnings;
};

/// Reads a JSONL corpus (one document per line). Records that fail to parse,
/// declare a different source, repeat a doc_id, or (for encyclopedia input)
/// lack a "summary" section are skipped and counted. Throws kIo when the
/// stream itself cannot be read.
ParseResult parse_corpus(std::istream& in, Source source);

inline std::vector<std::string> split_sentences(std::string_view text) {
  return text::split_sentences(text);
}

/// Sentence-segmented view of a corpus with a token inverted index, so term
/// lookups touch only sentences sharing the term's rarest token.
class SentenceIndex {
 public:
  struct Entry {
    std::uint32_t doc = 0;
    std::string section;
    std::string text;
    std::vector<std::string> lemmas;
  };

  SentenceIndex() = default;
  explicit SentenceIndex(std::span<const Document> docs);

  std::size_t size() const { return entries_.size(); }
  const Entry& entry(std::size_t id) const { return entries_[id]; }
  const std::string& doc_id(std::size_t id) const { return doc_ids_[entries_[id].doc]; }
  Source source(std::size_t id) const { return sources_[entries_[id].doc]; }

  // Ids of sentences containing the term, ascending (corpus order).
  std::vector<std::size_t> mentions(const Term& term) const;

  SentenceRecord record(std::size_t id, bool contains_term) const;

 private:
  std::vector<std::string> doc_ids_;
  std::vector<Source> sources_;
  std::vector<Entry> entries_;
  std::unordered_map<std::string, std::vector<std::uint32_t>> postings_;
};

std::uint64_t term_frequency(const Term& term, const SentenceIndex& corpus);
std::uint64_t term_frequency(const Term& term, std::span<const Document> corpus);

// Sentences mentioning the term, restricted to one source when given, in
// corpus order and deduplicated by normalized text (first occurrence wins).
std::vector<SentenceRecord> find_mentions(const Term& term, const SentenceIndex& corpus,
                                          std::optional<Source> only = std::nullopt);

struct SplitRatios {
  double train = 0.8;
  double valid = 0.1;
  double test = 0.1;
};

void validate(const SplitRatios& ratios);

// Seeded shuffle of `n` units followed by a ratio cut. Result is indexed by
// unit; counts are round(n*train), round(n*valid), remainder.
std::vector<Split> assign_splits(std::size_t n, const SplitRatios& ratios, std::uint64_t seed);

struct ExtractionOptions {
  std::uint64_t min_freq = 5;
  std::size_t max_negatives = 5;
  SplitRatios ratios;
  std::uint64_t seed = 0;
};

/// Positive = first summary sentence of the term's encyclopedia page;
/// negatives = up to `max_negatives` sentences mentioning the term in other
/// sections, sampled without replacement. Terms are processed in sorted
/// normalized order and split as whole units.
std::vector<ExtractionExample> build_extraction_dataset(std::span<const Document> corpus,
                                                        std::span<const Term> terms,
                                                        const ExtractionOptions& options,
                                                        std::vector<std::string>* warnings = nullptr);

std::vector<GenerationExample> build_generation_dataset(std::span<const Document> encyclopedia,
                                                        std::span<const Document> web,
                                                        std::span<const Term> terms,
                                                        const SplitRatios& ratios,
                                                        std::uint64_t seed,
                                                        std::vector<std::string>* warnings = nullptr);

// First sentence of the "summary" section, if any.
std::optional<std::string> first_summary_sentence(const Document& doc);

// Index from normalized title to the first encyclopedia document carrying it.
std::unordered_map<std::string, std::size_t> index_by_title(std::span<const Document> docs);

// Sorted by normalized form, first surface kept per normalized form.
std::vector<Term> canonical_term_order(std::span<const Term> terms);

}  // namespace defpipe::ingest
