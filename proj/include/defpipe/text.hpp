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

// Shared text normalization. Everything here is ASCII-case-aware and passes
// non-ASCII bytes through untouched, so UTF-8 input is never split mid-rune.
namespace defpipe::text {

std::string to_lower(std::string_view s);

// Trims and collapses every whitespace run into a single space.
std::string collapse_whitespace(std::string_view s);

std::vector<std::string> whitespace_split(std::string_view s);

std::size_t whitespace_token_count(std::string_view s);

// Lowercase, ASCII punctuation replaced by spaces, whitespace split. This is
// the tokenizer behind the BM25 index and its queries.
std::vector<std::string> normalize_tokens(std::string_view s);

// Plural-head de-pluralization through a small suffix table. Idempotent.
std::string lemmatize_word(std::string_view word);

// normalize_tokens() followed by lemmatize_word() on every token. Term
// containment is decided on these streams.
std::vector<std::string> lemma_tokens(std::string_view s);

// Normalized term form: normalized tokens with only the head (last) token
// lemmatized, joined by single spaces.
std::string normalize_term(std::string_view surface);

// Position of the first contiguous occurrence of `needle` in `haystack`.
std::optional<std::size_t> find_subsequence(std::span<const std::string> haystack,
                                             std::span<const std::string> needle);

inline bool contains_subsequence(std::span<const std::string> haystack,
                                 std::span<const std::string> needle) {
  return find_subsequence(haystack, needle).has_value();
}

/// Rule-based sentence segmentation.
///
/// A boundary is placed after a run of `.`, `!` or `?` when the run is followed
/// by whitespace and the next visible character is an uppercase ASCII letter or
/// a digit. A boundary is suppressed when the word ending in `.` is on the
/// abbreviation list ("Fig.", "e.g.", "et al.", "Dr.", ...) or when a
/// parenthesis or bracket is still open. Output pieces are trimmed; empty input
/// yields no sentences.
std::vector<std::string> split_sentences(std::string_view text);

bool is_protected_abbreviation(std::string_view word);

}  // namespace defpipe::text
