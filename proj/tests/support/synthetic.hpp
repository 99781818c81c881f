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
#include <string>
#include <vector>

#include "defpipe/random.hpp"
#include "defpipe/types.hpp"

namespace defpipe::testing {

/// Synthetic definitional dataset for the built-in scorer.
///
/// Each of n/2 invented terms ("<prefix> <head>", e.g. "sparse lattice")
/// contributes one Positive and one Negative sentence:
///   - Positives use one of the definitional cue templates ("T is a ...",
///     "T refers to ...", "T is defined as ...", "T denotes ...",
///     "A T is a type of ...", "In <field>, T is the ...").
///   - Negatives mention T without a definitional cue ("We applied T to ...",
///     "Results for T are listed in appendix 3.", ...). About one in five carries a
///     plain copula ("The code for T is public.") so the copula feature alone
///     does not separate the classes.
/// Every sentence sits in section "body", so the section feature carries no
/// signal. Splits are assigned per term: 8 of every 10 terms go to Train, one
/// to Valid, one to Test. Output is a pure function of (n, seed).
std::vector<ExtractionExample> synthetic_definitional_dataset(std::size_t n, std::uint64_t seed);

// Tokens drawn from "w0".."w{vocab-1}".
std::vector<std::string> random_tokens(SeededRng& rng, std::size_t length, std::size_t vocab);

// Sentence of lowercase words, capitalized, ending in '.', with no marker
// strings. Word count in [min_words, max_words].
std::string random_sentence(SeededRng& rng, std::size_t min_words, std::size_t max_words);

std::string join(const std::vector<std::string>& tokens, const std::string& sep = " ");

}  // namespace defpipe::testing
