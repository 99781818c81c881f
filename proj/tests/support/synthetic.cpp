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

#include "synthetic.hpp"

#include <array>
#include <string_view>

namespace defpipe::testing {
namespace {

constexpr std::array<std::string_view, 16> kPrefixes = {
    "sparse", "latent", "quantum", "stochastic", "convex", "neural", "graded", "modular",
    "inverse", "spectral", "discrete", "robust", "adaptive", "hybrid", "dual", "linear"};
constexpr std::array<std::string_view, 16> kHeads = {
    "lattice", "kernel", "operator", "manifold", "encoder", "sampler", "tableau", "filter",
    "estimator", "protocol", "scheme", "transform", "ideal", "tensor", "automaton", "field"};
constexpr std::array<std::string_view, 10> kNouns = {
    "structure", "method", "function", "procedure", "object", "model", "mapping", "set",
    "algorithm", "representation"};
constexpr std::array<std::string_view, 8> kAdjs = {
    "finite", "general", "compact", "simple", "weighted", "formal", "special", "typical"};
constexpr std::array<std::string_view, 8> kVerbs = {
    "maps", "encodes", "approximates", "partitions", "preserves", "bounds", "orders", "combines"};
constexpr std::array<std::string_view, 8> kObjects = {
    "input signals", "graph vertices", "probability measures", "integer sequences",
    "training data", "vector spaces", "sensor readings", "word embeddings"};
constexpr std::array<std::string_view, 4> kFields = {"mathematics", "physics", "statistics",
                                                     "computing"};

template <std::size_t N>
std::string pick(SeededRng& rng, const std::array<std::string_view, N>& xs) {
  return std::string(xs[rng.uniform_index(N)]);
}

std::string capitalize(std::string s) {
  if (!s.empty() && s[0] >= 'a' && s[0] <= 'z') s[0] = static_cast<char>(s[0] - 'a' + 'A');
  return s;
}

std::string positive_sentence(SeededRng& rng, const std::string& t) {
  const auto noun = pick(rng, kNouns);
  const auto verb = pick(rng, kVerbs);
  const auto obj = pick(rng, kObjects);
  switch (rng.uniform_index(6)) {
    case 0: return capitalize(t) + " is a " + pick(rng, kAdjs) + " " + noun + " that " + verb + " " + obj + ".";
    case 1: return capitalize(t) + " refers to a " + noun + " that " + verb + " " + obj + ".";
    case 2: return capitalize(t) + " is defined as the " + noun + " which " + verb + " " + obj + ".";
    case 3: return capitalize(t) + " denotes a " + noun + " over " + obj + ".";
    case 4: return "A " + t + " is a type of " + noun + " that " + verb + " " + obj + ".";
    default: return "In " + pick(rng, kFields) + ", " + t + " is the " + noun + " that " + verb + " " + obj + ".";
  }
}

std::string negative_sentence(SeededRng& rng, const std::string& t) {
  const auto obj = pick(rng, kObjects);
  const auto year = std::to_string(1990 + rng.uniform_index(30));
  switch (rng.uniform_index(5)) {
    case 0: return "We applied " + t + " to " + obj + " in " + year + ".";
    case 1: return "Recent work on " + t + " reports gains of " + std::to_string(2 + rng.uniform_index(40)) + " percent.";
    case 2: return "Results for " + t + " are listed in appendix " + std::to_string(1 + rng.uniform_index(9)) + ".";
    case 3: return capitalize(t) + " has attracted attention since " + year + ".";
    default: return "The code for " + t + " is public.";
  }
}

}  // namespace

std::vector<ExtractionExample> synthetic_definitional_dataset(std::size_t n, std::uint64_t seed) {
  SeededRng rng(seed);
  std::vector<ExtractionExample> out;
  out.reserve(n);
  for (std::size_t i = 0; out.size() < n; ++i) {
    const std::string surface = pick(rng, kPrefixes) + " " + pick(rng, kHeads) + " " +
                                std::to_string(i);
    const Term term = Term::from_surface(surface);
    const Split split = i % 10 < 8 ? Split::kTrain : (i % 10 == 8 ? Split::kValid : Split::kTest);
    for (int pos = 1; pos >= 0 && out.size() < n; --pos) {
      ExtractionExample e;
      e.term = term;
      e.sentence.text = pos ? positive_sentence(rng, surface) : negative_sentence(rng, surface);
      e.sentence.doc_id = "syn-" + std::to_string(i);
      e.sentence.source = Source::kWeb;
      e.sentence.section = "body";
      e.sentence.contains_term = true;
      e.label = pos ? Label::kPositive : Label::kNegative;
      e.split = split;
      out.push_back(std::move(e));
    }
  }
  return out;
}

std::vector<std::string> random_tokens(SeededRng& rng, std::size_t length, std::size_t vocab) {
  std::vector<std::string> out;
  out.reserve(length);
  for (std::size_t i = 0; i < length; ++i) out.push_back("w" + std::to_string(rng.uniform_index(vocab)));
  return out;
}

std::string random_sentence(SeededRng& rng, std::size_t min_words, std::size_t max_words) {
  static constexpr std::array<std::string_view, 12> kWords = {
      "graph", "prime", "model", "learns", "from", "data", "with", "few", "labels", "and",
      "its", "bound"};
  const auto n = min_words + rng.uniform_index(max_words - min_words + 1);
  std::string s;
  for (std::size_t i = 0; i < n; ++i) {
    if (i) s += ' ';
    s += kWords[rng.uniform_index(kWords.size())];
  }
  return capitalize(s) + ".";
}

std::string join(const std::vector<std::string>& tokens, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += sep;
    out += tokens[i];
  }
  return out;
}

}  // namespace defpipe::testing
