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

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "defpipe/types.hpp"

// Automatic generation metrics and classifier P/R/F1. All scores are on a
// 0..100 scale.
namespace defpipe::metrics {

// Lowercase, every ASCII punctuation character split off as its own token,
// whitespace split. Shared by BLEU, ROUGE-L and METEOR.
std::vector<std::string> tokenize(std::string_view s);

inline constexpr std::size_t kBleuMaxOrder = 4;

/// Sufficient statistics for corpus BLEU. Stats from several pairs are
/// combined by plain addition.
struct BleuStats {
  std::array<std::uint64_t, kBleuMaxOrder> matches{};
  std::array<std::uint64_t, kBleuMaxOrder> totals{};
  std::uint64_t hyp_length = 0;
  std::uint64_t ref_length = 0;

  BleuStats& operator+=(const BleuStats& other);
  // Clipped precision for order n (1-based); 0 when there are no n-grams.
  double precision(std::size_t n) const;
};

BleuStats bleu_stats(std::span<const std::string> hyp_tokens,
                     std::span<const std::string> ref_tokens);
BleuStats bleu_stats(std::string_view hypothesis, std::string_view reference);

/// BLEU from accumulated statistics. Zero-match orders are floored to
/// 1/(2^z * total) where z counts the zero orders seen so far; orders with no
/// hypothesis n-grams at all are dropped from the geometric mean.
double bleu_from_stats(const BleuStats& stats);

// Throws kInvalidArgument on length mismatch or empty input.
double bleu_corpus(std::span<const std::string> hypotheses,
                   std::span<const std::string> references);

std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b);

double rouge_l(std::string_view hypothesis, std::string_view reference);
double rouge_l_tokens(std::span<const std::string> hyp, std::span<const std::string> ref);

// Light suffix stemmer used by the METEOR stem stage.
std::string stem(std::string_view token);

struct MeteorParams {
  double alpha = 0.9;
  double beta = 3.0;
  double gamma = 0.5;
  bool use_stems = true;
};

struct MeteorAlignment {
  std::size_t matches = 0;
  std::size_t chunks = 0;
  std::size_t hyp_length = 0;
  std::size_t ref_length = 0;
};

MeteorAlignment meteor_align(std::span<const std::string> hyp, std::span<const std::string> ref,
                             bool use_stems);

// Exact-then-stem METEOR without the synonym stage (reported as "meteor-es").
double meteor(std::string_view hypothesis, std::string_view reference,
              const MeteorParams& params = {});
double meteor_tokens(std::span<const std::string> hyp, std::span<const std::string> ref,
                     const MeteorParams& params = {});
double meteor_from_alignment(const MeteorAlignment& a, const MeteorParams& params = {});

inline constexpr std::string_view kMeteorVariant = "meteor-es";

struct Prf1 {
  double precision = 0;
  double recall = 0;
  double f1 = 0;
};

// Harmonic mean; 0 when both inputs are 0.
double f1_score(double precision, double recall);

// Positive-class P/R/F1 in percent. Zero predicted positives give P = 0.
Prf1 prf1_from_counts(std::uint64_t tp, std::uint64_t fp, std::uint64_t fn);
Prf1 prf1(std::span<const Label> predictions, std::span<const Label> gold);

}  // namespace defpipe::metrics
