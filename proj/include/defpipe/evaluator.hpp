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
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "defpipe/kernels.hpp"
#include "defpipe/types.hpp"

// Report assembly: corpus metrics, frequency buckets and human ratings.
namespace defpipe::evaluator {

struct EvalItem {
  Term term;
  std::string hypothesis;
  std::string reference;
};

struct TermScores {
  Term term;
  kernels::PairScores scores;
};

// Half-open frequency bucket; a missing bound is unbounded.
struct BucketRow {
  std::optional<std::uint64_t> lower;
  std::optional<std::uint64_t> upper;
  std::size_t n = 0;
  std::optional<double> bleu;
  std::optional<double> rouge_l;
  std::optional<double> meteor;
};

struct HumanAggregate {
  double mean = 0.0;
  std::optional<double> kappa;
  std::size_t n_terms = 0;
  std::size_t n_annotators = 0;
};

struct EvalReport {
  double bleu = 0.0;
  double rouge_l = 0.0;
  double meteor = 0.0;
  std::optional<double> bertscore;
  std::size_t n_items = 0;
  std::vector<TermScores> per_term;
  std::vector<BucketRow> buckets;
  std::optional<HumanAggregate> human;
};

/// Buckets are (-inf, e0), [e0, e1), ..., [e_last, +inf), so every item lands
/// in exactly one. BLEU per bucket is corpus BLEU over the bucket's items;
/// ROUGE-L and METEOR are means. Empty buckets carry null scores. Throws
/// kInvalidArgument unless edges are strictly increasing.
std::vector<BucketRow> bucketize_by_frequency(std::span<const TermScores> items,
                                              std::span<const std::uint64_t> edges);

// Corpus BLEU is computed from pooled n-gram statistics; ROUGE-L and METEOR
// are macro-averages over pairs.
EvalReport evaluate(std::span<const EvalItem> items, std::span<const std::uint64_t> bucket_edges);

/// term -> annotator -> rating in 1..5.
struct HumanRatings {
  std::map<std::string, std::map<std::string, int>> ratings;

  std::vector<std::string> annotators() const;
  // Every term rated by the same annotator set, every rating in 1..5.
  void validate() const;

  // CSV "term,annotator_id,rating"; header row optional, fields may be quoted.
  static HumanRatings read_csv(std::istream& in);
};

// Cohen's kappa over the 5 rating categories. Perfect agreement is 1 even
// when both raters are constant.
double cohen_kappa(std::span<const int> a, std::span<const int> b);

// Grand mean of all ratings, plus the mean pairwise kappa (null with a single
// annotator).
HumanAggregate aggregate_human(const HumanRatings& ratings);

nlohmann::json to_json(const EvalReport& report);
EvalReport report_from_json(const nlohmann::json& j);

// Header row then one row: BL, R-L, MT, BS (or "null").
std::string to_tsv(const EvalReport& report);

}  // namespace defpipe::evaluator
