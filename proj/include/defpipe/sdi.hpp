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

#include <nlohmann/json.hpp>

#include "defpipe/ingest.hpp"
#include "defpipe/metrics.hpp"
#include "defpipe/types.hpp"

// Self-definitional information: rank the sentences that mention a term by
// how definitional they look.
namespace defpipe::sdi {

inline constexpr std::string_view kFeatureSpecVersion = "defpipe-features-v1";

enum Feature : std::size_t {
  kCueIsA,
  kCueIsAn,
  kCueIsThe,
  kCueRefersTo,
  kCueIsDefinedAs,
  kCueIsATypeOf,
  kCueDenotes,
  kTermAtStart,
  kTermEarliness,
  kTermThenCopula,
  kLengthShort,
  kLengthMedium,
  kLengthLong,
  kLengthVeryLong,
  kCopula,
  kParentheticalAcronym,
  kDigitRatio,
  kSummaryLikeSection,
  kFeatureCount,
};

std::span<const std::string_view> feature_names();

struct FeatureVector {
  std::array<double, kFeatureCount> values{};
  std::string_view feature_spec_version = kFeatureSpecVersion;

  double operator[](std::size_t i) const { return values[i]; }
  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

/// Deterministic interpretable features:
///   - definitional cue n-grams ("is a", "is an", "is the", "refers to",
///     "is defined as", "is a type of", "denotes"),
///   - term position: starts the sentence (optionally after an article),
///     earliness 1 - pos/len, immediately followed by a copula,
///   - one-hot length bucket (<8, 8-15, 16-30, >30 tokens),
///   - copula presence, "(ACRONYM)" presence, digit ratio,
///   - section name looks like a summary/intro heading.
/// All term-position features are 0 when the term does not occur.
FeatureVector featurize(const Term& term, const SentenceRecord& sentence);

struct TrainingMeta {
  std::uint64_t seed = 0;
  std::size_t epochs = 20;
  double learning_rate = 0.1;
  std::vector<double> loss_per_epoch;
};

struct ScorerModel {
  std::vector<double> weights = std::vector<double>(kFeatureCount, 0.0);
  double bias = 0.0;
  std::string feature_spec_version{kFeatureSpecVersion};
  TrainingMeta training_meta;

  double logit(const FeatureVector& x) const;
};

void to_json(nlohmann::json& j, const ScorerModel& m);
void from_json(const nlohmann::json& j, ScorerModel& m);

struct TrainOptions {
  double learning_rate = 0.1;
  std::size_t epochs = 20;
  std::uint64_t seed = 0;
};

double sigmoid(double logit);

// Mean binary cross-entropy over the full batch.
double full_batch_loss(const ScorerModel& model, std::span<const FeatureVector> features,
                       std::span<const Label> labels);

/// Seeded per-example SGD on logistic loss. After each epoch the full-batch
/// loss is checked; an epoch that raises it is rolled back and the step size
/// halved, so loss_per_epoch is non-increasing. Throws kDegenerateTraining
/// unless both classes are present.
ScorerModel train_logistic(std::span<const FeatureVector> features, std::span<const Label> labels,
                           const TrainOptions& options);

// Featurizes and trains on the Train-split examples only.
ScorerModel train_scorer(std::span<const ExtractionExample> examples, const TrainOptions& options);

// Throws kVersionMismatch when the model was trained on another feature spec.
double score(const ScorerModel& model, const Term& term, const SentenceRecord& sentence);

void check_version(const ScorerModel& model);

struct ScoredSentence {
  SentenceRecord sentence;
  double confidence = 0.0;

  friend bool operator==(const ScoredSentence&, const ScoredSentence&) = default;
};

class SentenceScorer {
 public:
  virtual ~SentenceScorer() = default;
  virtual std::vector<double> score_batch(const Term& term,
                                          std::span<const SentenceRecord> sentences) const = 0;
};

class BuiltinScorer final : public SentenceScorer {
 public:
  explicit BuiltinScorer(ScorerModel model);
  std::vector<double> score_batch(const Term& term,
                                  std::span<const SentenceRecord> sentences) const override;
  const ScorerModel& model() const { return model_; }

 private:
  ScorerModel model_;
};

std::vector<SentenceRecord> collect_candidates(const Term& term,
                                               const ingest::SentenceIndex& web_corpus);

// Strict weak order used for SDI ranking: confidence descending, then longer
// text, then lexicographic text.
bool ranks_before(const ScoredSentence& a, const ScoredSentence& b);

std::vector<ScoredSentence> rank_scored(std::vector<ScoredSentence> scored, std::size_t k);

std::vector<ScoredSentence> rank_sdi(const Term& term, std::span<const SentenceRecord> candidates,
                                     std::size_t k, const SentenceScorer& scorer);

// Positive-class P/R/F1 at threshold 0.5 over the Test-split examples.
metrics::Prf1 evaluate_scorer(const ScorerModel& model,
                              std::span<const ExtractionExample> examples);

inline constexpr double kDecisionThreshold = 0.5;

}  // namespace defpipe::sdi
