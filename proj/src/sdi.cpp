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

#include "defpipe/sdi.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "defpipe/error.hpp"
#include "defpipe/kernels.hpp"
#include "defpipe/random.hpp"
#include "defpipe/text.hpp"

namespace defpipe::sdi {
namespace {

constexpr std::array<std::string_view, kFeatureCount> kNames = {
    "cue_is_a",      "cue_is_an",        "cue_is_the",      "cue_refers_to",
    "cue_is_defined_as", "cue_is_a_type_of", "cue_denotes", "term_at_start",
    "term_earliness", "term_then_copula", "length_lt_8",    "length_8_15",
    "length_16_30",  "length_gt_30",     "copula",          "parenthetical_acronym",
    "digit_ratio",   "summary_like_section",
};

bool has_ngram(const std::vector<std::string>& tokens, std::initializer_list<std::string_view> gram) {
  if (gram.size() > tokens.size()) return false;
  for (std::size_t i = 0; i + gram.size() <= tokens.size(); ++i) {
    std::size_t k = 0;
    for (auto g : gram) {
      if (tokens[i + k] != g) break;
      ++k;
    }
    if (k == gram.size()) return true;
  }
  return false;
}

bool is_copula(std::string_view t) { return t == "is" || t == "are" || t == "was" || t == "were"; }

bool has_parenthetical_acronym(std::string_view s) {
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '(') continue;
    std::size_t j = i + 1;
    std::size_t upper = 0;
    while (j < s.size() && ((s[j] >= 'A' && s[j] <= 'Z') || (s[j] >= '0' && s[j] <= '9') ||
                            s[j] == '-')) {
      upper += (s[j] >= 'A' && s[j] <= 'Z');
      ++j;
    }
    if (j < s.size() && s[j] == 's') ++j;
    if (upper >= 2 && j < s.size() && s[j] == ')') return true;
  }
  return false;
}

bool summary_like(std::string_view section) {
  const auto s = text::to_lower(section);
  return s == "summary" || s == "introduction" || s == "overview" || s == "definition" ||
         s == "abstract" || s == "lead";
}

}  // namespace

std::span<const std::string_view> feature_names() { return kNames; }

FeatureVector featurize(const Term& term, const SentenceRecord& sentence) {
  FeatureVector fv;
  auto& x = fv.values;
  const auto tokens = text::normalize_tokens(sentence.text);
  std::vector<std::string> lemmas(tokens.size());
  std::transform(tokens.begin(), tokens.end(), lemmas.begin(),
                 [](const std::string& t) { return text::lemmatize_word(t); });
  const auto needle = text::lemma_tokens(term.normalized);
  const double n = static_cast<double>(tokens.size());

  x[kCueIsA] = has_ngram(tokens, {"is", "a"});
  x[kCueIsAn] = has_ngram(tokens, {"is", "an"});
  x[kCueIsThe] = has_ngram(tokens, {"is", "the"});
  x[kCueRefersTo] = has_ngram(tokens, {"refers", "to"});
  x[kCueIsDefinedAs] = has_ngram(tokens, {"is", "defined", "as"});
  x[kCueIsATypeOf] = has_ngram(tokens, {"is", "a", "type", "of"});
  x[kCueDenotes] = has_ngram(tokens, {"denotes"});

  if (auto pos = text::find_subsequence(lemmas, needle)) {
    const bool after_article =
        *pos == 1 && (tokens[0] == "a" || tokens[0] == "an" || tokens[0] == "the");
    x[kTermAtStart] = (*pos == 0 || after_article) ? 1.0 : 0.0;
    x[kTermEarliness] = 1.0 - static_cast<double>(*pos) / n;
    const auto next = *pos + needle.size();
    if (next < tokens.size()) {
      const auto& t = tokens[next];
      x[kTermThenCopula] =
          (is_copula(t) || t == "refers" || t == "denotes" || t == "means") ? 1.0 : 0.0;
    }
  }

  const auto len = tokens.size();
  x[kLengthShort] = len < 8;
  x[kLengthMedium] = len >= 8 && len <= 15;
  x[kLengthLong] = len >= 16 && len <= 30;
  x[kLengthVeryLong] = len > 30;
  x[kCopula] = std::any_of(tokens.begin(), tokens.end(), [](const auto& t) { return is_copula(t); });
  x[kParentheticalAcronym] = has_parenthetical_acronym(sentence.text);

  std::size_t digits = 0;
  std::size_t visible = 0;
  for (char c : sentence.text) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') continue;
    ++visible;
    digits += (c >= '0' && c <= '9');
  }
  x[kDigitRatio] = visible == 0 ? 0.0 : static_cast<double>(digits) / static_cast<double>(visible);
  x[kSummaryLikeSection] = summary_like(sentence.section);
  return fv;
}

double ScorerModel::logit(const FeatureVector& x) const {
  double z = bias;
  for (std::size_t i = 0; i < kFeatureCount; ++i) z += weights[i] * x.values[i];
  return z;
}

void to_json(nlohmann::json& j, const ScorerModel& m) {
  j = nlohmann::json{
      {"feature_spec_version", m.feature_spec_version},
      {"weights", m.weights},
      {"bias", m.bias},
      {"training_meta",
       {{"seed", m.training_meta.seed},
        {"epochs", m.training_meta.epochs},
        {"learning_rate", m.training_meta.learning_rate},
        {"loss_per_epoch", m.training_meta.loss_per_epoch}}},
  };
}

void from_json(const nlohmann::json& j, ScorerModel& m) {
  m.feature_spec_version = j.at("feature_spec_version").get<std::string>();
  m.weights = j.at("weights").get<std::vector<double>>();
  m.bias = j.at("bias").get<double>();
  const auto& meta = j.at("training_meta");
  m.training_meta.seed = meta.value("seed", std::uint64_t{0});
  m.training_meta.epochs = meta.value("epochs", std::size_t{0});
  m.training_meta.learning_rate = meta.value("learning_rate", 0.0);
  m.training_meta.loss_per_epoch = meta.value("loss_per_epoch", std::vector<double>{});
  if (!std::all_of(m.weights.begin(), m.weights.end(), [](double w) { return std::isfinite(w); }) ||
      !std::isfinite(m.bias)) {
    throw Error(ErrorCode::kParse, "scorer model has non-finite weights");
  }
}

double sigmoid(double logit) {
  // Clamped so the result stays strictly inside (0, 1) in double precision.
  const double z = std::clamp(logit, -36.0, 36.0);
  return z >= 0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
}

namespace {

double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

}  // namespace

double full_batch_loss(const ScorerModel& model, std::span<const FeatureVector> features,
                       std::span<const Label> labels) {
  double sum = 0;
  for (std::size_t i = 0; i < features.size(); ++i) {
    const double z = model.logit(features[i]);
    sum += labels[i] == Label::kPositive ? softplus(-z) : softplus(z);
  }
  return features.empty() ? 0.0 : sum / static_cast<double>(features.size());
}

ScorerModel train_logistic(std::span<const FeatureVector> features, std::span<const Label> labels,
                           const TrainOptions& options) {
  if (features.size() != labels.size()) {
    throw Error(ErrorCode::kInvalidArgument, "feature/label count mismatch");
  }
  const bool any_pos = std::any_of(labels.begin(), labels.end(),
                                   [](Label l) { return l == Label::kPositive; });
  const bool any_neg = std::any_of(labels.begin(), labels.end(),
                                   [](Label l) { return l == Label::kNegative; });
  if (!any_pos || !any_neg) throw Error(ErrorCode::kDegenerateTraining, "degenerate training set");
  if (!(options.learning_rate > 0) || !std::isfinite(options.learning_rate)) {
    throw Error(ErrorCode::kInvalidArgument, "learning rate must be positive");
  }

  ScorerModel model;
  model.training_meta.seed = options.seed;
  model.training_meta.epochs = options.epochs;
  model.training_meta.learning_rate = options.learning_rate;

  SeededRng rng(mix_seed(options.seed, "sgd"));
  std::vector<std::size_t> order(features.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  double lr = options.learning_rate;
  double current = full_batch_loss(model, features, labels);
  for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    ScorerModel trial = model;
    for (auto i : order) {
      const double y = labels[i] == Label::kPositive ? 1.0 : 0.0;
      const double g = sigmoid(trial.logit(features[i])) - y;
      for (std::size_t f = 0; f < kFeatureCount; ++f) trial.weights[f] -= lr * g * features[i].values[f];
      trial.bias -= lr * g;
    }
    const double loss = full_batch_loss(trial, features, labels);
    if (loss <= current) {
      model.weights = std::move(trial.weights);
      model.bias = trial.bias;
      current = loss;
    } else {
      lr *= 0.5;
    }
    model.training_meta.loss_per_epoch.push_back(current);
  }
  return model;
}

ScorerModel train_scorer(std::span<const ExtractionExample> examples, const TrainOptions& options) {
  std::vector<FeatureVector> features;
  std::vector<Label> labels;
  for (const auto& ex : examples) {
    if (ex.split != Split::kTrain) continue;
    features.push_back(featurize(ex.term, ex.sentence));
    labels.push_back(ex.label);
  }
  return train_logistic(features, labels, options);
}

void check_version(const ScorerModel& model) {
  if (model.feature_spec_version != kFeatureSpecVersion) {
    throw Error(ErrorCode::kVersionMismatch,
                "scorer model uses feature spec '" + model.feature_spec_version +
                    "' but this build extracts '" + std::string(kFeatureSpecVersion) + "'");
  }
  if (model.weights.size() != kFeatureCount) {
    throw Error(ErrorCode::kVersionMismatch, "scorer model has the wrong number of weights");
  }
}

double score(const ScorerModel& model, const Term& term, const SentenceRecord& sentence) {
  check_version(model);
  return sigmoid(model.logit(featurize(term, sentence)));
}

BuiltinScorer::BuiltinScorer(ScorerModel model) : model_(std::move(model)) {
  check_version(model_);
}

std::vector<double> BuiltinScorer::score_batch(const Term& term,
                                               std::span<const SentenceRecord> sentences) const {
  return kernels::score_candidates_omp(model_, term, sentences);
}

std::vector<SentenceRecord> collect_candidates(const Term& term,
                                               const ingest::SentenceIndex& web_corpus) {
  return ingest::find_mentions(term, web_corpus, Source::kWeb);
}

bool ranks_before(const ScoredSentence& a, const ScoredSentence& b) {
  if (a.confidence != b.confidence) return a.confidence > b.confidence;
  if (a.sentence.text.size() != b.sentence.text.size()) {
    return a.sentence.text.size() > b.sentence.text.size();
  }
  return a.sentence.text < b.sentence.text;
}

std::vector<ScoredSentence> rank_scored(std::vector<ScoredSentence> scored, std::size_t k) {
  for (const auto& s : scored) {
    if (!std::isfinite(s.confidence)) {
      throw Error(ErrorCode::kInvariant, "non-finite confidence for '" + s.sentence.text + "'");
    }
  }
  std::stable_sort(scored.begin(), scored.end(), ranks_before);
  if (scored.size() > k) scored.resize(k);
  return scored;
}

std::vector<ScoredSentence> rank_sdi(const Term& term, std::span<const SentenceRecord> candidates,
                                     std::size_t k, const SentenceScorer& scorer) {
  if (k == 0 || candidates.empty()) return {};
  const auto confidences = scorer.score_batch(term, candidates);
  if (confidences.size() != candidates.size()) {
    throw Error(ErrorCode::kInvariant, "scorer returned the wrong number of confidences");
  }
  std::vector<ScoredSentence> scored;
  scored.reserve(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    scored.push_back({candidates[i], confidences[i]});
  }
  return rank_scored(std::move(scored), k);
}

metrics::Prf1 evaluate_scorer(const ScorerModel& model,
                              std::span<const ExtractionExample> examples) {
  check_version(model);
  std::vector<Label> predicted;
  std::vector<Label> gold;
  for (const auto& ex : examples) {
    if (ex.split != Split::kTest) continue;
    const double c = sigmoid(model.logit(featurize(ex.term, ex.sentence)));
    predicted.push_back(c >= kDecisionThreshold ? Label::kPositive : Label::kNegative);
    gold.push_back(ex.label);
  }
  return metrics::prf1(predicted, gold);
}

}  // namespace defpipe::sdi
