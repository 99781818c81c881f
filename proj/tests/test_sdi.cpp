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

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>

#include "defpipe/error.hpp"
#include "defpipe/ingest.hpp"
#include "defpipe/sdi.hpp"
#include "synthetic.hpp"

using namespace defpipe;
using Catch::Approx;

namespace {

SentenceRecord sentence(std::string text, std::string section = "body") {
  return SentenceRecord{std::move(text), "d", Source::kWeb, std::move(section), true};
}

class TableScorer final : public sdi::SentenceScorer {
 public:
  explicit TableScorer(std::map<std::string, double> table) : table_(std::move(table)) {}
  std::vector<double> score_batch(const Term&, std::span<const SentenceRecord> s) const override {
    std::vector<double> out;
    for (const auto& r : s) out.push_back(table_.at(r.text));
    return out;
  }

 private:
  std::map<std::string, double> table_;
};

std::vector<std::string> texts(const std::vector<sdi::ScoredSentence>& xs) {
  std::vector<std::string> out;
  for (const auto& x : xs) out.push_back(x.sentence.text);
  return out;
}

}  // namespace

TEST_CASE("featurize hand-computed example", "[sdi][features]") {
  const auto t = Term::from_surface("twin prime");
  const auto fv = sdi::featurize(
      t, sentence("A twin prime is a prime number that is either 2 less or 2 more than another prime number."));
  CHECK(fv[sdi::kCueIsA] == 1.0);
  CHECK(fv[sdi::kCopula] == 1.0);
  CHECK(fv[sdi::kTermAtStart] == 1.0);
  CHECK(fv[sdi::kTermThenCopula] == 1.0);
  CHECK(fv[sdi::kTermEarliness] == Approx(1.0 - 1.0 / 19.0));
  CHECK(fv[sdi::kLengthLong] == 1.0);
  CHECK(fv[sdi::kLengthShort] + fv[sdi::kLengthMedium] + fv[sdi::kLengthVeryLong] == 0.0);
  CHECK(fv[sdi::kCueIsAn] == 0.0);
  CHECK(fv[sdi::kCueRefersTo] == 0.0);
  // 2 digits among 71 visible characters.
  CHECK(fv[sdi::kDigitRatio] == Approx(2.0 / 71.0));
  CHECK(fv[sdi::kSummaryLikeSection] == 0.0);
  CHECK(fv.feature_spec_version == sdi::kFeatureSpecVersion);
  CHECK(sdi::feature_names().size() == sdi::kFeatureCount);
}

TEST_CASE("featurize edge cases", "[sdi][features]") {
  const auto t = Term::from_surface("twin prime");
  const auto absent = sdi::featurize(t, sentence("Goldbach is a conjecture (GC) about sums.", "Summary"));
  CHECK(absent[sdi::kTermAtStart] == 0.0);
  CHECK(absent[sdi::kTermEarliness] == 0.0);
  CHECK(absent[sdi::kTermThenCopula] == 0.0);
  CHECK(absent[sdi::kParentheticalAcronym] == 1.0);
  CHECK(absent[sdi::kSummaryLikeSection] == 1.0);

  const auto s = sentence("Twin primes denotes pairs.");
  CHECK(sdi::featurize(t, s) == sdi::featurize(t, s));
  CHECK(sdi::featurize(t, s)[sdi::kCueDenotes] == 1.0);
  CHECK(sdi::featurize(t, s)[sdi::kTermAtStart] == 1.0);

  const auto typed = sdi::featurize(t, sentence("The twin prime is a type of prime pair and is defined as such."));
  CHECK(typed[sdi::kCueIsATypeOf] == 1.0);
  CHECK(typed[sdi::kCueIsDefinedAs] == 1.0);
  CHECK(typed[sdi::kTermAtStart] == 1.0);
  CHECK(typed[sdi::kLengthMedium] == 1.0);

  const auto empty = sdi::featurize(t, sentence(""));
  for (double v : empty.values) CHECK(std::isfinite(v));
  CHECK(empty[sdi::kLengthShort] == 1.0);
}

TEST_CASE("train_logistic separates a two-feature toy set", "[sdi][train]") {
  std::vector<sdi::FeatureVector> xs;
  std::vector<Label> ys;
  for (int i = 0; i < 20; ++i) {
    sdi::FeatureVector fv;
    const bool pos = i % 2 == 0;
    fv.values[sdi::kCueIsA] = pos ? 1.0 : 0.0;
    fv.values[sdi::kDigitRatio] = pos ? 0.1 : 0.6;
    xs.push_back(fv);
    ys.push_back(pos ? Label::kPositive : Label::kNegative);
  }
  sdi::TrainOptions opts;
  opts.epochs = 30;
  opts.seed = 4;
  const auto model = sdi::train_logistic(xs, ys, opts);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const bool predicted = sdi::sigmoid(model.logit(xs[i])) >= sdi::kDecisionThreshold;
    correct += predicted == (ys[i] == Label::kPositive);
  }
  CHECK(correct == xs.size());

  const auto again = sdi::train_logistic(xs, ys, opts);
  CHECK(again.weights == model.weights);
  CHECK(again.bias == model.bias);
  const auto& loss = model.training_meta.loss_per_epoch;
  REQUIRE(loss.size() == opts.epochs);
  for (std::size_t i = 1; i < loss.size(); ++i) CHECK(loss[i] <= loss[i - 1]);
  CHECK(loss.back() < loss.front());
}

TEST_CASE("train_logistic rejects degenerate input", "[sdi][train]") {
  sdi::TrainOptions opts;
  std::vector<sdi::FeatureVector> xs(3);
  std::vector<Label> ys(3, Label::kPositive);
  try {
    sdi::train_logistic(xs, ys, opts);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kDegenerateTraining);
    CHECK(std::string(e.what()).find("degenerate training set") != std::string::npos);
  }
  CHECK_THROWS_AS(sdi::train_logistic({}, {}, opts), Error);
  CHECK_THROWS_AS(sdi::train_scorer({}, opts), Error);
}

TEST_CASE("train_scorer uses only the Train split", "[sdi][train]") {
  auto data = testing::synthetic_definitional_dataset(100, 8);
  sdi::TrainOptions opts;
  opts.seed = 1;
  const auto model = sdi::train_scorer(data, opts);
  for (auto& e : data) {
    if (e.split != Split::kTrain) e.sentence.text = "Poisoned " + e.sentence.text;
  }
  const auto same = sdi::train_scorer(data, opts);
  CHECK(same.weights == model.weights);
  CHECK(model.training_meta.seed == 1);
}

TEST_CASE("score and model persistence", "[sdi][score]") {
  const auto t = Term::from_surface("twin prime");
  const auto s = sentence("A twin prime is a prime.");
  sdi::ScorerModel zero;
  CHECK(sdi::score(zero, t, s) == 0.5);

  sdi::ScorerModel big;
  big.bias = 10.0;
  CHECK(sdi::score(big, t, s) > 0.99);
  CHECK(sdi::score(big, t, s) == Approx(1.0 / (1.0 + std::exp(-10.0))));
  big.bias = -1e6;
  CHECK(sdi::score(big, t, s) >= 0.0);
  CHECK(sdi::sigmoid(0.0) == 0.5);

  sdi::ScorerModel m;
  m.weights[sdi::kCueIsA] = 1.25;
  m.bias = -0.5;
  m.training_meta.loss_per_epoch = {0.7, 0.6};
  const nlohmann::json j = m;
  CHECK(j.at("feature_spec_version") == sdi::kFeatureSpecVersion);
  CHECK(j.contains("training_meta"));
  const auto back = j.get<sdi::ScorerModel>();
  CHECK(back.weights == m.weights);
  CHECK(back.bias == m.bias);
  CHECK(back.training_meta.loss_per_epoch == m.training_meta.loss_per_epoch);

  m.feature_spec_version = "other-v9";
  try {
    sdi::score(m, t, s);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kVersionMismatch);
  }
  CHECK_THROWS_AS(sdi::BuiltinScorer(m), Error);
}

TEST_CASE("rank_sdi ordering and truncation", "[sdi][rank]") {
  const auto t = Term::from_surface("x");
  const std::vector<SentenceRecord> cands = {sentence("low"), sentence("high"), sentence("mid")};
  const TableScorer scorer({{"low", 0.1}, {"high", 0.9}, {"mid", 0.5}});
  CHECK(sdi::rank_sdi(t, cands, 0, scorer).empty());
  CHECK(texts(sdi::rank_sdi(t, cands, 2, scorer)) == std::vector<std::string>{"high", "mid"});
  const auto all = sdi::rank_sdi(t, cands, 10, scorer);
  CHECK(texts(all) == std::vector<std::string>{"high", "mid", "low"});
  CHECK(all[0].confidence == 0.9);
  CHECK(sdi::rank_sdi(t, {}, 3, scorer).empty());

  const std::vector<SentenceRecord> tied = {sentence("bb"), sentence("a"), sentence("ccc"), sentence("ab")};
  const TableScorer flat({{"bb", 0.5}, {"a", 0.5}, {"ccc", 0.5}, {"ab", 0.5}});
  CHECK(texts(sdi::rank_sdi(t, tied, 4, flat)) == std::vector<std::string>{"ccc", "ab", "bb", "a"});

  std::vector<sdi::ScoredSentence> bad = {{sentence("n"), std::nan("")}};
  try {
    sdi::rank_scored(bad, 1);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kInvariant);
  }
}

TEST_CASE("collect_candidates filters source and duplicates", "[sdi][candidates]") {
  const auto t = Term::from_surface("twin prime");
  const std::vector<Document> docs = {
      {"w1", "p", Source::kWeb, std::nullopt,
       {{"body", "A twin prime is rare. Twin primes exist. A twin prime is rare. Nothing here."}}},
      {"w2", "p", Source::kWeb, std::nullopt,
       {{"body", "Twin  primes exist. Large twin prime pairs. The twin prime gap."}}},
      {"e1", "Twin prime", Source::kEncyclopedia, std::nullopt,
       {{"summary", "A twin prime is a prime that differs by two."}}},
  };
  const ingest::SentenceIndex index(docs);
  const auto c = sdi::collect_candidates(t, index);
  REQUIRE(c.size() == 4);
  for (const auto& r : c) {
    CHECK(r.source == Source::kWeb);
    CHECK(r.contains_term);
  }
  CHECK(c[0].text == "A twin prime is rare.");
  CHECK(c[3].text == "The twin prime gap.");
  CHECK(sdi::collect_candidates(Term::from_surface("cousin prime"), index).empty());

  const std::vector<Document> enc_only(docs.begin() + 2, docs.end());
  CHECK(sdi::collect_candidates(t, ingest::SentenceIndex(enc_only)).empty());
}

TEST_CASE("evaluate_scorer counts on the Test split", "[sdi][eval]") {
  sdi::ScorerModel m;
  m.weights[sdi::kCueIsA] = 10.0;
  m.bias = -5.0;
  const auto t = Term::from_surface("thing");
  auto ex = [&](const char* text, Label label, Split split = Split::kTest) {
    return ExtractionExample{t, sentence(text), label, split};
  };
  const std::vector<ExtractionExample> data = {
      ex("A thing is a box.", Label::kPositive),     ex("A thing is a cat.", Label::kPositive),
      ex("A thing is a dog.", Label::kPositive),     ex("Here is a thing.", Label::kNegative),
      ex("The thing sits.", Label::kPositive),       ex("No thing here.", Label::kNegative),
      ex("Train thing is a x.", Label::kNegative, Split::kTrain),
  };
  const auto r = sdi::evaluate_scorer(m, data);
  CHECK(r.precision == Approx(75.0));
  CHECK(r.recall == Approx(75.0));
  CHECK(r.f1 == Approx(75.0));

  const std::vector<ExtractionExample> perfect = {ex("A thing is a box.", Label::kPositive),
                                                  ex("No thing here.", Label::kNegative)};
  const auto p = sdi::evaluate_scorer(m, perfect);
  CHECK(p.precision == 100.0);
  CHECK(p.recall == 100.0);
  CHECK(p.f1 == 100.0);
}

TEST_CASE("synthetic definitional data trains a usable scorer", "[sdi][train][synthetic]") {
  const auto data = testing::synthetic_definitional_dataset(500, 2024);
  REQUIRE(data.size() == 500);
  CHECK(data == testing::synthetic_definitional_dataset(500, 2024));
  sdi::TrainOptions opts;
  opts.seed = 3;
  const auto model = sdi::train_scorer(data, opts);
  CHECK(sdi::evaluate_scorer(model, data).f1 >= 90.0);
}
