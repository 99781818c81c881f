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

// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "defpipe/kernels.hpp"
#include "defpipe/random.hpp"

using namespace defpipe;

namespace {

std::string words(SeededRng& rng, std::size_t n, std::size_t vocab) {
  std::string out;
  for (std::size_t i = 0; i < n; ++i) {
    if (i) out += ' ';
    out += "w" + std::to_string(rng.uniform_index(vocab));
  }
  return out;
}

std::vector<SentenceRecord> sentences(std::size_t n) {
  SeededRng rng(1);
  std::vector<SentenceRecord> out;
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back({"The widget is a " + words(rng, 5 + rng.uniform_index(25), 500) + ".", "d", Source::kWeb,
                   "body", true});
  }
  return out;
}

sdi::ScorerModel model() {
  sdi::ScorerModel m;
  for (std::size_t i = 0; i < m.weights.size(); ++i) m.weights[i] = 0.1 * static_cast<double>(i % 5) - 0.2;
  return m;
}

const cdi::Bm25Index& index() {
  static const cdi::Bm25Index idx = [] {
    SeededRng rng(2);
    std::vector<cdi::CoreTermEntry> entries;
    for (int i = 0; i < 20000; ++i) {
      entries.push_back(
          cdi::CoreTermEntry::make(Term::from_surface(words(rng, 2, 3000)), words(rng, 20, 3000)));
    }
    return cdi::Bm25Index::build(std::move(entries));
  }();
  return idx;
}

const std::vector<std::string>& query() {
  static const std::vector<std::string> q = {"w1", "w17", "w256", "w999", "w2048"};
  return q;
}

void pairs(std::vector<std::string>& h, std::vector<std::string>& r, std::size_t n) {
  SeededRng rng(3);
  for (std::size_t i = 0; i < n; ++i) {
    h.push_back(words(rng, 10 + rng.uniform_index(20), 60));
    r.push_back(words(rng, 10 + rng.uniform_index(20), 60));
  }
}

void BM_ScoreCandidatesSerial(benchmark::State& state) {
  const auto s = sentences(static_cast<std::size_t>(state.range(0)));
  const auto m = model();
  const auto t = Term::from_surface("widget");
  for (auto _ : state) benchmark::DoNotOptimize(kernels::score_candidates_serial(m, t, s));
}

void BM_ScoreCandidatesOmp(benchmark::State& state) {
  const auto s = sentences(static_cast<std::size_t>(state.range(0)));
  const auto m = model();
  const auto t = Term::from_surface("widget");
  for (auto _ : state) benchmark::DoNotOptimize(kernels::score_candidates_omp(m, t, s));
}

void BM_Bm25Serial(benchmark::State& state) {
  const auto& idx = index();
  for (auto _ : state) benchmark::DoNotOptimize(kernels::bm25_scores_serial(idx, query()));
}

void BM_Bm25Omp(benchmark::State& state) {
  const auto& idx = index();
  for (auto _ : state) benchmark::DoNotOptimize(kernels::bm25_scores_omp(idx, query()));
}

void BM_PairScoresSerial(benchmark::State& state) {
  std::vector<std::string> h, r;
  pairs(h, r, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::pair_scores_serial(h, r));
}

void BM_PairScoresOmp(benchmark::State& state) {
  std::vector<std::string> h, r;
  pairs(h, r, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::pair_scores_omp(h, r));
}

}  // namespace

BENCHMARK(BM_ScoreCandidatesSerial)->Arg(1000)->Arg(10000)->UseRealTime();
BENCHMARK(BM_ScoreCandidatesOmp)->Arg(1000)->Arg(10000)->UseRealTime();
BENCHMARK(BM_Bm25Serial)->UseRealTime();
BENCHMARK(BM_Bm25Omp)->UseRealTime();
BENCHMARK(BM_PairScoresSerial)->Arg(1000)->UseRealTime();
BENCHMARK(BM_PairScoresOmp)->Arg(1000)->UseRealTime();

BENCHMARK_MAIN();
