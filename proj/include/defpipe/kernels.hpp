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

#include <span>
#include <string>
#include <vector>

#include "defpipe/cdi.hpp"
#include "defpipe/metrics.hpp"
#include "defpipe/sdi.hpp"
#include "defpipe/types.hpp"

// Data-parallel inner loops. Each kernel has a serial reference version that
// the tests compare against; both produce bit-identical results because every
// output element is computed by the same expression in the same order.
namespace defpipe::kernels {

std::vector<double> score_candidates_serial(const sdi::ScorerModel& model, const Term& term,
                                            std::span<const SentenceRecord> sentences);
std::vector<double> score_candidates_omp(const sdi::ScorerModel& model, const Term& term,
                                         std::span<const SentenceRecord> sentences);

// Score of every index entry against the query. The serial version walks
// postings; the parallel one splits entries into blocks and walks each
// posting list once per block.
std::vector<double> bm25_scores_serial(const cdi::Bm25Index& index,
                                       std::span<const std::string> query);
std::vector<double> bm25_scores_omp(const cdi::Bm25Index& index,
                                    std::span<const std::string> query);

struct PairScores {
  metrics::BleuStats bleu_stats;
  double bleu = 0.0;
  double rouge_l = 0.0;
  double meteor = 0.0;

  friend bool operator==(const PairScores& a, const PairScores& b) {
    return a.bleu_stats.matches == b.bleu_stats.matches &&
           a.bleu_stats.totals == b.bleu_stats.totals &&
           a.bleu_stats.hyp_length == b.bleu_stats.hyp_length &&
           a.bleu_stats.ref_length == b.bleu_stats.ref_length && a.bleu == b.bleu &&
           a.rouge_l == b.rouge_l && a.meteor == b.meteor;
  }
};

PairScores score_pair(const std::string& hypothesis, const std::string& reference);

std::vector<PairScores> pair_scores_serial(std::span<const std::string> hypotheses,
                                           std::span<const std::string> references);
std::vector<PairScores> pair_scores_omp(std::span<const std::string> hypotheses,
                                        std::span<const std::string> references);

}  // namespace defpipe::kernels
