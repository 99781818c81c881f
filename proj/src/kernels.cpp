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

#include "defpipe/kernels.hpp"

#include <algorithm>

#include "defpipe/error.hpp"

namespace defpipe::kernels {

std::vector<double> score_candidates_serial(const sdi::ScorerModel& model, const Term& term,
                                            std::span<const SentenceRecord> sentences) {
  sdi::check_version(model);
  std::vector<double> out(sentences.size());
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    out[i] = sdi::sigmoid(model.logit(sdi::featurize(term, sentences[i])));
  }
  return out;
}

std::vector<double> score_candidates_omp(const sdi::ScorerModel& model, const Term& term,
                                         std::span<const SentenceRecord> sentences) {
  sdi::check_version(model);
  std::vector<double> out(sentences.size());
  const auto n = static_cast<std::ptrdiff_t>(sentences.size());
#pragma omp parallel for schedule(static) if (n > 64)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    out[i] = sdi::sigmoid(model.logit(sdi::featurize(term, sentences[i])));
  }
  return out;
}

std::vector<double> bm25_scores_serial(const cdi::Bm25Index& index,
                                       std::span<const std::string> query) {
  std::vector<double> out(index.n_docs(), 0.0);
  for (const auto& token : query) {
    const auto list = index.postings(token);
    if (list.empty()) continue;
    const double idf = index.idf(token);
    for (const auto& p : list) {
      out[p.entry] += index.contribution(idf, p.tf, index.doc_length(p.entry));
    }
  }
  return out;
}

std::vector<double> bm25_scores_omp(const cdi::Bm25Index& index,
                                    std::span<const std::string> query) {
  std::vector<std::span<const cdi::Posting>> lists(query.size());
  std::vector<double> idf(query.size(), 0.0);
  for (std::size_t q = 0; q < query.size(); ++q) {
    lists[q] = index.postings(query[q]);
    if (!lists[q].empty()) idf[q] = index.idf(query[q]);
  }
  std::vector<double> out(index.n_docs(), 0.0);
  // Each block owns a disjoint entry range and visits query tokens in order,
  // so every entry accumulates exactly as in the serial walk.
  constexpr std::size_t kBlock = 2048;
  const auto n_blocks = static_cast<std::ptrdiff_t>((index.n_docs() + kBlock - 1) / kBlock);
#pragma omp parallel for schedule(dynamic) if (n_blocks > 1)
  for (std::ptrdiff_t block = 0; block < n_blocks; ++block) {
    const auto lo = static_cast<std::uint32_t>(static_cast<std::size_t>(block) * kBlock);
    const auto hi = static_cast<std::uint32_t>(std::min(index.n_docs(), static_cast<std::size_t>(lo) + kBlock));
    for (std::size_t q = 0; q < lists.size(); ++q) {
      auto it = std::lower_bound(lists[q].begin(), lists[q].end(), lo,
                                 [](const cdi::Posting& p, std::uint32_t e) { return p.entry < e; });
      for (; it != lists[q].end() && it->entry < hi; ++it) {
        out[it->entry] += index.contribution(idf[q], it->tf, index.doc_length(it->entry));
      }
    }
  }
  return out;
}

PairScores score_pair(const std::string& hypothesis, const std::string& reference) {
  const auto hyp = metrics::tokenize(hypothesis);
  const auto ref = metrics::tokenize(reference);
  PairScores s;
  s.bleu_stats = metrics::bleu_stats(hyp, ref);
  s.bleu = metrics::bleu_from_stats(s.bleu_stats);
  s.rouge_l = metrics::rouge_l_tokens(hyp, ref);
  s.meteor = metrics::meteor_tokens(hyp, ref);
  return s;
}

namespace {

void check_lengths(std::span<const std::string> h, std::span<const std::string> r) {
  if (h.size() != r.size()) {
    throw Error(ErrorCode::kInvalidArgument, "hypothesis/reference count mismatch");
  }
}

}  // namespace

std::vector<PairScores> pair_scores_serial(std::span<const std::string> hypotheses,
                                           std::span<const std::string> references) {
  check_lengths(hypotheses, references);
  std::vector<PairScores> out(hypotheses.size());
  for (std::size_t i = 0; i < hypotheses.size(); ++i) {
    out[i] = score_pair(hypotheses[i], references[i]);
  }
  return out;
}

std::vector<PairScores> pair_scores_omp(std::span<const std::string> hypotheses,
                                        std::span<const std::string> references) {
  check_lengths(hypotheses, references);
  std::vector<PairScores> out(hypotheses.size());
  const auto n = static_cast<std::ptrdiff_t>(hypotheses.size());
#pragma omp parallel for schedule(dynamic, 8)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    out[i] = score_pair(hypotheses[i], references[i]);
  }
  return out;
}

}  // namespace defpipe::kernels
