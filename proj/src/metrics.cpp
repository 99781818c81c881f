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

#include "defpipe/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>

#include "defpipe/error.hpp"
#include "defpipe/text.hpp"

namespace defpipe::metrics {
namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

bool is_ascii_punct(char c) {
  const auto u = static_cast<unsigned char>(c);
  return u > 0x20 && u < 0x7f && !std::isalnum(u);
}

std::map<std::string, std::uint64_t> ngram_counts(std::span<const std::string> tokens,
                                                  std::size_t n) {
  std::map<std::string, std::uint64_t> counts;
  if (tokens.size() < n) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    std::string key = tokens[i];
    for (std::size_t k = 1; k < n; ++k) {
      key.push_back('\x1f');
      key += tokens[i + k];
    }
    ++counts[key];
  }
  return counts;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) out.push_back(std::move(cur));
    cur.clear();
  };
  for (char c : s) {
    if (is_space(c)) {
      flush();
    } else if (is_ascii_punct(c)) {
      flush();
      out.emplace_back(1, c);
    } else {
      cur.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : c);
    }
  }
  flush();
  return out;
}

BleuStats& BleuStats::operator+=(const BleuStats& other) {
  for (std::size_t n = 0; n < kBleuMaxOrder; ++n) {
    matches[n] += other.matches[n];
    totals[n] += other.totals[n];
  }
  hyp_length += other.hyp_length;
  ref_length += other.ref_length;
  return *this;
}

double BleuStats::precision(std::size_t n) const {
  const auto t = totals.at(n - 1);
  return t == 0 ? 0.0 : static_cast<double>(matches.at(n - 1)) / static_cast<double>(t);
}

BleuStats bleu_stats(std::span<const std::string> hyp, std::span<const std::string> ref) {
  BleuStats s;
  s.hyp_length = hyp.size();
  s.ref_length = ref.size();
  for (std::size_t n = 1; n <= kBleuMaxOrder; ++n) {
    const auto h = ngram_counts(hyp, n);
    const auto r = ngram_counts(ref, n);
    std::uint64_t matched = 0;
    for (const auto& [gram, count] : h) {
      if (auto it = r.find(gram); it != r.end()) matched += std::min(count, it->second);
    }
    s.matches[n - 1] = matched;
    s.totals[n - 1] = hyp.size() >= n ? hyp.size() - n + 1 : 0;
  }
  return s;
}

BleuStats bleu_stats(std::string_view hypothesis, std::string_view reference) {
  return bleu_stats(tokenize(hypothesis), tokenize(reference));
}

double bleu_from_stats(const BleuStats& s) {
  if (s.hyp_length == 0) return 0.0;
  double log_sum = 0;
  std::size_t orders = 0;
  double smooth = 1.0;
  for (std::size_t n = 0; n < kBleuMaxOrder; ++n) {
    if (s.totals[n] == 0) break;
    double p;
    if (s.matches[n] == 0) {
      smooth *= 2.0;
      p = 1.0 / (smooth * static_cast<double>(s.totals[n]));
    } else {
      p = static_cast<double>(s.matches[n]) / static_cast<double>(s.totals[n]);
    }
    log_sum += std::log(p);
    ++orders;
  }
  const double c = static_cast<double>(s.hyp_length);
  const double r = static_cast<double>(s.ref_length);
  const double bp = c < r ? std::exp(1.0 - r / c) : 1.0;
  return 100.0 * bp * std::exp(log_sum / static_cast<double>(orders));
}

double bleu_corpus(std::span<const std::string> hypotheses,
                   std::span<const std::string> references) {
  if (hypotheses.size() != references.size()) {
    throw Error(ErrorCode::kInvalidArgument, "bleu_corpus: hypothesis/reference count mismatch");
  }
  if (hypotheses.empty()) throw Error(ErrorCode::kInvalidArgument, "bleu_corpus: empty input");
  BleuStats total;
  for (std::size_t i = 0; i < hypotheses.size(); ++i) {
    total += bleu_stats(hypotheses[i], references[i]);
  }
  return bleu_from_stats(total);
}

std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b) {
  if (a.empty() || b.empty()) return 0;
  std::vector<std::size_t> prev(b.size() + 1, 0);
  std::vector<std::size_t> cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

double rouge_l_tokens(std::span<const std::string> hyp, std::span<const std::string> ref) {
  const auto lcs = lcs_length(hyp, ref);
  if (lcs == 0) return 0.0;
  const double p = static_cast<double>(lcs) / static_cast<double>(hyp.size());
  const double r = static_cast<double>(lcs) / static_cast<double>(ref.size());
  return 100.0 * (2.0 * p * r) / (p + r);
}

double rouge_l(std::string_view hypothesis, std::string_view reference) {
  return rouge_l_tokens(tokenize(hypothesis), tokenize(reference));
}

std::string stem(std::string_view token) {
  auto word = text::lemmatize_word(token);
  auto strip = [&](std::string_view suffix, std::size_t min_stem) {
    if (word.size() >= suffix.size() + min_stem &&
        std::string_view(word).substr(word.size() - suffix.size()) == suffix) {
      word.resize(word.size() - suffix.size());
      return true;
    }
    return false;
  };
  if (std::all_of(word.begin(), word.end(), [](char c) { return c >= 'a' && c <= 'z'; })) {
    strip("ing", 3) || strip("ed", 3);
  }
  return word;
}

MeteorAlignment meteor_align(std::span<const std::string> hyp, std::span<const std::string> ref,
                             bool use_stems) {
  std::vector<long> hyp_to_ref(hyp.size(), -1);
  std::vector<bool> ref_used(ref.size(), false);

  auto stage = [&](const std::vector<std::string>& hkeys, const std::vector<std::string>& rkeys) {
    long prev = -1;
    for (std::size_t i = 0; i < hyp.size(); ++i) {
      if (hyp_to_ref[i] >= 0) {
        prev = hyp_to_ref[i];
        continue;
      }
      long choice = -1;
      long after_prev = -1;
      long first = -1;
      for (std::size_t j = 0; j < ref.size(); ++j) {
        if (ref_used[j] || rkeys[j] != hkeys[i]) continue;
        const long jj = static_cast<long>(j);
        if (jj == prev + 1) {
          choice = jj;
          break;
        }
        if (first < 0) first = jj;
        if (after_prev < 0 && jj > prev) after_prev = jj;
      }
      if (choice < 0) choice = after_prev >= 0 ? after_prev : first;
      if (choice < 0) continue;
      hyp_to_ref[i] = choice;
      ref_used[static_cast<std::size_t>(choice)] = true;
      prev = choice;
    }
  };

  std::vector<std::string> hk(hyp.begin(), hyp.end());
  std::vector<std::string> rk(ref.begin(), ref.end());
  stage(hk, rk);
  if (use_stems) {
    for (auto& t : hk) t = stem(t);
    for (auto& t : rk) t = stem(t);
    stage(hk, rk);
  }

  MeteorAlignment a;
  a.hyp_length = hyp.size();
  a.ref_length = ref.size();
  long last_h = -2;
  long last_r = -2;
  for (std::size_t i = 0; i < hyp.size(); ++i) {
    if (hyp_to_ref[i] < 0) continue;
    ++a.matches;
    const long h = static_cast<long>(i);
    if (h != last_h + 1 || hyp_to_ref[i] != last_r + 1) ++a.chunks;
    last_h = h;
    last_r = hyp_to_ref[i];
  }
  return a;
}

double meteor_from_alignment(const MeteorAlignment& a, const MeteorParams& params) {
  if (a.matches == 0) return 0.0;
  const double m = static_cast<double>(a.matches);
  const double p = m / static_cast<double>(a.hyp_length);
  const double r = m / static_cast<double>(a.ref_length);
  const double fmean = p * r / (params.alpha * p + (1.0 - params.alpha) * r);
  const double penalty = params.gamma * std::pow(static_cast<double>(a.chunks) / m, params.beta);
  return 100.0 * fmean * (1.0 - penalty);
}

double meteor_tokens(std::span<const std::string> hyp, std::span<const std::string> ref,
                     const MeteorParams& params) {
  return meteor_from_alignment(meteor_align(hyp, ref, params.use_stems), params);
}

double meteor(std::string_view hypothesis, std::string_view reference,
              const MeteorParams& params) {
  return meteor_tokens(tokenize(hypothesis), tokenize(reference), params);
}

double f1_score(double precision, double recall) {
  if (precision + recall <= 0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

Prf1 prf1_from_counts(std::uint64_t tp, std::uint64_t fp, std::uint64_t fn) {
  Prf1 out;
  out.precision = tp + fp == 0 ? 0.0 : 100.0 * static_cast<double>(tp) / static_cast<double>(tp + fp);
  out.recall = tp + fn == 0 ? 0.0 : 100.0 * static_cast<double>(tp) / static_cast<double>(tp + fn);
  out.f1 = f1_score(out.precision, out.recall);
  return out;
}

Prf1 prf1(std::span<const Label> predictions, std::span<const Label> gold) {
  if (predictions.size() != gold.size()) {
    throw Error(ErrorCode::kInvalidArgument, "prf1: prediction/gold length mismatch");
  }
  std::uint64_t tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const bool p = predictions[i] == Label::kPositive;
    const bool g = gold[i] == Label::kPositive;
    tp += p && g;
    fp += p && !g;
    fn += !p && g;
  }
  return prf1_from_counts(tp, fp, fn);
}

}  // namespace defpipe::metrics
