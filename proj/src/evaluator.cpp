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

#include "defpipe/evaluator.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <set>

#include "defpipe/error.hpp"
#include "defpipe/text.hpp"

namespace defpipe::evaluator {
namespace {

nlohmann::json nullable(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

std::optional<double> optional_number(const nlohmann::json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<double>();
}

std::vector<std::string> parse_csv_line(const std::string& line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back().push_back('"');
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back().push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else if (c != '\r') {
      fields.back().push_back(c);
    }
  }
  if (quoted) throw Error(ErrorCode::kParse, "unterminated quote in ratings CSV");
  return fields;
}

std::string format_score(const std::optional<double>& v) {
  if (!v) return "null";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", *v);
  return buf;
}

}  // namespace

std::vector<BucketRow> bucketize_by_frequency(std::span<const TermScores> items,
                                              std::span<const std::uint64_t> edges) {
  for (std::size_t i = 1; i < edges.size(); ++i) {
    if (edges[i] <= edges[i - 1]) {
      throw Error(ErrorCode::kInvalidArgument, "bucket edges must be strictly increasing");
    }
  }
  std::vector<BucketRow> rows(edges.size() + 1);
  for (std::size_t b = 0; b < rows.size(); ++b) {
    if (b > 0) rows[b].lower = edges[b - 1];
    if (b < edges.size()) rows[b].upper = edges[b];
  }

  std::vector<metrics::BleuStats> stats(rows.size());
  std::vector<double> rouge(rows.size(), 0.0);
  std::vector<double> meteor(rows.size(), 0.0);
  for (const auto& item : items) {
    const auto freq = item.term.ref_frequency;
    const auto b = static_cast<std::size_t>(std::upper_bound(edges.begin(), edges.end(), freq) -
                                            edges.begin());
    ++rows[b].n;
    stats[b] += item.scores.bleu_stats;
    rouge[b] += item.scores.rouge_l;
    meteor[b] += item.scores.meteor;
  }
  for (std::size_t b = 0; b < rows.size(); ++b) {
    if (rows[b].n == 0) continue;
    const double n = static_cast<double>(rows[b].n);
    rows[b].bleu = metrics::bleu_from_stats(stats[b]);
    rows[b].rouge_l = rouge[b] / n;
    rows[b].meteor = meteor[b] / n;
  }
  return rows;
}

EvalReport evaluate(std::span<const EvalItem> items, std::span<const std::uint64_t> bucket_edges) {
  std::vector<std::string> hyps;
  std::vector<std::string> refs;
  hyps.reserve(items.size());
  refs.reserve(items.size());
  for (const auto& item : items) {
    hyps.push_back(item.hypothesis);
    refs.push_back(item.reference);
  }
  const auto scores = kernels::pair_scores_omp(hyps, refs);

  EvalReport report;
  report.n_items = items.size();
  metrics::BleuStats pooled;
  double rouge = 0.0;
  double meteor = 0.0;
  for (std::size_t i = 0; i < items.size(); ++i) {
    report.per_term.push_back({items[i].term, scores[i]});
    pooled += scores[i].bleu_stats;
    rouge += scores[i].rouge_l;
    meteor += scores[i].meteor;
  }
  if (!items.empty()) {
    const double n = static_cast<double>(items.size());
    report.bleu = metrics::bleu_from_stats(pooled);
    report.rouge_l = rouge / n;
    report.meteor = meteor / n;
  }
  report.buckets = bucketize_by_frequency(report.per_term, bucket_edges);
  return report;
}

std::vector<std::string> HumanRatings::annotators() const {
  std::set<std::string> ids;
  for (const auto& [term, by_annotator] : ratings) {
    for (const auto& [id, rating] : by_annotator) ids.insert(id);
  }
  return {ids.begin(), ids.end()};
}

void HumanRatings::validate() const {
  if (ratings.empty()) throw Error(ErrorCode::kInvalidArgument, "no human ratings");
  const auto all = annotators();
  for (const auto& [term, by_annotator] : ratings) {
    if (by_annotator.size() != all.size()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "term '" + term + "' is not rated by every annotator");
    }
    for (const auto& [id, rating] : by_annotator) {
      if (rating < 1 || rating > 5) {
        throw Error(ErrorCode::kInvalidArgument, "rating outside 1..5 for '" + term + "'");
      }
    }
  }
}

HumanRatings HumanRatings::read_csv(std::istream& in) {
  HumanRatings out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    const auto fields = parse_csv_line(line);
    if (fields.size() != 3) {
      throw Error(ErrorCode::kParse, "ratings line " + std::to_string(line_no) + ": expected 3 fields");
    }
    if (line_no == 1 && fields[0] == "term" && fields[2] == "rating") continue;
    int rating = 0;
    try {
      std::size_t used = 0;
      rating = std::stoi(fields[2], &used);
      if (used != text::collapse_whitespace(fields[2]).size()) throw std::invalid_argument("tail");
    } catch (const std::exception&) {
      throw Error(ErrorCode::kParse, "ratings line " + std::to_string(line_no) + ": bad rating");
    }
    auto [it, inserted] = out.ratings[fields[0]].emplace(fields[1], rating);
    if (!inserted) {
      throw Error(ErrorCode::kParse, "ratings line " + std::to_string(line_no) +
                                         ": duplicate rating for term/annotator");
    }
  }
  return out;
}

double cohen_kappa(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size() || a.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "kappa needs two equal-length nonempty rating lists");
  }
  std::array<double, 6> pa{};
  std::array<double, 6> pb{};
  double agree = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] < 1 || a[i] > 5 || b[i] < 1 || b[i] > 5) {
      throw Error(ErrorCode::kInvalidArgument, "rating outside 1..5");
    }
    pa[static_cast<std::size_t>(a[i])] += 1;
    pb[static_cast<std::size_t>(b[i])] += 1;
    agree += a[i] == b[i];
  }
  const double n = static_cast<double>(a.size());
  const double po = agree / n;
  double pe = 0;
  for (std::size_t c = 1; c <= 5; ++c) pe += (pa[c] / n) * (pb[c] / n);
  if (pe >= 1.0) return po >= 1.0 ? 1.0 : 0.0;
  return (po - pe) / (1.0 - pe);
}

HumanAggregate aggregate_human(const HumanRatings& ratings) {
  ratings.validate();
  const auto ids = ratings.annotators();
  HumanAggregate out;
  out.n_terms = ratings.ratings.size();
  out.n_annotators = ids.size();

  std::vector<std::vector<int>> columns(ids.size());
  double sum = 0;
  std::size_t count = 0;
  for (const auto& [term, by_annotator] : ratings.ratings) {
    for (std::size_t a = 0; a < ids.size(); ++a) {
      const int r = by_annotator.at(ids[a]);
      columns[a].push_back(r);
      sum += r;
      ++count;
    }
  }
  out.mean = sum / static_cast<double>(count);
  if (ids.size() >= 2) {
    double total = 0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < ids.size(); ++i) {
      for (std::size_t j = i + 1; j < ids.size(); ++j) {
        total += cohen_kappa(columns[i], columns[j]);
        ++pairs;
      }
    }
    out.kappa = total / static_cast<double>(pairs);
  }
  return out;
}

nlohmann::json to_json(const EvalReport& r) {
  nlohmann::json per_term = nlohmann::json::array();
  for (const auto& t : r.per_term) {
    per_term.push_back({{"term", t.term.surface},
                        {"normalized", t.term.normalized},
                        {"ref_frequency", t.term.ref_frequency},
                        {"bleu", t.scores.bleu},
                        {"rouge_l", t.scores.rouge_l},
                        {"meteor", t.scores.meteor}});
  }
  nlohmann::json buckets = nlohmann::json::array();
  for (const auto& b : r.buckets) {
    buckets.push_back({{"lower", b.lower ? nlohmann::json(*b.lower) : nlohmann::json(nullptr)},
                       {"upper", b.upper ? nlohmann::json(*b.upper) : nlohmann::json(nullptr)},
                       {"n", b.n},
                       {"bleu", nullable(b.bleu)},
                       {"rouge_l", nullable(b.rouge_l)},
                       {"meteor", nullable(b.meteor)}});
  }
  nlohmann::json human = nullptr;
  if (r.human) {
    human = {{"mean", r.human->mean},
             {"kappa", nullable(r.human->kappa)},
             {"n_terms", r.human->n_terms},
             {"n_annotators", r.human->n_annotators}};
  }
  return {{"corpus",
           {{"bleu", r.bleu},
            {"rouge_l", r.rouge_l},
            {"meteor", r.meteor},
            {"meteor_variant", metrics::kMeteorVariant},
            {"bertscore", nullable(r.bertscore)},
            {"n_items", r.n_items}}},
          {"per_term", std::move(per_term)},
          {"buckets", std::move(buckets)},
          {"human", std::move(human)}};
}

EvalReport report_from_json(const nlohmann::json& j) {
  EvalReport r;
  const auto& c = j.at("corpus");
  r.bleu = c.at("bleu").get<double>();
  r.rouge_l = c.at("rouge_l").get<double>();
  r.meteor = c.at("meteor").get<double>();
  r.bertscore = optional_number(c, "bertscore");
  r.n_items = c.at("n_items").get<std::size_t>();
  for (const auto& t : j.at("per_term")) {
    TermScores ts;
    ts.term = Term::from_surface(t.at("term").get<std::string>(), Field::kOther,
                                 t.at("ref_frequency").get<std::uint64_t>());
    ts.scores.bleu = t.at("bleu").get<double>();
    ts.scores.rouge_l = t.at("rouge_l").get<double>();
    ts.scores.meteor = t.at("meteor").get<double>();
    r.per_term.push_back(std::move(ts));
  }
  for (const auto& b : j.at("buckets")) {
    BucketRow row;
    if (!b.at("lower").is_null()) row.lower = b.at("lower").get<std::uint64_t>();
    if (!b.at("upper").is_null()) row.upper = b.at("upper").get<std::uint64_t>();
    row.n = b.at("n").get<std::size_t>();
    row.bleu = optional_number(b, "bleu");
    row.rouge_l = optional_number(b, "rouge_l");
    row.meteor = optional_number(b, "meteor");
    r.buckets.push_back(row);
  }
  if (auto h = j.find("human"); h != j.end() && !h->is_null()) {
    HumanAggregate agg;
    agg.mean = h->at("mean").get<double>();
    agg.kappa = optional_number(*h, "kappa");
    agg.n_terms = h->value("n_terms", std::size_t{0});
    agg.n_annotators = h->value("n_annotators", std::size_t{0});
    r.human = agg;
  }
  return r;
}

std::string to_tsv(const EvalReport& r) {
  return "BL\tR-L\tMT\tBS\n" + format_score(r.bleu) + "\t" + format_score(r.rouge_l) + "\t" +
         format_score(r.meteor) + "\t" + format_score(r.bertscore) + "\n";
}

}  // namespace defpipe::evaluator
