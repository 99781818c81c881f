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

#include "defpipe/cdi.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "defpipe/error.hpp"
#include "defpipe/ingest.hpp"
#include "defpipe/jsonl.hpp"
#include "defpipe/kernels.hpp"
#include "defpipe/text.hpp"

namespace defpipe::cdi {

CoreTermEntry CoreTermEntry::make(Term term, std::string definition) {
  CoreTermEntry e;
  e.doc_tokens = text::normalize_tokens(term.surface + " " + definition);
  e.term = std::move(term);
  e.definition = std::move(definition);
  return e;
}

Bm25Index Bm25Index::build(std::vector<CoreTermEntry> entries, double k1, double b) {
  if (entries.empty()) throw Error(ErrorCode::kEmptyIndex, "empty index");
  if (!(k1 > 0) || !std::isfinite(k1) || !(b >= 0 && b <= 1)) {
    throw Error(ErrorCode::kInvalidArgument, "BM25 parameters require k1 > 0 and 0 <= b <= 1");
  }
  Bm25Index index;
  index.k1_ = k1;
  index.b_ = b;
  index.entries_ = std::move(entries);
  index.doc_lengths_.reserve(index.entries_.size());
  std::uint64_t total = 0;
  for (std::uint32_t id = 0; id < index.entries_.size(); ++id) {
    const auto& tokens = index.entries_[id].doc_tokens;
    index.doc_lengths_.push_back(static_cast<std::uint32_t>(tokens.size()));
    total += tokens.size();
    std::map<std::string_view, std::uint32_t> tf;
    for (const auto& t : tokens) ++tf[t];
    for (const auto& [token, count] : tf) {
      index.postings_[std::string(token)].push_back({id, count});
    }
  }
  index.avg_doc_length_ = static_cast<double>(total) / static_cast<double>(index.entries_.size());
  return index;
}

std::span<const Posting> Bm25Index::postings(const std::string& token) const {
  auto it = postings_.find(token);
  if (it == postings_.end()) return {};
  return it->second;
}

std::uint32_t Bm25Index::term_frequency(const std::string& token, std::size_t entry) const {
  const auto list = postings(token);
  auto it = std::lower_bound(list.begin(), list.end(), entry,
                             [](const Posting& p, std::size_t e) { return p.entry < e; });
  return (it != list.end() && it->entry == entry) ? it->tf : 0;
}

double Bm25Index::idf(const std::string& token) const {
  const double n = static_cast<double>(entries_.size());
  const double df = static_cast<double>(document_frequency(token));
  return std::log(1.0 + (n - df + 0.5) / (df + 0.5));
}

double Bm25Index::contribution(double idf, std::uint32_t tf, std::uint32_t doc_length) const {
  const double f = static_cast<double>(tf);
  const double rel_len = avg_doc_length_ > 0 ? static_cast<double>(doc_length) / avg_doc_length_ : 0.0;
  return idf * (f * (k1_ + 1.0)) / (f + k1_ * (1.0 - b_ + b_ * rel_len));
}

void Bm25Index::save(std::ostream& out, const std::optional<nlohmann::json>& provenance) const {
  nlohmann::json header = {{"format", "cdi-index"},
                           {"version", 1},
                           {"k1", k1_},
                           {"b", b_},
                           {"n_docs", entries_.size()},
                           {"avg_doc_length", avg_doc_length_}};
  if (provenance) header["provenance"] = *provenance;
  out << header.dump() << '\n';
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    out << nlohmann::json{{"entry", i},
                          {"term", entries_[i].term},
                          {"definition", entries_[i].definition},
                          {"length", doc_lengths_[i]}}
               .dump()
        << '\n';
  }
  std::vector<const std::string*> tokens;
  tokens.reserve(postings_.size());
  for (const auto& [token, list] : postings_) tokens.push_back(&token);
  std::sort(tokens.begin(), tokens.end(), [](auto* a, auto* b) { return *a < *b; });
  for (const auto* token : tokens) {
    nlohmann::json list = nlohmann::json::array();
    for (const auto& p : postings_.at(*token)) list.push_back({p.entry, p.tf});
    out << nlohmann::json{{"token", *token}, {"postings", std::move(list)}}.dump() << '\n';
  }
}

Bm25Index Bm25Index::load(std::istream& in) {
  std::string line;
  auto next = [&]() -> nlohmann::json {
    while (std::getline(in, line)) {
      if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
      try {
        return nlohmann::json::parse(line);
      } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::kParse, std::string("cdi-index: ") + e.what());
      }
    }
    return nullptr;
  };

  const auto header = next();
  if (!header.is_object() || header.value("format", "") != "cdi-index" ||
      header.value("version", 0) != 1) {
    throw Error(ErrorCode::kParse, "not a version-1 cdi-index file");
  }
  const auto n = header.at("n_docs").get<std::size_t>();
  std::vector<CoreTermEntry> entries;
  entries.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto j = next();
    if (j.is_null() || j.at("entry").get<std::size_t>() != i) {
      throw Error(ErrorCode::kParse, "cdi-index: entry records out of order or missing");
    }
    auto e = CoreTermEntry::make(j.at("term").get<Term>(), j.at("definition").get<std::string>());
    if (e.doc_tokens.size() != j.at("length").get<std::size_t>()) {
      throw Error(ErrorCode::kParse, "cdi-index: stored length disagrees with tokenizer");
    }
    entries.push_back(std::move(e));
  }
  auto index = build(std::move(entries), header.at("k1").get<double>(), header.at("b").get<double>());

  std::size_t tokens_seen = 0;
  for (auto j = next(); !j.is_null(); j = next()) {
    const auto token = j.at("token").get<std::string>();
    const auto& stored = j.at("postings");
    const auto live = index.postings(token);
    bool same = stored.size() == live.size();
    for (std::size_t p = 0; same && p < live.size(); ++p) {
      same = stored[p].at(0).get<std::uint32_t>() == live[p].entry &&
             stored[p].at(1).get<std::uint32_t>() == live[p].tf;
    }
    if (!same) throw Error(ErrorCode::kParse, "cdi-index: postings for '" + token + "' disagree");
    ++tokens_seen;
  }
  if (tokens_seen != index.vocabulary_size()) {
    throw Error(ErrorCode::kParse, "cdi-index: postings table is incomplete");
  }
  return index;
}

double bm25_score(const Bm25Index& index, std::span<const std::string> query_tokens,
                  std::size_t entry_id) {
  if (entry_id >= index.n_docs()) throw Error(ErrorCode::kInvalidArgument, "entry id out of range");
  double score = 0.0;
  for (const auto& token : query_tokens) {
    const auto tf = index.term_frequency(token, entry_id);
    if (tf == 0) continue;
    score += index.contribution(index.idf(token), tf, index.doc_length(entry_id));
  }
  return score;
}

std::vector<std::string> query_tokens(const Term& target) {
  return text::normalize_tokens(target.surface);
}

std::vector<RelatedDefinition> retrieve_related(const Bm25Index& index, const Term& target,
                                                std::size_t k, bool exclude_self) {
  if (k == 0) return {};
  const auto query = query_tokens(target);
  const auto scores = kernels::bm25_scores_omp(index, query);

  std::vector<std::size_t> ids;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!(scores[i] > 0.0)) continue;
    if (exclude_self && index.entry(i).term.normalized == target.normalized) continue;
    ids.push_back(i);
  }
  auto before = [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    const auto& ta = index.entry(a).term;
    const auto& tb = index.entry(b).term;
    if (ta.normalized != tb.normalized) return ta.normalized < tb.normalized;
    if (ta.surface != tb.surface) return ta.surface < tb.surface;
    return a < b;
  };
  if (ids.size() > k) {
    std::partial_sort(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(k), ids.end(), before);
    ids.resize(k);
  } else {
    std::sort(ids.begin(), ids.end(), before);
  }

  std::vector<RelatedDefinition> out;
  out.reserve(ids.size());
  for (auto id : ids) {
    out.push_back({index.entry(id).term, index.entry(id).definition, scores[id]});
  }
  return out;
}

std::vector<CoreTermEntry> read_core_terms(std::istream& in) {
  std::vector<CoreTermEntry> out;
  for_each_jsonl(in, [&](const nlohmann::json& j, std::size_t line) {
    try {
      const auto field = parse_field(j.value("field", std::string("other")));
      auto definition = j.at("definition").get<std::string>();
      if (text::collapse_whitespace(definition).empty()) {
        throw Error(ErrorCode::kParse, "empty definition");
      }
      out.push_back(CoreTermEntry::make(
          Term::from_surface(j.at("surface").get<std::string>(), field), std::move(definition)));
    } catch (const std::exception& e) {
      throw Error(ErrorCode::kParse, "core terms line " + std::to_string(line) + ": " + e.what());
    }
  });
  return out;
}

std::vector<CoreTermEntry> core_terms_from_encyclopedia(std::span<const Document> docs) {
  std::vector<CoreTermEntry> out;
  for (const auto& doc : docs) {
    if (doc.source != Source::kEncyclopedia) continue;
    auto first = ingest::first_summary_sentence(doc);
    if (!first || text::normalize_term(doc.title).empty()) continue;
    out.push_back(CoreTermEntry::make(Term::from_surface(doc.title), std::move(*first)));
  }
  return out;
}

}  // namespace defpipe::cdi
