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

#include "defpipe/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include "defpipe/error.hpp"
#include "defpipe/random.hpp"
#include "defpipe/text.hpp"

namespace defpipe::ingest {
namespace {

struct LineOutcome {
  std::optional<Document> doc;
  std::string problem;
};

LineOutcome parse_record(const std::string& line, Source expected) {
  LineOutcome out;
  try {
    const auto j = nlohmann::json::parse(line);
    if (!j.is_object()) {
      out.problem = "record is not a JSON object";
      return out;
    }
    nlohmann::json rec = j;
    if (!rec.contains("source")) rec["source"] = to_string(expected);
    if (!rec.contains("url")) rec["url"] = nullptr;
    auto doc = rec.get<Document>();
    if (doc.doc_id.empty()) {
      out.problem = "empty doc_id";
    } else if (doc.source != expected) {
      out.problem = "source '" + std::string(to_string(doc.source)) + "' where '" +
                    std::string(to_string(expected)) + "' was expected";
    } else if (doc.source == Source::kEncyclopedia && !doc.find_section(kSummarySection)) {
      out.problem = "encyclopedia document without a summary section";
    } else {
      out.doc = std::move(doc);
    }
  } catch (const std::exception& e) {
    out.problem = e.what();
  }
  return out;
}

std::string join(const std::vector<std::string>& tokens) {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out.push_back(' ');
    out += t;
  }
  return out;
}

}  // namespace

ParseResult parse_corpus(std::istream& in, Source source) {
  if (!in.good()) throw Error(ErrorCode::kIo, "corpus stream is not readable");
  std::vector<std::pair<std::size_t, std::string>> lines;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    lines.emplace_back(line_no, std::move(line));
  }
  if (in.bad()) throw Error(ErrorCode::kIo, "read failure in corpus stream");

  std::vector<LineOutcome> outcomes(lines.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(lines.size()); ++i) {
    outcomes[i] = parse_record(lines[i].second, source);
  }

  ParseResult result;
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    auto& o = outcomes[i];
    if (o.doc && !seen.insert(o.doc->doc_id).second) {
      o.problem = "duplicate doc_id '" + o.doc->doc_id + "'";
      o.doc.reset();
    }
    if (!o.doc) {
      ++result.skipped;
      result.warnings.push_back("line " + std::to_string(lines[i].first) + ": " + o.problem);
      continue;
    }
    result.documents.push_back(std::move(*o.doc));
  }
  return result;
}

SentenceIndex::SentenceIndex(std::span<const Document> docs) {
  std::vector<std::vector<Entry>> per_doc(docs.size());
#pragma omp parallel for schedule(dynamic, 8)
  for (std::ptrdiff_t d = 0; d < static_cast<std::ptrdiff_t>(docs.size()); ++d) {
    for (const auto& section : docs[d].sections) {
      for (auto& sentence : text::split_sentences(section.text)) {
        Entry e;
        e.doc = static_cast<std::uint32_t>(d);
        e.section = section.name;
        e.lemmas = text::lemma_tokens(sentence);
        e.text = std::move(sentence);
        per_doc[d].push_back(std::move(e));
      }
    }
  }

  doc_ids_.reserve(docs.size());
  sources_.reserve(docs.size());
  for (const auto& doc : docs) {
    doc_ids_.push_back(doc.doc_id);
    sources_.push_back(doc.source);
  }
  for (auto& entries : per_doc) {
    for (auto& e : entries) entries_.push_back(std::move(e));
  }
  for (std::uint32_t id = 0; id < entries_.size(); ++id) {
    for (const auto& token : entries_[id].lemmas) {
      auto& list = postings_[token];
      if (list.empty() || list.back() != id) list.push_back(id);
    }
  }
}

std::vector<std::size_t> SentenceIndex::mentions(const Term& term) const {
  const auto needle = text::lemma_tokens(term.normalized);
  std::vector<std::size_t> out;
  if (needle.empty()) return out;
  const std::vector<std::uint32_t>* shortest = nullptr;
  for (const auto& token : needle) {
    auto it = postings_.find(token);
    if (it == postings_.end()) return out;
    if (!shortest || it->second.size() < shortest->size()) shortest = &it->second;
  }
  for (auto id : *shortest) {
    if (text::contains_subsequence(entries_[id].lemmas, needle)) out.push_back(id);
  }
  return out;
}

SentenceRecord SentenceIndex::record(std::size_t id, bool contains_term) const {
  const auto& e = entries_[id];
  return SentenceRecord{e.text, doc_ids_[e.doc], sources_[e.doc], e.section, contains_term};
}

std::uint64_t term_frequency(const Term& term, const SentenceIndex& corpus) {
  return corpus.mentions(term).size();
}

std::uint64_t term_frequency(const Term& term, std::span<const Document> corpus) {
  return term_frequency(term, SentenceIndex(corpus));
}

std::vector<SentenceRecord> find_mentions(const Term& term, const SentenceIndex& corpus,
                                          std::optional<Source> only) {
  std::vector<SentenceRecord> out;
  std::unordered_set<std::string> seen;
  for (auto id : corpus.mentions(term)) {
    if (only && corpus.source(id) != *only) continue;
    if (!seen.insert(join(corpus.entry(id).lemmas)).second) continue;
    out.push_back(corpus.record(id, true));
  }
  return out;
}

void validate(const SplitRatios& r) {
  if (r.train < 0 || r.valid < 0 || r.test < 0 || !std::isfinite(r.train + r.valid + r.test) ||
      std::abs(r.train + r.valid + r.test - 1.0) > 1e-9) {
    throw Error(ErrorCode::kInvalidArgument, "split ratios must be non-negative and sum to 1");
  }
}

std::vector<Split> assign_splits(std::size_t n, const SplitRatios& ratios, std::uint64_t seed) {
  validate(ratios);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  SeededRng rng(mix_seed(seed, "split"));
  rng.shuffle(std::span<std::size_t>(order));

  const auto n_train = std::min<std::size_t>(n, std::llround(ratios.train * n));
  const auto n_valid = std::min<std::size_t>(n - n_train, std::llround(ratios.valid * n));
  std::vector<Split> out(n, Split::kTest);
  for (std::size_t pos = 0; pos < n; ++pos) {
    out[order[pos]] = pos < n_train              ? Split::kTrain
                      : pos < n_train + n_valid ? Split::kValid
                                                : Split::kTest;
  }
  return out;
}

std::optional<std::string> first_summary_sentence(const Document& doc) {
  const auto* summary = doc.find_section(kSummarySection);
  if (!summary) return std::nullopt;
  auto sentences = text::split_sentences(summary->text);
  if (sentences.empty()) return std::nullopt;
  return std::move(sentences.front());
}

std::unordered_map<std::string, std::size_t> index_by_title(std::span<const Document> docs) {
  std::unordered_map<std::string, std::size_t> out;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    if (docs[i].source != Source::kEncyclopedia) continue;
    const auto key = text::normalize_term(docs[i].title);
    if (!key.empty()) out.emplace(key, i);
  }
  return out;
}

std::vector<Term> canonical_term_order(std::span<const Term> terms) {
  std::vector<Term> sorted(terms.begin(), terms.end());
  std::stable_sort(sorted.begin(), sorted.end(), [](const Term& a, const Term& b) {
    return a.normalized < b.normalized;
  });
  sorted.erase(std::unique(sorted.begin(), sorted.end(),
                           [](const Term& a, const Term& b) {
                             return a.normalized == b.normalized;
                           }),
               sorted.end());
  return sorted;
}

std::vector<ExtractionExample> build_extraction_dataset(std::span<const Document> corpus,
                                                        std::span<const Term> terms,
                                                        const ExtractionOptions& options,
                                                        std::vector<std::string>* warnings) {
  validate(options.ratios);
  auto warn = [&](std::string msg) {
    if (warnings) warnings->push_back(std::move(msg));
  };

  const auto by_title = index_by_title(corpus);
  std::vector<std::vector<ExtractionExample>> per_term;

  for (const auto& term : canonical_term_order(terms)) {
    if (term.ref_frequency < options.min_freq) continue;
    auto it = by_title.find(term.normalized);
    if (it == by_title.end()) {
      warn("term '" + term.surface + "' has no encyclopedia page");
      continue;
    }
    const Document& doc = corpus[it->second];
    std::vector<ExtractionExample> examples;
    const auto needle = text::lemma_tokens(term.normalized);

    if (auto first = first_summary_sentence(doc)) {
      SentenceRecord rec{*first, doc.doc_id, doc.source, std::string(kSummarySection),
                         text::contains_subsequence(text::lemma_tokens(*first), needle)};
      examples.push_back({term, std::move(rec), Label::kPositive, Split::kTrain});
    } else {
      warn("term '" + term.surface + "' has no summary sentence; no positive emitted");
    }

    std::vector<SentenceRecord> negatives;
    for (const auto& section : doc.sections) {
      if (section.name == kSummarySection) continue;
      for (auto& sentence : text::split_sentences(section.text)) {
        if (!text::contains_subsequence(text::lemma_tokens(sentence), needle)) continue;
        negatives.push_back({std::move(sentence), doc.doc_id, doc.source, section.name, true});
      }
    }
    std::vector<std::size_t> picks(negatives.size());
    std::iota(picks.begin(), picks.end(), std::size_t{0});
    SeededRng rng(mix_seed(options.seed, "negatives:" + term.normalized));
    rng.shuffle(std::span<std::size_t>(picks));
    picks.resize(std::min(picks.size(), options.max_negatives));
    std::sort(picks.begin(), picks.end());
    for (auto p : picks) {
      examples.push_back({term, std::move(negatives[p]), Label::kNegative, Split::kTrain});
    }

    if (!examples.empty()) per_term.push_back(std::move(examples));
  }

  const auto splits = assign_splits(per_term.size(), options.ratios, options.seed);
  std::vector<ExtractionExample> out;
  for (std::size_t t = 0; t < per_term.size(); ++t) {
    for (auto& ex : per_term[t]) {
      ex.split = splits[t];
      out.push_back(std::move(ex));
    }
  }
  return out;
}

std::vector<GenerationExample> build_generation_dataset(std::span<const Document> encyclopedia,
                                                        std::span<const Document> web,
                                                        std::span<const Term> terms,
                                                        const SplitRatios& ratios,
                                                        std::uint64_t seed,
                                                        std::vector<std::string>* warnings) {
  validate(ratios);
  auto warn = [&](std::string msg) {
    if (warnings) warnings->push_back(std::move(msg));
  };
  const auto by_title = index_by_title(encyclopedia);
  const SentenceIndex web_index(web);

  std::vector<GenerationExample> out;
  for (const auto& term : canonical_term_order(terms)) {
    auto it = by_title.find(term.normalized);
    if (it == by_title.end()) continue;
    auto gold = first_summary_sentence(encyclopedia[it->second]);
    if (!gold) {
      warn("term '" + term.surface + "' has no summary sentence; excluded");
      continue;
    }
    GenerationExample ex;
    ex.term = term;
    ex.gold_definition = *gold;
    const auto gold_key = join(text::lemma_tokens(*gold));
    for (auto& rec : find_mentions(term, web_index, Source::kWeb)) {
      if (rec.text == ex.gold_definition || join(text::lemma_tokens(rec.text)) == gold_key) {
        continue;
      }
      ex.candidate_sentences.push_back(std::move(rec));
    }
    if (ex.candidate_sentences.empty()) {
      warn("term '" + term.surface + "' has no web candidates");
    }
    out.push_back(std::move(ex));
  }

  const auto splits = assign_splits(out.size(), ratios, mix_seed(seed, "generation"));
  for (std::size_t i = 0; i < out.size(); ++i) out[i].split = splits[i];
  return out;
}

}  // namespace defpipe::ingest
