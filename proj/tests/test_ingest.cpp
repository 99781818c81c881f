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

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "defpipe/error.hpp"
#include "defpipe/ingest.hpp"
#include "defpipe/text.hpp"
#include "synthetic.hpp"

using namespace defpipe;
using nlohmann::json;

namespace {

Document enc_doc(std::string id, std::string title, std::string summary,
                 std::vector<Section> extra = {}) {
  Document d{std::move(id), std::move(title), Source::kEncyclopedia, std::nullopt, {}};
  d.sections.push_back({"summary", std::move(summary)});
  for (auto& s : extra) d.sections.push_back(std::move(s));
  return d;
}

Document web_doc(std::string id, std::string body) {
  return Document{std::move(id), "page " + id, Source::kWeb, std::nullopt, {{"body", std::move(body)}}};
}

Term term(const std::string& surface, std::uint64_t freq = 100) {
  return Term::from_surface(surface, Field::kOther, freq);
}

}  // namespace

TEST_CASE("parse_corpus counts and skips", "[ingest][parse]") {
  SECTION("empty stream") {
    std::istringstream in("");
    const auto r = ingest::parse_corpus(in, Source::kWeb);
    CHECK(r.documents.empty());
    CHECK(r.skipped == 0);
  }
  SECTION("single record round-trips") {
    std::istringstream in(R"({"doc_id":"w1","title":"Twin prime","source":"web","url":"http://x","sections":[{"name":"body","text":"Hi."}]})");
    const auto r = ingest::parse_corpus(in, Source::kWeb);
    REQUIRE(r.documents.size() == 1);
    CHECK(r.documents[0].title == "Twin prime");
    CHECK(r.documents[0].url == std::optional<std::string>("http://x"));
  }
  SECTION("10 records with 2 malformed") {
    std::ostringstream s;
    for (int i = 0; i < 10; ++i) {
      if (i == 3) s << "{\"doc_id\": \"w3\", \"title\":\n";
      else if (i == 7) s << "{\"doc_id\": \"w7\", \"sections\": []}\n";
      else s << json{{"doc_id", "w" + std::to_string(i)}, {"title", "t"}, {"sections", json::array()}}.dump() << '\n';
    }
    std::istringstream in(s.str());
    const auto r = ingest::parse_corpus(in, Source::kWeb);
    CHECK(r.documents.size() == 8);
    CHECK(r.skipped == 2);
    CHECK(r.warnings.size() == 2);
    CHECK(r.documents[3].doc_id == "w4");
  }
  SECTION("duplicates, wrong source and missing summary") {
    std::istringstream in(
        R"({"doc_id":"e1","title":"A","source":"encyclopedia","sections":[{"name":"summary","text":"A is B."}]}
{"doc_id":"e1","title":"A again","source":"encyclopedia","sections":[{"name":"summary","text":"x"}]}
{"doc_id":"e2","title":"B","source":"web","sections":[{"name":"summary","text":"x"}]}
{"doc_id":"e3","title":"C","source":"encyclopedia","sections":[{"name":"body","text":"x"}]}
{"doc_id":"","title":"D","source":"encyclopedia","sections":[{"name":"summary","text":"x"}]}
)");
    const auto r = ingest::parse_corpus(in, Source::kEncyclopedia);
    REQUIRE(r.documents.size() == 1);
    CHECK(r.documents[0].title == "A");
    CHECK(r.skipped == 4);
  }
  SECTION("unreadable stream is fatal") {
    std::istringstream in("x");
    in.setstate(std::ios::badbit);
    CHECK_THROWS_AS(ingest::parse_corpus(in, Source::kWeb), Error);
  }
}

TEST_CASE("term_frequency counts containing sentences", "[ingest][freq]") {
  // 7 sentences across 3 documents mention "twin prime" (one through the
  // plural); 3 more mention "prime" without the full term.
  const std::vector<Document> docs = {
      web_doc("a", "A twin prime is a prime. Twin primes are rare. Primes are common."),
      web_doc("b", "The twin prime conjecture is open. Is 3 a twin prime? Yes, with 5 it is a twin prime. Twin and prime apart."),
      web_doc("c", "Large twin prime pairs exist. Another twin prime record fell. No prime here."),
  };
  CHECK(ingest::term_frequency(term("twin prime"), docs) == 7);
  CHECK(ingest::term_frequency(term("twin primes"), docs) == 7);
  CHECK(ingest::term_frequency(term("conjecture"), docs) == 1);
  CHECK(ingest::term_frequency(term("riemann hypothesis"), docs) == 0);
  CHECK(ingest::term_frequency(term("twin prime"), std::vector<Document>{}) == 0);
}

TEST_CASE("SentenceIndex mentions equal a linear scan", "[ingest][freq][property]") {
  SeededRng rng(21);
  for (int iter = 0; iter < 200; ++iter) {
    std::vector<Document> docs;
    const auto n_docs = 1 + rng.uniform_index(5);
    for (std::size_t d = 0; d < n_docs; ++d) {
      std::string body;
      const auto n_sent = 1 + rng.uniform_index(4);
      for (std::size_t s = 0; s < n_sent; ++s) body += testing::random_sentence(rng, 1, 8) + " ";
      docs.push_back(web_doc("d" + std::to_string(d), body));
    }
    const ingest::SentenceIndex index(docs);
    const auto surface = testing::random_sentence(rng, 1, 2);
    const auto t = term(surface.substr(0, surface.size() - 1));
    const auto needle = text::lemma_tokens(t.normalized);
    std::vector<std::size_t> expected;
    std::size_t id = 0;
    for (const auto& d : docs) {
      for (const auto& s : text::split_sentences(d.sections[0].text)) {
        if (text::contains_subsequence(text::lemma_tokens(s), needle)) expected.push_back(id);
        ++id;
      }
    }
    REQUIRE(index.size() == id);
    REQUIRE(index.mentions(t) == expected);
  }
}

TEST_CASE("assign_splits proportions and determinism", "[ingest][split]") {
  const ingest::SplitRatios r{0.8, 0.1, 0.1};
  const auto a = ingest::assign_splits(10, r, 42);
  CHECK(a == ingest::assign_splits(10, r, 42));
  CHECK(std::count(a.begin(), a.end(), Split::kTrain) == 8);
  CHECK(std::count(a.begin(), a.end(), Split::kValid) == 1);
  CHECK(std::count(a.begin(), a.end(), Split::kTest) == 1);
  const auto big = ingest::assign_splits(1000, r, 1);
  CHECK(std::count(big.begin(), big.end(), Split::kTrain) == 800);
  CHECK(ingest::assign_splits(0, r, 1).empty());
  CHECK_THROWS_AS(ingest::validate(ingest::SplitRatios{0.5, 0.5, 0.5}), Error);
  CHECK_THROWS_AS(ingest::validate(ingest::SplitRatios{1.2, -0.1, -0.1}), Error);
}

TEST_CASE("build_extraction_dataset", "[ingest][extraction]") {
  ingest::ExtractionOptions opts;
  opts.seed = 9;

  SECTION("single summary sentence, no other mentions") {
    const std::vector<Document> corpus = {enc_doc("e1", "Twin prime", "A twin prime is a prime number.")};
    const std::vector<Term> terms = {term("twin prime")};
    const auto ds = ingest::build_extraction_dataset(corpus, terms, opts);
    REQUIRE(ds.size() == 1);
    CHECK(ds[0].label == Label::kPositive);
    CHECK(ds[0].sentence.section == "summary");
    CHECK(ds[0].sentence.contains_term);
  }

  SECTION("nine non-summary mentions are capped at five") {
    std::string body;
    for (int i = 0; i < 9; ++i) body += "Fact " + std::to_string(i) + " about the twin prime. ";
    body += "Unrelated remark.";
    const std::vector<Document> corpus = {
        enc_doc("e1", "Twin prime", "A twin prime is a prime number. More text.", {{"history", body}})};
    const std::vector<Term> terms = {term("twin prime")};
    const auto ds = ingest::build_extraction_dataset(corpus, terms, opts);
    const auto negatives = std::count_if(ds.begin(), ds.end(), [](const auto& e) { return e.label == Label::kNegative; });
    CHECK(negatives == 5);
    CHECK(ds.size() == 6);
    for (const auto& e : ds) {
      if (e.label == Label::kNegative) CHECK(e.sentence.section == "history");
    }
    CHECK(ds == ingest::build_extraction_dataset(corpus, terms, opts));
    opts.max_negatives = 0;
    CHECK(ingest::build_extraction_dataset(corpus, terms, opts).size() == 1);
  }

  SECTION("ten terms split 8/1/1 and stay stable") {
    std::vector<Document> corpus;
    std::vector<Term> terms;
    for (int i = 0; i < 10; ++i) {
      const auto name = "concept " + std::string(1, static_cast<char>('a' + i));
      corpus.push_back(enc_doc("e" + std::to_string(i), name, "The " + name + " is a thing.",
                               {{"usage", "We use the " + name + " daily."}}));
      terms.push_back(term(name));
    }
    const auto ds = ingest::build_extraction_dataset(corpus, terms, opts);
    const auto again = ingest::build_extraction_dataset(corpus, terms, opts);
    CHECK(ds == again);
    std::map<std::string, std::set<Split>> per_term;
    std::map<Split, std::set<std::string>> per_split;
    for (const auto& e : ds) {
      per_term[e.term.normalized].insert(e.split);
      per_split[e.split].insert(e.term.normalized);
    }
    for (const auto& [t, splits] : per_term) CHECK(splits.size() == 1);
    CHECK(per_split[Split::kTrain].size() == 8);
    CHECK(per_split[Split::kValid].size() == 1);
    CHECK(per_split[Split::kTest].size() == 1);
    std::reverse(terms.begin(), terms.end());
    CHECK(ingest::build_extraction_dataset(corpus, terms, opts) == ds);
  }

  SECTION("frequency filter and missing pages") {
    const std::vector<Document> corpus = {enc_doc("e1", "Twin prime", "A twin prime is a prime.")};
    const std::vector<Term> terms = {term("twin prime", 4), term("cousin prime", 50)};
    std::vector<std::string> warnings;
    CHECK(ingest::build_extraction_dataset(corpus, terms, opts, &warnings).empty());
    CHECK(warnings.size() == 1);
    opts.min_freq = 4;
    for (const auto& e : ingest::build_extraction_dataset(corpus, terms, opts)) {
      CHECK(e.term.ref_frequency >= opts.min_freq);
    }
  }

  SECTION("empty summary section yields no positive and a warning") {
    const std::vector<Document> corpus = {
        enc_doc("e1", "Twin prime", "   ", {{"history", "The twin prime question is old."}})};
    const std::vector<Term> terms = {term("twin prime")};
    std::vector<std::string> warnings;
    const auto ds = ingest::build_extraction_dataset(corpus, terms, opts, &warnings);
    REQUIRE(ds.size() == 1);
    CHECK(ds[0].label == Label::kNegative);
    CHECK(warnings.size() == 1);
  }
}

TEST_CASE("build_generation_dataset", "[ingest][generation]") {
  const std::vector<Document> enc = {
      enc_doc("e1", "Twin prime", "A twin prime is a prime that differs from another by two. More."),
      enc_doc("e2", "Meta learning", "Meta learning is learning to learn."),
      enc_doc("e3", "Organic chemistry", "Organic chemistry studies carbon compounds."),
  };
  const std::vector<Document> web = {
      web_doc("w1", "A twin prime is a prime that differs from another by two. Twin prime pairs are rare. "
                    "Twin prime pairs are rare."),
      web_doc("w2", "Meta learning is popular. A TWIN PRIME is a prime that differs from another by two."),
  };
  const std::vector<Term> terms = {term("twin prime"), term("meta learning"), term("organic chemistry"),
                                   term("dark matter")};
  std::vector<std::string> warnings;
  const auto ds = ingest::build_generation_dataset(enc, web, terms, {}, 5, &warnings);
  REQUIRE(ds.size() == 3);
  std::map<std::string, const GenerationExample*> by_term;
  for (const auto& g : ds) by_term[g.term.normalized] = &g;
  REQUIRE(by_term.count("twin prime"));
  const auto& tp = *by_term["twin prime"];
  CHECK(tp.gold_definition == "A twin prime is a prime that differs from another by two.");
  REQUIRE(tp.candidate_sentences.size() == 1);
  CHECK(tp.candidate_sentences[0].text == "Twin prime pairs are rare.");
  CHECK(by_term["organic chemistry"]->candidate_sentences.empty());
  CHECK(by_term["meta learning"]->candidate_sentences.size() == 1);
  CHECK_FALSE(warnings.empty());
  for (const auto& g : ds) {
    for (const auto& c : g.candidate_sentences) {
      CHECK(c.source == Source::kWeb);
      CHECK(c.text != g.gold_definition);
      CHECK(c.contains_term);
    }
  }
  CHECK(ds == ingest::build_generation_dataset(enc, web, terms, {}, 5));
}

TEST_CASE("first_summary_sentence and canonical order", "[ingest]") {
  CHECK(ingest::first_summary_sentence(enc_doc("e", "T", "First one. Second one.")) ==
        std::optional<std::string>("First one."));
  CHECK_FALSE(ingest::first_summary_sentence(Document{"w", "T", Source::kWeb, std::nullopt, {}}).has_value());
  const std::vector<Term> terms = {term("b"), term("A"), term("a"), term("B")};
  const auto ordered = ingest::canonical_term_order(terms);
  REQUIRE(ordered.size() == 2);
  CHECK(ordered[0].normalized == "a");
  CHECK(ordered[1].normalized == "b");
}
