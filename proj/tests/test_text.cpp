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

#include "defpipe/random.hpp"
#include "defpipe/text.hpp"
#include "synthetic.hpp"

using namespace defpipe;
using Strings = std::vector<std::string>;

namespace {

std::string visible(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c != ' ' && c != '\t' && c != '\n' && c != '\r') out += c;
  }
  return out;
}

}  // namespace

TEST_CASE("split_sentences boundary rules", "[text][split]") {
  CHECK(text::split_sentences("").empty());
  CHECK(text::split_sentences("   ").empty());
  CHECK(text::split_sentences("A is B. C is D.") == Strings{"A is B.", "C is D."});
  CHECK(text::split_sentences("See Fig. 2 for details. Done.") ==
        Strings{"See Fig. 2 for details.", "Done."});
  CHECK(text::split_sentences("Is it? Yes! 42 is even.") == Strings{"Is it?", "Yes!", "42 is even."});
  CHECK(text::split_sentences("lowercase. after a dot stays") ==
        Strings{"lowercase. after a dot stays"});
  CHECK(text::split_sentences("Shown by Smith et al. Later work agreed.") ==
        Strings{"Shown by Smith et al. Later work agreed."});
  CHECK(text::split_sentences("Use tools (e.g. Ab. Cd) here. Next one.") ==
        Strings{"Use tools (e.g. Ab. Cd) here.", "Next one."});
  CHECK(text::split_sentences("He said \"Stop.\" Then left.") ==
        Strings{"He said \"Stop.\"", "Then left."});
  CHECK(text::split_sentences("Wait... Okay.") == Strings{"Wait...", "Okay."});
}

TEST_CASE("split_sentences never drops or reorders visible characters", "[text][split][property]") {
  SeededRng rng(11);
  const Strings pieces = {"A", "b", ".", "!", "?", " ", "  ", "Fig.", "(", ")", "[", "]", "e.g.",
                          "7", "x", "\"", "Dr.", "\n"};
  for (int iter = 0; iter < 2000; ++iter) {
    std::string s;
    const auto n = rng.uniform_index(30);
    for (std::size_t i = 0; i < n; ++i) s += pieces[rng.uniform_index(pieces.size())];
    std::string rejoined;
    for (const auto& sent : text::split_sentences(s)) {
      CHECK_FALSE(sent.empty());
      rejoined += sent;
    }
    REQUIRE(visible(rejoined) == visible(s));
  }
}

TEST_CASE("lemmatize_word suffix table", "[text][lemma]") {
  CHECK(text::lemmatize_word("primes") == "prime");
  CHECK(text::lemmatize_word("theories") == "theory");
  CHECK(text::lemmatize_word("classes") == "class");
  CHECK(text::lemmatize_word("boxes") == "box");
  CHECK(text::lemmatize_word("matrices") == "matrix");
  CHECK(text::lemmatize_word("physics") == "physics");
  CHECK(text::lemmatize_word("analysis") == "analysis");
  CHECK(text::lemmatize_word("corpus") == "corpus");
  CHECK(text::lemmatize_word("glass") == "glass");
  CHECK(text::lemmatize_word("ties") == "tie");
  CHECK(text::lemmatize_word("lies") == "lie");
  CHECK(text::lemmatize_word("bus") == "bus");
  CHECK(text::lemmatize_word("NASA") == "NASA");
}

TEST_CASE("lemmatize_word is idempotent", "[text][lemma][property]") {
  for (std::string w : {"primes", "theories", "classes", "matrices", "series", "graphs", "stresses",
                        "churches", "buzzes", "learning", "gas", "ss", "xs"}) {
    const auto once = text::lemmatize_word(w);
    CHECK(text::lemmatize_word(once) == once);
  }
  SeededRng rng(3);
  const std::string alphabet = "abceihsuxyz";
  for (int iter = 0; iter < 20000; ++iter) {
    std::string w;
    const auto n = 1 + rng.uniform_index(8);
    for (std::size_t i = 0; i < n; ++i) w += alphabet[rng.uniform_index(alphabet.size())];
    const auto once = text::lemmatize_word(w);
    REQUIRE(text::lemmatize_word(once) == once);
  }
}

TEST_CASE("normalize_term lemmatizes only the head", "[text][term]") {
  CHECK(text::normalize_term("Twin Primes") == "twin prime");
  CHECK(text::normalize_term("few-shot learning") == "few shot learning");
  CHECK(text::normalize_term("  Boolean   algebras ") == "boolean algebra");
  CHECK(text::normalize_term("sets of numbers") == "sets of number");
  CHECK(text::normalize_term("!!!").empty());
}

TEST_CASE("normalize_tokens and subsequence search", "[text]") {
  CHECK(text::normalize_tokens("Zero-shot, learning!") == Strings{"zero", "shot", "learning"});
  const Strings hay = {"a", "twin", "prime", "is", "twin", "prime"};
  const Strings needle = {"twin", "prime"};
  CHECK(text::find_subsequence(hay, needle) == std::optional<std::size_t>(1));
  CHECK_FALSE(text::contains_subsequence(hay, Strings{"prime", "twin", "x"}));
  CHECK_FALSE(text::find_subsequence(hay, Strings{}).has_value());
  CHECK(text::collapse_whitespace("  a \t b\n") == "a b");
  CHECK(text::whitespace_token_count(" a  b c ") == 3);
}

TEST_CASE("SeededRng is reproducible", "[random]") {
  SeededRng a(5), b(5);
  for (int i = 0; i < 100; ++i) REQUIRE(a.uniform_index(17) == b.uniform_index(17));
  CHECK(mix_seed(1, "x") != mix_seed(1, "y"));
  CHECK(mix_seed(1, "x") == mix_seed(1, "x"));
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
}
