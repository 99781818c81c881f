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

#include "defpipe/text.hpp"

#include <algorithm>
#include <array>
#include <unordered_map>
#include <unordered_set>

namespace defpipe::text {
namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}
bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }
bool is_lower(char c) { return c >= 'a' && c <= 'z'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_ascii_punct(char c) {
  const auto u = static_cast<unsigned char>(c);
  return u < 0x80 && u > 0x20 && u != 0x7f && !is_upper(c) && !is_lower(c) && !is_digit(c);
}
char lower(char c) { return is_upper(c) ? static_cast<char>(c - 'A' + 'a') : c; }

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

const std::unordered_set<std::string_view>& invariant_words() {
  static const std::unordered_set<std::string_view> words = {
      "physics",     "mathematics",  "economics",     "statistics",    "dynamics",
      "mechanics",   "electronics",  "linguistics",   "genetics",      "optics",
      "logistics",   "robotics",     "graphics",      "semantics",     "kinematics",
      "thermodynamics", "aerodynamics", "informatics", "analytics",     "ethics",
      "politics",    "acoustics",    "bioinformatics", "cybernetics",  "photonics",
      "electrodynamics", "hydrodynamics", "numerics", "combinatorics", "topology",
      "series",      "species",      "news",          "lens",          "gas",
      "bias",        "chaos",        "corpus",        "atlas",         "canvas",
      "alias",       "always",       "perhaps",       "whereas",       "thus",
      "does",        "has",          "was",           "its",           "this",
      "yes",         "less",         "sometimes",     "besides",       "towards",
      "afterwards",  "upwards",      "downwards",     "means",         "aids",
  };
  return words;
}

const std::unordered_map<std::string_view, std::string_view>& irregular_plurals() {
  static const std::unordered_map<std::string_view, std::string_view> words = {
      {"matrices", "matrix"},   {"vertices", "vertex"},     {"indices", "index"},
      {"appendices", "appendix"}, {"phenomena", "phenomenon"}, {"criteria", "criterion"},
      {"axes", "axis"},         {"theses", "thesis"},       {"analyses", "analysis"},
      {"hypotheses", "hypothesis"}, {"bases", "basis"},     {"children", "child"},
      {"men", "man"},           {"women", "woman"},         {"mice", "mouse"},
  };
  return words;
}

const std::unordered_set<std::string_view>& abbreviations() {
  static const std::unordered_set<std::string_view> words = {
      "fig.",  "figs.", "e.g.", "i.e.",  "al.",   "dr.",   "mr.",   "mrs.",   "ms.",
      "prof.", "vs.",   "eq.",  "eqs.",  "no.",   "vol.",  "pp.",   "approx.", "cf.",
      "sec.",  "ch.",   "st.",  "jr.",   "sr.",   "inc.",  "ltd.",  "co.",    "resp.",
      "ref.",  "refs.", "tab.", "dept.", "est.",  "ca.",   "viz.",  "ph.d.",  "u.s.",
      "thm.",  "def.",  "lem.", "prop.", "cor.",  "chap.", "ed.",   "eds.",
  };
  return words;
}

}  // namespace

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = lower(c);
  return out;
}

std::string collapse_whitespace(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending_space = false;
  for (char c : s) {
    if (is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(c);
  }
  return out;
}

std::vector<std::string> whitespace_split(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && is_space(s[i])) ++i;
    std::size_t j = i;
    while (j < s.size() && !is_space(s[j])) ++j;
    if (j > i) out.emplace_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

std::size_t whitespace_token_count(std::string_view s) {
  std::size_t count = 0;
  bool in_token = false;
  for (char c : s) {
    if (is_space(c)) {
      in_token = false;
    } else if (!in_token) {
      in_token = true;
      ++count;
    }
  }
  return count;
}

std::vector<std::string> normalize_tokens(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (is_space(c) || is_ascii_punct(c)) {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(lower(c));
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

std::string lemmatize_word(std::string_view word) {
  if (word.size() <= 3) return std::string(word);
  if (!std::all_of(word.begin(), word.end(), is_lower)) return std::string(word);
  if (invariant_words().contains(word)) return std::string(word);
  if (auto it = irregular_plurals().find(word); it != irregular_plurals().end()) {
    return std::string(it->second);
  }
  if (!ends_with(word, "s")) return std::string(word);
  if (ends_with(word, "ss") || ends_with(word, "us") || ends_with(word, "is")) {
    return std::string(word);
  }
  if (ends_with(word, "ies") && word.size() > 4) {
    return std::string(word.substr(0, word.size() - 3)) + "y";
  }
  if (ends_with(word, "sses") || ends_with(word, "xes") || ends_with(word, "ches") ||
      ends_with(word, "shes") || ends_with(word, "zzes")) {
    return std::string(word.substr(0, word.size() - 2));
  }
  return std::string(word.substr(0, word.size() - 1));
}

std::vector<std::string> lemma_tokens(std::string_view s) {
  auto tokens = normalize_tokens(s);
  for (auto& t : tokens) t = lemmatize_word(t);
  return tokens;
}

std::string normalize_term(std::string_view surface) {
  auto tokens = normalize_tokens(surface);
  if (tokens.empty()) return {};
  tokens.back() = lemmatize_word(tokens.back());
  std::string out = tokens.front();
  for (std::size_t i = 1; i < tokens.size(); ++i) {
    out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

std::optional<std::size_t> find_subsequence(std::span<const std::string> haystack,
                                             std::span<const std::string> needle) {
  if (needle.empty() || needle.size() > haystack.size()) return std::nullopt;
  auto it = std::search(haystack.begin(), haystack.end(), needle.begin(), needle.end());
  if (it == haystack.end()) return std::nullopt;
  return static_cast<std::size_t>(it - haystack.begin());
}

bool is_protected_abbreviation(std::string_view word) {
  std::size_t start = 0;
  while (start < word.size() && (word[start] == '(' || word[start] == '[' ||
                                 word[start] == '"' || word[start] == '\'')) {
    ++start;
  }
  return abbreviations().contains(to_lower(word.substr(start)));
}

std::vector<std::string> split_sentences(std::string_view text) {
  std::vector<std::string> out;
  const std::size_t n = text.size();
  std::size_t start = 0;
  int depth = 0;

  auto emit = [&](std::size_t end) {
    auto piece = text.substr(start, end - start);
    std::size_t a = 0;
    std::size_t b = piece.size();
    while (a < b && is_space(piece[a])) ++a;
    while (b > a && is_space(piece[b - 1])) --b;
    if (b > a) out.emplace_back(piece.substr(a, b - a));
  };

  std::size_t i = 0;
  while (i < n) {
    const char c = text[i];
    if (c == '(' || c == '[' || c == '{') {
      ++depth;
    } else if ((c == ')' || c == ']' || c == '}') && depth > 0) {
      --depth;
    }
    if (c != '.' && c != '!' && c != '?') {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < n && (text[j] == '.' || text[j] == '!' || text[j] == '?')) ++j;
    const bool single_period = (j == i + 1 && c == '.');
    while (j < n && (text[j] == '"' || text[j] == '\'')) ++j;
    if (j >= n || !is_space(text[j]) || depth > 0) {
      i = j;
      continue;
    }
    std::size_t next = j;
    while (next < n && is_space(text[next])) ++next;
    if (next >= n || !(is_upper(text[next]) || is_digit(text[next]))) {
      i = j;
      continue;
    }
    if (single_period) {
      std::size_t w = i;
      while (w > start && !is_space(text[w - 1])) --w;
      if (is_protected_abbreviation(text.substr(w, i + 1 - w))) {
        i = j;
        continue;
      }
    }
    emit(j);
    start = next;
    i = next;
  }
  if (start < n) emit(n);
  return out;
}

}  // namespace defpipe::text
