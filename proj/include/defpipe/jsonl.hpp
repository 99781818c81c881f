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

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <istream>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace defpipe {

inline constexpr std::string_view kToolVersion = "defpipe 0.1.0";

/// Stamped at the head of every artifact the CLI writes.
struct Provenance {
  std::string config_hash;
  std::int64_t seed = 0;
  std::string tool_version{kToolVersion};

  nlohmann::json to_json() const;
};

// JSONL artifacts start with a single {"provenance": {...}} line.
bool is_provenance_record(const nlohmann::json& j);

std::ifstream open_input(const std::filesystem::path& path);

// Calls `fn(record, line_number)` for every non-blank line; provenance
// records are skipped. Throws kParse on malformed JSON.
void for_each_jsonl(std::istream& in,
                    const std::function<void(const nlohmann::json&, std::size_t)>& fn);

/// Write-temp-then-rename output file. Nothing appears at the destination
/// unless commit() is called; a destroyed uncommitted file is removed.
class AtomicFile {
 public:
  explicit AtomicFile(std::filesystem::path destination);
  ~AtomicFile();

  AtomicFile(const AtomicFile&) = delete;
  AtomicFile& operator=(const AtomicFile&) = delete;

  std::ofstream& stream() { return out_; }
  void commit();

 private:
  std::filesystem::path destination_;
  std::filesystem::path temp_;
  std::ofstream out_;
  bool committed_ = false;
};

void write_text_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace defpipe
