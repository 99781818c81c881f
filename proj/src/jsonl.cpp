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

#include "defpipe/jsonl.hpp"

#include <system_error>

#include "defpipe/error.hpp"

namespace defpipe {

nlohmann::json Provenance::to_json() const {
  return {{"config_hash", config_hash}, {"seed", seed}, {"tool_version", tool_version}};
}

bool is_provenance_record(const nlohmann::json& j) {
  return j.is_object() && j.size() == 1 && j.contains("provenance");
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open input '" + path.string() + "'");
  return in;
}

void for_each_jsonl(std::istream& in,
                    const std::function<void(const nlohmann::json&, std::size_t)>& fn) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorCode::kParse,
                  "line " + std::to_string(line_no) + ": " + std::string(e.what()));
    }
    if (is_provenance_record(j)) continue;
    fn(j, line_no);
  }
  if (in.bad()) throw Error(ErrorCode::kIo, "read failure in JSONL stream");
}

AtomicFile::AtomicFile(std::filesystem::path destination)
    : destination_(std::move(destination)) {
  if (destination_.has_parent_path()) {
    std::filesystem::create_directories(destination_.parent_path());
  }
  temp_ = destination_;
  temp_ += ".tmp";
  out_.open(temp_, std::ios::binary | std::ios::trunc);
  if (!out_) throw Error(ErrorCode::kIo, "cannot write '" + temp_.string() + "'");
}

AtomicFile::~AtomicFile() {
  if (!committed_) {
    out_.close();
    std::error_code ec;
    std::filesystem::remove(temp_, ec);
  }
}

void AtomicFile::commit() {
  out_.flush();
  if (!out_) throw Error(ErrorCode::kIo, "write failure on '" + temp_.string() + "'");
  out_.close();
  std::error_code ec;
  std::filesystem::rename(temp_, destination_, ec);
  if (ec) {
    throw Error(ErrorCode::kIo, "cannot rename onto '" + destination_.string() +
                                    "': " + ec.message());
  }
  committed_ = true;
}

void write_text_atomic(const std::filesystem::path& path, std::string_view content) {
  AtomicFile file(path);
  file.stream() << content;
  file.commit();
}

}  // namespace defpipe
