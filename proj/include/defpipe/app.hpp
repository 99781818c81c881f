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
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "defpipe/generator.hpp"
#include "defpipe/ingest.hpp"

// The `defpipe` command line. Kept in the library so integration tests can
// drive whole pipeline runs in-process.
namespace defpipe::app {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kMissingInput = 2,
  kBackendFailure = 3,
  kInvariantBreach = 4,
};

// Built-in defaults; a user config file is merge-patched on top.
nlohmann::json default_config();

struct RunConfig {
  nlohmann::json effective;  // merged config after flag overrides
  std::filesystem::path base_dir;
  std::filesystem::path out_dir;
  std::uint64_t seed = 0;
  generator::PipelineConfig pipeline;

  // Resolves a config path key (e.g. "web"). Relative paths are taken from
  // the config file's directory; unset keys fall back to `fallback` under
  // out_dir when given.
  std::optional<std::filesystem::path> path(const std::string& key,
                                            const std::string& fallback = {}) const;
  std::filesystem::path require(const std::string& key, const std::string& fallback = {}) const;

  // FNV-1a of the canonical effective config with paths.out removed.
  std::string config_hash() const;
};

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace defpipe::app
