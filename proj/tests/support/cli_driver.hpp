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

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "defpipe/app.hpp"
#include "defpipe/jsonl.hpp"

// In-process driver for the defpipe command line, shared by the CLI tests
// and the acceptance binary.
namespace defpipe::testing {

namespace fs = std::filesystem;

struct CliRun {
  int code = -1;
  std::string out;
  std::string err;
};

inline CliRun run_cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv = {"defpipe"};
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  CliRun r;
  r.code = app::run(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

// Fresh directory under the system temp dir, removed on destruction.
class ScratchDir {
 public:
  explicit ScratchDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = fs::temp_directory_path() /
            ("defpipe-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~ScratchDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  ScratchDir(const ScratchDir&) = delete;
  ScratchDir& operator=(const ScratchDir&) = delete;

  const fs::path& path() const { return path_; }
  std::string str(const std::string& child = {}) const {
    return child.empty() ? path_.string() : (path_ / child).string();
  }

 private:
  fs::path path_;
};

inline fs::path fixture_path(const std::string& name) { return fs::path(DEFPIPE_FIXTURE_DIR) / name; }

// Fixture config with absolute input paths, merge-patched with `patch`,
// written into `dir`. Returns the written path.
inline std::string write_config(const fs::path& dir, const nlohmann::json& patch = nlohmann::json::object()) {
  std::ifstream in(fixture_path("config.json"));
  auto config = nlohmann::json::parse(in);
  for (auto& [key, value] : config["paths"].items()) {
    if (value.is_string()) value = fixture_path(value.get<std::string>()).string();
  }
  config.merge_patch(patch);
  const auto path = dir / "config.json";
  std::ofstream(path) << config.dump(2);
  return path.string();
}

inline std::vector<nlohmann::json> read_jsonl_records(const fs::path& path) {
  std::vector<nlohmann::json> out;
  auto in = open_input(path);
  for_each_jsonl(in, [&](const nlohmann::json& j, std::size_t) { out.push_back(j); });
  return out;
}

inline std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// build-corpus .. report into `out`; `term_args` go to extract and generate.
// Returns the first failing step, or an empty string.
inline std::string run_pipeline(const std::string& config, const std::string& out,
                                const std::vector<std::string>& term_args) {
  const std::vector<std::vector<std::string>> steps = {
      {"build-corpus"}, {"build-dataset"}, {"train-scorer"}, {"build-index"}, {"extract"},
      {"generate"},     {"evaluate"},      {"report"}};
  for (auto step : steps) {
    const std::string name = step.front();
    step.insert(step.end(), {"--config", config, "--out", out});
    if (name == "extract" || name == "generate") {
      step.insert(step.end(), term_args.begin(), term_args.end());
    }
    const auto r = run_cli(step);
    if (r.code != 0) return name + " exited " + std::to_string(r.code) + ": " + r.err;
  }
  return {};
}

}  // namespace defpipe::testing
