// Copyright 2026 The slicebench Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "slicebench/manifest.hpp"

namespace CLI {
class App;
}

namespace slicebench::cli {

using nlohmann::ordered_json;
namespace fs = std::filesystem;

struct Context {
  std::uint64_t seed = 0;
  int jobs = 1;
  std::string log_level = "warn";
  std::ostream* out = &std::cout;
  std::ostream* err = &std::cerr;

  std::size_t workers() const { return static_cast<std::size_t>(jobs < 1 ? 1 : jobs); }
  void info(const std::string& msg) const;
  ordered_json globals() const;
};

/// One subcommand: registers its flags, then runs with the parsed values.
class Command {
 public:
  virtual ~Command() = default;
  virtual void add_to(CLI::App& app) = 0;
  virtual void run(const Context& ctx) = 0;
  CLI::App* app = nullptr;
};

/// {"tool", "version", "command", "config", "result"}; config includes the
/// global settings.
ordered_json envelope(const std::string& command, const Context& ctx, ordered_json config,
                      ordered_json result);

void write_text(const fs::path& path, const std::string& text);
void write_json(const fs::path& path, const ordered_json& j);
ordered_json read_json(const fs::path& path);

std::vector<int> parse_int_list(const std::string& s);
std::vector<double> parse_double_list(const std::string& s);

/// Loads and validates a manifest.
Manifest load_checked(const fs::path& path);

ordered_json key_json(const SliceKey& key);

/// `path` with its extension replaced.
fs::path sibling(const fs::path& path, const std::string& ext);

std::string csv_number(double v);

using CommandList = std::vector<std::unique_ptr<Command>>;
void add_data_commands(CommandList& list);    // curate, synth, features, split, fewshot
void add_eval_commands(CommandList& list);    // seg-eval, zeroshot, frd, probe, correlate
void add_report_command(CommandList& list);   // report
CommandList make_commands();

/// Figures and summary.csv for the `report` command; returns the result block.
ordered_json build_report_bundle(const std::vector<std::string>& inputs, const fs::path& out_dir);

}  // namespace slicebench::cli
