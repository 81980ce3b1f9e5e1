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

#include <charconv>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "common.hpp"
#include "slicebench/cli.hpp"
#include "slicebench/error.hpp"

namespace slicebench::cli {

namespace {

int level_rank(const std::string& level) {
  if (level == "error") return 0;
  if (level == "warn") return 1;
  if (level == "info") return 2;
  return 3;
}

}  // namespace

void Context::info(const std::string& msg) const {
  if (level_rank(log_level) >= 2) *err << "[info] " << msg << "\n";
}

ordered_json Context::globals() const {
  ordered_json j;
  j["seed"] = seed;
  j["jobs"] = jobs;
  return j;
}

ordered_json envelope(const std::string& command, const Context& ctx, ordered_json config,
                      ordered_json result) {
  ordered_json j;
  j["tool"] = kToolName;
  j["version"] = kToolVersion;
  j["command"] = command;
  ordered_json cfg = ctx.globals();
  for (auto& [k, v] : config.items()) cfg[k] = v;
  j["config"] = std::move(cfg);
  j["result"] = std::move(result);
  return j;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIo, "cannot write " + path.string());
  out << text;
  if (!out) fail(ErrorCode::kIo, "write failed for " + path.string());
}

void write_json(const fs::path& path, const ordered_json& j) { write_text(path, j.dump(2) + "\n"); }

ordered_json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot read " + path.string());
  try {
    return ordered_json::parse(in);
  } catch (const ordered_json::exception& e) {
    fail(ErrorCode::kValidation, path.string() + ": " + e.what());
  }
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, ',')) {
    int v = 0;
    const auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
    if (ec != std::errc() || ptr != part.data() + part.size()) {
      fail(ErrorCode::kValidation, "not an integer list: '" + s + "'");
    }
    out.push_back(v);
  }
  if (out.empty()) fail(ErrorCode::kValidation, "empty list");
  return out;
}

std::vector<double> parse_double_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(part, &used));
      if (used != part.size()) throw std::invalid_argument(part);
    } catch (const std::exception&) {
      fail(ErrorCode::kValidation, "not a number list: '" + s + "'");
    }
  }
  if (out.empty()) fail(ErrorCode::kValidation, "empty list");
  return out;
}

Manifest load_checked(const fs::path& path) {
  Manifest m = load_manifest(path);
  m.validate();
  return m;
}

ordered_json key_json(const SliceKey& key) {
  ordered_json j;
  j["patient_id"] = key.patient_id;
  j["series_id"] = key.series_id;
  j["slice_index"] = key.slice_index;
  return j;
}

fs::path sibling(const fs::path& path, const std::string& ext) {
  fs::path p = path;
  p.replace_extension(ext);
  return p;
}

std::string csv_number(double v) { return fmt::format("{:.6f}", v); }

CommandList make_commands() {
  CommandList list;
  add_data_commands(list);
  add_eval_commands(list);
  add_report_command(list);
  return list;
}

}  // namespace slicebench::cli

namespace slicebench {

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  cli::Context ctx;
  ctx.out = &out;
  ctx.err = &err;

  CLI::App app{"Benchmark harness for slice-level MRI foundation-model evaluation", kToolName};
  app.set_version_flag("--version", std::string(kToolName) + " " + kToolVersion);
  app.set_config("--config", "", "TOML file mirroring the command-line flags; flags win");
  app.add_option("--seed", ctx.seed, "Global seed for every random choice")->capture_default_str();
  app.add_option("--jobs", ctx.jobs, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--log-level", ctx.log_level, "error, warn, info or debug")
      ->capture_default_str()
      ->check(CLI::IsMember({"error", "warn", "info", "debug"}));
  app.require_subcommand(1);
  app.fallthrough();

  auto commands = cli::make_commands();
  for (auto& c : commands) c->add_to(app);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    for (auto& c : commands) {
      if (c->app != nullptr && c->app->parsed()) c->run(ctx);
    }
  } catch (const Error& e) {
    err << "error (" << to_string(e.code()) << "): " << e.what() << "\n";
    return e.is_validation() ? 1 : 2;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error (io): " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args, out, err);
}

}  // namespace slicebench
