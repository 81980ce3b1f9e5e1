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

#include <CLI11.hpp>
#include <fmt/format.h>

#include "common.hpp"
#include "slicebench/error.hpp"
#include "slicebench/report.hpp"

namespace slicebench::cli {
namespace {

double number_at(const ordered_json& j, const char* key, const std::string& file) {
  if (!j.contains(key) || !j.at(key).is_number()) {
    fail(ErrorCode::kValidation, file + ": missing numeric field '" + key + "'");
  }
  return j.at(key).get<double>();
}

const ordered_json& object_at(const ordered_json& j, const char* key, const std::string& file) {
  if (!j.is_object() || !j.contains(key)) fail(ErrorCode::kValidation, file + ": missing '" + key + "'");
  return j.at(key);
}

std::string label_or(const ordered_json& j, const char* key, const std::string& fallback) {
  return j.contains(key) && j.at(key).is_string() ? j.at(key).get<std::string>() : fallback;
}

ordered_json scatter_json(const ScatterSummary& s) {
  ordered_json j;
  j["n"] = s.n;
  if (s.fit) {
    j["fit"] = {{"slope", s.fit->slope}, {"intercept", s.fit->intercept}};
  } else {
    j["fit"] = nullptr;
  }
  j["r_pearson"] = s.pearson ? ordered_json(s.pearson->r) : ordered_json(nullptr);
  j["p_pearson"] = s.pearson ? ordered_json(s.pearson->p) : ordered_json(nullptr);
  j["r_spearman"] = s.spearman ? ordered_json(s.spearman->r) : ordered_json(nullptr);
  j["p_spearman"] = s.spearman ? ordered_json(s.spearman->p) : ordered_json(nullptr);
  j["flags"] = s.flags;
  return j;
}

}  // namespace

/// Renders the figures and summary table for a list of result files.
ordered_json build_report_bundle(const std::vector<std::string>& inputs, const fs::path& out_dir) {
  if (inputs.empty()) fail(ErrorCode::kValidation, "report needs at least one result file");
  std::vector<LineSeries> zeroshot;
  std::vector<Bar> probe_bars, seg_bars, frd_bars;
  ordered_json figures = ordered_json::array();
  std::string csv = "input,command,metric,value\n";
  std::size_t n_scatter = 0;

  for (const auto& file : inputs) {
    const ordered_json doc = read_json(file);
    const std::string stem = fs::path(file).stem().string();
    if (!doc.is_object() || !doc.contains("command") || !doc.at("command").is_string()) {
      fail(ErrorCode::kValidation, file + ": not a slicebench result file");
    }
    const std::string command = doc.at("command").get<std::string>();
    const ordered_json& result = object_at(doc, "result", file);
    if (command == "zeroshot") {
      LineSeries s;
      s.name = stem + " (" + label_or(result, "source", "?") + ")";
      for (const auto& row : object_at(result, "rows", file)) {
        const double k = number_at(row, "k", file), v = number_at(row, "mean_dsc", file);
        s.points.emplace_back(k, v);
        csv += fmt::format("{},zeroshot,mean_dsc@k={},{}\n", file, format_number(k), csv_number(v));
      }
      if (s.points.empty()) fail(ErrorCode::kValidation, file + ": no zero-shot rows");
      zeroshot.push_back(std::move(s));
    } else if (command == "probe") {
      const double v = number_at(result, "best_val_accuracy", file);
      probe_bars.push_back({stem, v, std::nullopt});
      csv += fmt::format("{},probe,best_val_accuracy,{}\n", file, csv_number(v));
    } else if (command == "seg-eval") {
      for (const char* metric : {"dsc2d", "dsc3d", "nsd3d"}) {
        const ordered_json& s = object_at(result, metric, file);
        const double mean = number_at(s, "mean", file);
        std::optional<double> sd;
        if (s.contains("std") && s.at("std").is_number()) sd = s.at("std").get<double>();
        seg_bars.push_back({stem + " " + metric, mean, sd});
        csv += fmt::format("{},seg-eval,{},{}\n", file, metric, csv_number(mean));
      }
    } else if (command == "frd") {
      const double v = number_at(result, "frd", file);
      frd_bars.push_back({stem, v, std::nullopt});
      csv += fmt::format("{},frd,frd,{}\n", file, csv_number(v));
    } else if (command == "correlate" || command == "scatter") {
      std::vector<ScatterPoint> points;
      for (const auto& p : object_at(result, "points", file)) {
        points.push_back({number_at(p, "x", file), number_at(p, "y", file), label_or(p, "label", "")});
      }
      if (points.empty()) fail(ErrorCode::kValidation, file + ": scatter without points");
      const ScatterSummary summary = summarize_scatter(points);
      const std::string name = fmt::format("scatter_{}.svg", n_scatter++);
      write_text(out_dir / name,
                 render_scatter_svg(stem, label_or(result, "x_label", "x"), label_or(result, "y_label", "y"),
                                    points, summary));
      ordered_json fig;
      fig["file"] = name;
      fig["kind"] = "scatter";
      fig["input"] = file;
      fig["summary"] = scatter_json(summary);
      figures.push_back(std::move(fig));
      if (summary.pearson) {
        csv += fmt::format("{},{},r_pearson,{}\n", file, command, csv_number(summary.pearson->r));
        csv += fmt::format("{},{},p_pearson,{}\n", file, command, csv_number(summary.pearson->p));
      }
    } else {
      fail(ErrorCode::kValidation, file + ": unsupported result kind '" + command + "'");
    }
  }

  auto add_figure = [&](const std::string& name, const std::string& kind, const std::string& svg) {
    write_text(out_dir / name, svg);
    ordered_json fig;
    fig["file"] = name;
    fig["kind"] = kind;
    figures.push_back(std::move(fig));
  };
  if (!zeroshot.empty()) {
    add_figure("zeroshot.svg", "line",
               render_line_svg("Zero-shot segmentation", "k (clusters)", "mean 2D DSC", zeroshot, true));
  }
  if (!probe_bars.empty()) {
    add_figure("probe.svg", "bar", render_bar_svg("Linear probing", "best validation accuracy", probe_bars));
  }
  if (!seg_bars.empty()) {
    add_figure("segmentation.svg", "bar", render_bar_svg("Segmentation metrics", "score", seg_bars));
  }
  if (!frd_bars.empty()) {
    add_figure("frd.svg", "bar", render_bar_svg("Frechet radiomic distance", "FRD", frd_bars));
  }
  write_text(out_dir / "summary.csv", csv);
  ordered_json result;
  result["n_inputs"] = inputs.size();
  result["figures"] = std::move(figures);
  result["summary"] = "summary.csv";
  return result;
}

namespace {

class ReportCommand : public Command {
 public:
  void add_to(CLI::App& parent) override {
    app = parent.add_subcommand("report", "Render SVG figures and a CSV summary from result files");
    app->add_option("--inputs", inputs_, "Result JSON files written by the other commands")
        ->check(CLI::ExistingFile);
    app->add_option("--out", out_, "Output directory")->required();
  }

  void run(const Context& ctx) override {
    const ordered_json result = build_report_bundle(inputs_, out_);
    ordered_json config;
    config["inputs"] = inputs_;
    config["out"] = out_;
    write_json(fs::path(out_) / "report.json", envelope("report", ctx, config, result));
  }

 private:
  std::vector<std::string> inputs_;
  std::string out_;
};

}  // namespace

void add_report_command(CommandList& list) { list.push_back(std::make_unique<ReportCommand>()); }

}  // namespace slicebench::cli
