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

#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "common.hpp"
#include "slicebench/error.hpp"
#include "slicebench/frd.hpp"
#include "slicebench/metrics.hpp"
#include "slicebench/parallel.hpp"
#include "slicebench/png_io.hpp"
#include "slicebench/probe.hpp"
#include "slicebench/protocol.hpp"
#include "slicebench/radiomics.hpp"
#include "slicebench/stats.hpp"
#include "slicebench/zeroshot.hpp"

namespace slicebench::cli {
namespace {

ordered_json summary_json(const Summary& s) {
  ordered_json j;
  j["mean"] = s.mean;
  j["std"] = s.std_defined ? ordered_json(s.std) : ordered_json(nullptr);
  j["n"] = s.n;
  return j;
}

std::optional<std::array<double, 3>> spacing_of(const ManifestEntry& e) {
  auto it = e.attributes.find("spacing_mm");
  if (it == e.attributes.end()) return std::nullopt;
  std::array<double, 3> out{};
  std::stringstream ss(it->second);
  std::string part;
  for (double& v : out) {
    if (!std::getline(ss, part, '\\')) fail(ErrorCode::kValidation, "malformed spacing_mm");
    v = std::stod(part);
  }
  return out;
}

class SegEvalCommand : public Command {
 public:
  void add_to(CLI::App& parent) override {
    app = parent.add_subcommand("seg-eval", "2D/3D DSC and NSD of predicted against ground-truth masks");
    app->add_option("--pred", pred_, "Manifest of predicted masks")->required()->check(CLI::ExistingFile);
    app->add_option("--gt", gt_, "Manifest of ground-truth masks")->required()->check(CLI::ExistingFile);
    app->add_option("--tol", tol_, "NSD tolerance (mm when spacing_mm is recorded, else voxels)")
        ->capture_default_str();
    app->add_option("--out", out_, "Report (JSON); a CSV with the same stem is written too")->required();
  }

  void run(const Context& ctx) override {
    const Manifest pred = load_checked(pred_);
    const Manifest gt = load_checked(gt_);
    std::map<SliceKey, const ManifestEntry*> pred_index;
    for (const auto& e : pred.entries) pred_index[e.key()] = &e;
    std::map<std::pair<std::string, std::string>, std::vector<const ManifestEntry*>> cases;
    for (const auto& e : gt.entries) {
      if (!e.mask_path) fail(ErrorCode::kValidation, "ground-truth entry " + e.key().str() + " has no mask_path");
      cases[{e.patient_id, e.series_id}].push_back(&e);
    }
    if (cases.empty()) fail(ErrorCode::kValidation, "ground-truth manifest is empty");
    std::vector<std::pair<std::string, std::vector<const ManifestEntry*>>> work;
    for (auto& [id, rows] : cases) {
      std::sort(rows.begin(), rows.end(),
                [](const ManifestEntry* a, const ManifestEntry* b) { return a->slice_index < b->slice_index; });
      work.emplace_back(id.first + "/" + id.second, rows);
    }
    std::vector<CaseMetrics> metrics(work.size());
    parallel_for(work.size(), ctx.workers(), [&](std::size_t i) {
      std::vector<LabelMask> p, g;
      for (const ManifestEntry* e : work[i].second) {
        auto it = pred_index.find(e->key());
        if (it == pred_index.end() || !it->second->mask_path) {
          fail(ErrorCode::kValidation, "no predicted mask for " + e->key().str());
        }
        p.push_back(load_mask_png(pred.resolve(*it->second->mask_path)));
        g.push_back(load_mask_png(gt.resolve(*e->mask_path)));
      }
      NsdConfig cfg;
      cfg.tolerance = tol_;
      cfg.spacing = spacing_of(*work[i].second.front());
      metrics[i] = evaluate_case(work[i].first, stack_slices(p), stack_slices(g), cfg);
    });
    const MetricReport report = build_report(std::move(metrics));

    ordered_json cases_json = ordered_json::array();
    std::string csv = "case_id,dsc2d_mean,dsc3d,nsd3d\n";
    for (const auto& c : report.per_case) {
      ordered_json j;
      j["case_id"] = c.case_id;
      j["dsc2d_mean"] = c.dsc2d_mean ? ordered_json(*c.dsc2d_mean) : ordered_json(nullptr);
      j["dsc3d"] = c.dsc3d;
      j["nsd3d"] = c.nsd3d;
      cases_json.push_back(std::move(j));
      csv += fmt::format("{},{},{},{}\n", c.case_id, c.dsc2d_mean ? csv_number(*c.dsc2d_mean) : "",
                         csv_number(c.dsc3d), csv_number(c.nsd3d));
    }
    ordered_json result;
    result["dsc2d"] = summary_json(report.dsc2d);
    result["dsc3d"] = summary_json(report.dsc3d);
    result["nsd3d"] = summary_json(report.nsd3d);
    result["per_case"] = std::move(cases_json);
    ordered_json config;
    config["pred"] = pred_;
    config["gt"] = gt_;
    config["tol"] = tol_;
    write_json(out_, envelope("seg-eval", ctx, config, result));
    write_text(sibling(out_, ".csv"), csv);
  }

 private:
  std::string pred_, gt_, out_;
  double tol_ = 1.0;
};

class ZeroShotCommand : public Command {
 public:
  void add_to(CLI::App& parent) override {
    app = parent.add_subcommand("zeroshot", "k-means zero-shot segmentation over feature maps or raw pixels");
    app->add_option("--features", features_, "Feature (or image) manifest")->required()->check(CLI::ExistingFile);
    app->add_option("--gt", gt_, "Ground-truth mask manifest")->required()->check(CLI::ExistingFile);
    app->add_option("--k", ks_, "Comma-separated cluster counts")->capture_default_str();
    app->add_option("--source", source_, "features, raw (intensity, y, x) or raw_intensity")
        ->capture_default_str()
        ->check(CLI::IsMember({"features", "raw", "raw_intensity"}));
    app->add_option("--assign", assign_, "best (highest-DSC cluster) or majority")
        ->capture_default_str()
        ->check(CLI::IsMember({"best", "majority"}));
    app->add_option("--max-iters", max_iters_, "Lloyd iteration cap")->capture_default_str();
    app->add_option("--out", out_, "Per-k table (CSV); a JSON report with the same stem is written too")
        ->required();
    app->add_option("--pred-dir", pred_dir_, "Write predicted masks for the first k and a manifest here");
  }

  void run(const Context& ctx) override {
    const std::vector<int> ks = parse_int_list(ks_);
    ZeroShotConfig cfg;
    cfg.seed = ctx.seed;
    cfg.max_iters = max_iters_;
    cfg.source = source_ == "features" ? PointSource::kFeatures
                 : source_ == "raw"    ? PointSource::kRawPixels
                                       : PointSource::kRawIntensity;
    cfg.assign = assign_ == "best" ? AssignRule::kBestOverlap : AssignRule::kMajority;
    for (int k : ks) {
      ZeroShotConfig c = cfg;
      c.k = k;
      c.validate();
    }
    const Manifest features = load_checked(features_);
    const Manifest gt = load_checked(gt_);
    const auto inputs = load_zeroshot_inputs(features, gt, cfg.source);
    const auto rows = zeroshot_eval(inputs, ks, cfg, ctx.workers());

    std::string csv = "k,n_slices,mean_dsc,std_dsc,source,assign\n";
    ordered_json rows_json = ordered_json::array();
    for (const auto& r : rows) {
      csv += fmt::format("{},{},{},{},{},{}\n", r.k, r.n_slices, csv_number(r.mean_dsc), csv_number(r.std_dsc),
                         source_, assign_);
      ordered_json j;
      j["k"] = r.k;
      j["n_slices"] = r.n_slices;
      j["mean_dsc"] = r.mean_dsc;
      j["std_dsc"] = r.std_dsc;
      rows_json.push_back(std::move(j));
    }
    if (!pred_dir_.empty()) write_predictions(inputs, cfg, ks.front(), ctx);

    ordered_json result;
    result["source"] = source_;
    result["n_inputs"] = inputs.size();
    result["rows"] = std::move(rows_json);
    ordered_json config;
    config["features"] = features_;
    config["gt"] = gt_;
    config["k"] = ks;
    config["source"] = source_;
    config["assign"] = assign_;
    config["max_iters"] = max_iters_;
    config["pred_dir"] = pred_dir_.empty() ? ordered_json(nullptr) : ordered_json(pred_dir_);
    write_text(out_, csv);
    write_json(sibling(out_, ".json"), envelope("zeroshot", ctx, config, result));
  }

 private:
  void write_predictions(const std::vector<ZeroShotInput>& inputs, ZeroShotConfig cfg, int k,
                         const Context& ctx) const {
    cfg.k = k;
    const fs::path dir = pred_dir_;
    Manifest out;
    out.dataset_name = "zeroshot_k" + std::to_string(k);
    out.base_dir = dir;
    out.entries.resize(inputs.size());
    parallel_for(inputs.size(), ctx.workers(), [&](std::size_t i) {
      const ZeroShotInput& in = inputs[i];
      LabelMask mask = in.gt.count_nonzero() > 0 ? zeroshot_slice_mask(in, cfg)
                                                 : LabelMask(NdArray<std::uint16_t>(in.gt.dims()));
      ManifestEntry e;
      e.patient_id = in.key.patient_id;
      e.series_id = in.key.series_id;
      e.slice_index = in.key.slice_index;
      const std::string rel =
          fmt::format("masks/{}/{}/slice_{:04d}.png", e.patient_id, e.series_id, e.slice_index);
      fs::create_directories((dir / rel).parent_path());
      save_mask_png(mask, dir / rel);
      e.image_path = rel;
      e.mask_path = rel;
      out.entries[i] = std::move(e);
    });
    save_manifest(out, dir / "manifest.jsonl");
  }

  std::string features_, gt_, out_, pred_dir_;
  std::string ks_ = "4,8,16,32,64,128", source_ = "features", assign_ = "best";
  int max_iters_ = 300;
};

class FrdCommand : public Command {
 public:
  void add_to(CLI::App& parent) override {
    app = parent.add_subcommand("frd", "Fréchet radiomic distance between two image sets");
    app->add_option("--set-a", set_a_, "Reference image manifest")->required()->check(CLI::ExistingFile);
    app->add_option("--set-b", set_b_, "Comparison image manifest")->required()->check(CLI::ExistingFile);
    app->add_option("--bins", bins_, "Gray levels for texture features")->capture_default_str();
    app->add_option("--eps", eps_, "Diagonal loading of each covariance")->capture_default_str();
    app->add_option("--resize", resize_, "Resize every image to HxW before extraction");
    app->add_flag("--no-standardize", no_standardize_, "Skip z-scoring with set A's statistics");
    app->add_option("--out", out_, "Report (JSON)")->required();
  }

  void run(const Context& ctx) override {
    FrdConfig cfg;
    cfg.n_bins = bins_;
    cfg.eps = eps_;
    cfg.standardize = !no_standardize_;
    if (!resize_.empty()) {
      const auto x = resize_.find('x');
      try {
        if (x == std::string::npos) throw std::invalid_argument(resize_);
        cfg.resize = std::pair<std::size_t, std::size_t>{std::stoul(resize_.substr(0, x)),
                                                         std::stoul(resize_.substr(x + 1))};
      } catch (const std::exception&) {
        fail(ErrorCode::kValidation, "--resize expects HxW, got '" + resize_ + "'");
      }
    }
    cfg.validate();
    const Manifest a = load_checked(set_a_);
    const Manifest b = load_checked(set_b_);
    const double d = frd_between_sets(a, b, cfg, ctx.workers());
    ordered_json result;
    result["frd"] = d;
    result["n_a"] = a.entries.size();
    result["n_b"] = b.entries.size();
    result["n_features"] = kRadiomicFeatureCount;
    result["feature_set"] = kRadiomicsVersion;
    ordered_json config;
    config["set_a"] = set_a_;
    config["set_b"] = set_b_;
    config["bins"] = bins_;
    config["eps"] = eps_;
    config["resize"] = resize_.empty() ? ordered_json(nullptr) : ordered_json(resize_);
    config["standardize"] = !no_standardize_;
    write_json(out_, envelope("frd", ctx, config, result));
  }

 private:
  std::string set_a_, set_b_, out_, resize_;
  int bins_ = 32;
  double eps_ = 1e-6;
  bool no_standardize_ = false;
};

class ProbeCommand : public Command {
 public:
  void add_to(CLI::App& parent) override {
    app = parent.add_subcommand("probe", "Linear probe on spatially pooled feature maps");
    app->add_option("--features", features_, "Feature manifest")->required()->check(CLI::ExistingFile);
    app->add_option("--label-key", label_key_, "Manifest field holding the class")->capture_default_str();
    app->add_option("--ratio", ratio_, "Training share of slices; patients never cross splits")
        ->capture_default_str();
    app->add_flag("--stratify", stratify_, "Balance labels across the split");
    app->add_option("--epochs", epochs_, "Training epochs")->capture_default_str();
    app->add_option("--lr", lr_, "Adam learning rate")->capture_default_str();
    app->add_option("--l2", l2_, "L2 coefficient on the weights")->capture_default_str();
    app->add_option("--batch", batch_, "Mini-batch size")->capture_default_str();
    app->add_option("--out", out_, "Report (JSON); per-epoch CSV with the same stem")->required();
  }

  void run(const Context& ctx) override {
    if (!(ratio_ > 0.0 && ratio_ < 1.0)) fail(ErrorCode::kValidation, "--ratio must lie in (0, 1)");
    ProbeConfig cfg;
    cfg.lr = lr_;
    cfg.epochs = epochs_;
    cfg.l2 = l2_;
    cfg.batch = batch_;
    cfg.seed = ctx.seed;
    cfg.validate();
    const Manifest features = load_checked(features_);
    const std::vector<double> ratios{ratio_, 1.0 - ratio_};
    const SplitPlan split = patient_split(features, ratios, ctx.seed,
                                          stratify_ ? std::optional(label_key_) : std::nullopt);
    const ProbeTaskResult res = probe_task(features, split, label_key_, cfg);
    const ProbeResult& r = res.result;

    std::string csv = "epoch,train_loss,val_accuracy\n";
    ordered_json history = ordered_json::array();
    for (std::size_t i = 0; i < r.history.size(); ++i) {
      csv += fmt::format("{},{},{}\n", i + 1, csv_number(r.history[i].train_loss),
                         csv_number(r.history[i].val_accuracy));
      ordered_json h;
      h["epoch"] = i + 1;
      h["train_loss"] = r.history[i].train_loss;
      h["val_accuracy"] = r.history[i].val_accuracy;
      history.push_back(std::move(h));
    }
    ordered_json result;
    result["best_val_accuracy"] = r.best_val_accuracy;
    result["best_epoch"] = r.best_epoch;
    result["initial_loss"] = r.initial_loss;
    result["n_train"] = res.n_train;
    result["n_val"] = res.n_val;
    result["class_names"] = res.class_names;
    result["confusion_at_best"] = r.confusion_at_best;
    result["history"] = std::move(history);
    ordered_json config;
    config["features"] = features_;
    config["label_key"] = label_key_;
    config["ratio"] = ratio_;
    config["stratify"] = stratify_;
    config["epochs"] = epochs_;
    config["lr"] = lr_;
    config["l2"] = l2_;
    config["batch"] = batch_;
    write_json(out_, envelope("probe", ctx, config, result));
    write_text(sibling(out_, ".csv"), csv);
  }

 private:
  std::string features_, out_, label_key_ = "class_label";
  double ratio_ = 0.6, lr_ = 1e-4, l2_ = 1e-4;
  int epochs_ = 100, batch_ = 64;
  bool stratify_ = false;
};

class CorrelateCommand : public Command {
 public:
  void add_to(CLI::App& parent) override {
    app = parent.add_subcommand("correlate", "Pearson and Spearman correlation of delta against FRD");
    app->add_option("--records", records_, "JSON-lines records {dataset, delta, frd_fsl, frd_test}")
        ->required()
        ->check(CLI::ExistingFile);
    app->add_option("--frd-field", field_, "frd_fsl or frd_test")
        ->capture_default_str()
        ->check(CLI::IsMember({"frd_fsl", "frd_test"}));
    app->add_flag("--permutation", permutation_, "Also report a permutation p-value for Spearman");
    app->add_option("--out", out_, "Report (JSON); scatter CSV with the same stem")->required();
  }

  void run(const Context& ctx) override {
    const auto records = load_records(records_);
    const FrdField field = field_ == "frd_fsl" ? FrdField::kFsl : FrdField::kTest;
    const CorrelationResult c = correlate(records, field);
    std::vector<double> x, y;
    std::string csv = "dataset," + field_ + ",delta\n";
    ordered_json points = ordered_json::array();
    for (const auto& r : records) {
      x.push_back(frd_value(r, field));
      y.push_back(r.delta);
      csv += fmt::format("{},{},{}\n", r.dataset, csv_number(x.back()), csv_number(y.back()));
      ordered_json p;
      p["label"] = r.dataset;
      p["x"] = x.back();
      p["y"] = y.back();
      points.push_back(std::move(p));
    }
    const LineFit fit = least_squares(x, y);
    ordered_json result;
    result["n"] = c.n;
    result["r_pearson"] = c.r_pearson;
    result["p_pearson"] = c.p_pearson;
    result["r_spearman"] = c.r_spearman;
    result["p_spearman"] = c.p_spearman;
    if (permutation_) result["p_spearman_permutation"] = spearman_permutation_p(x, y, ctx.seed);
    result["fit"] = {{"slope", fit.slope}, {"intercept", fit.intercept}};
    result["x_label"] = field_;
    result["y_label"] = "delta";
    result["points"] = std::move(points);
    ordered_json config;
    config["records"] = records_;
    config["frd_field"] = field_;
    config["permutation"] = permutation_;
    write_json(out_, envelope("correlate", ctx, config, result));
    write_text(sibling(out_, ".csv"), csv);
  }

 private:
  std::string records_, out_, field_ = "frd_fsl";
  bool permutation_ = false;
};

}  // namespace

void add_eval_commands(CommandList& list) {
  list.push_back(std::make_unique<SegEvalCommand>());
  list.push_back(std::make_unique<ZeroShotCommand>());
  list.push_back(std::make_unique<FrdCommand>());
  list.push_back(std::make_unique<ProbeCommand>());
  list.push_back(std::make_unique<CorrelateCommand>());
}

}  // namespace slicebench::cli
