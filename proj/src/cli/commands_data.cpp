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

#include <optional>
#include <set>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "common.hpp"
#include "slicebench/error.hpp"
#include "slicebench/ingest.hpp"
#include "slicebench/protocol.hpp"
#include "slicebench/synth.hpp"

namespace slicebench::cli {
namespace {

class CurateCommand : public Command {
 public:
  void add_to(CLI::App& parent) override {
    app = parent.add_subcommand("curate", "DICOM series to continuous volumes, PNG slices and a manifest");
    app->add_option("--in", in_, "Root directory; every directory holding files is one series")
        ->required()
        ->check(CLI::ExistingDirectory);
    app->add_option("--out", out_, "Output directory")->required();
    app->add_option("--norm", norm_, "Min-max normalization: slice or volume")
        ->capture_default_str()
        ->check(CLI::IsMember({"slice", "volume"}));
    app->add_option("--rel-tol", rel_tol_, "Allowed relative deviation of a slice gap from the median")
        ->capture_default_str();
  }

  void run(const Context& ctx) override {
    CurationConfig cfg;
    cfg.mode = parse_normalization(norm_);
    cfg.rel_tol = rel_tol_;
    cfg.jobs = ctx.jobs;
    const CurationResult res = curate(in_, out_, cfg);
    save_manifest(res.manifest, fs::path(out_) / "manifest.jsonl");

    ordered_json series = ordered_json::array();
    for (const auto& s : res.series) {
      ordered_json j;
      j["directory"] = s.directory;
      j["accepted"] = s.accepted;
      j["reason"] = s.reason;
      j["slice_index"] = s.slice_index ? ordered_json(*s.slice_index) : ordered_json(nullptr);
      j["patient_id"] = s.patient_id;
      j["series_id"] = s.series_id;
      j["n_slices"] = s.n_slices;
      j["n_reference_slices"] = s.n_reference_slices;
      series.push_back(std::move(j));
    }
    ordered_json result;
    result["accepted"] = res.accepted();
    result["rejected"] = res.rejected();
    result["n_slices"] = res.manifest.entries.size();
    result["series"] = std::move(series);
    ordered_json config;
    config["in"] = in_;
    config["out"] = out_;
    config["norm"] = norm_;
    config["rel_tol"] = rel_tol_;
    write_json(fs::path(out_) / "curation.json", envelope("curate", ctx, config, result));
    ctx.info(fmt::format("curate: {} accepted, {} rejected", res.accepted(), res.rejected()));
  }

 private:
  std::string in_, out_, norm_ = "slice";
  double rel_tol_ = 0.01;
};

class SynthCommand : public Command {
 public:
  void add_to(CLI::App& parent) override {
    app = parent.add_subcommand("synth", "Write a deterministic synthetic dataset from a JSON spec");
    app->add_option("--spec", spec_, "Synth spec (JSON)")->required()->check(CLI::ExistingFile);
    app->add_option("--out", out_, "Output directory")->required();
  }

  void run(const Context& ctx) override {
    const SynthSpec spec = load_synth_spec(spec_);
    const SynthOutputs res = run_synth(spec, out_, ctx.workers());
    ordered_json result;
    result["n_slices"] = res.dataset.entries.size();
    result["n_patients"] = res.dataset.patients().size();
    result["manifest"] = "manifest.jsonl";
    result["features"] = res.features ? ordered_json("features.jsonl") : ordered_json(nullptr);
    ordered_json dirs = ordered_json::array();
    for (const auto& d : res.dicom_dirs) dirs.push_back(fs::relative(d, out_).generic_string());
    result["dicom_dirs"] = std::move(dirs);
    result["records"] = res.records ? ordered_json("records.jsonl") : ordered_json(nullptr);
    ordered_json config;
    config["spec"] = ordered_json::parse(synth_spec_json(spec));
    config["out"] = out_;
    write_json(fs::path(out_) / "synth.json", envelope("synth", ctx, config, result));
  }

 private:
  std::string spec_, out_;
};

class FeaturesCommand : public Command {
 public:
  void add_to(CLI::App& parent) override {
    app = parent.add_subcommand("features", "Write proxy feature maps (FMAP) for an image manifest");
    app->add_option("--images", images_, "Image manifest")->required()->check(CLI::ExistingFile);
    app->add_option("--gt", gt_, "Mask manifest joined on the slice key (needed by onehot_oracle)")
        ->check(CLI::ExistingFile);
    app->add_option("--mode", mode_, "onehot_oracle, intensity_positional or noise")
        ->capture_default_str()
        ->check(CLI::IsMember({"onehot_oracle", "intensity_positional", "noise"}));
    app->add_option("--patch", patch_, "Patch size in pixels")->capture_default_str();
    app->add_option("--positional-weight", positional_weight_, "Scale of the y, x channels")
        ->capture_default_str();
    app->add_option("--noise-channels", noise_channels_, "Channels of the noise proxy")->capture_default_str();
    app->add_option("--out", out_, "Output directory (features.jsonl and features/)")->required();
  }

  void run(const Context& ctx) override {
    FeatureOptions opts;
    opts.mode = parse_feature_mode(mode_);
    opts.patch_size = patch_;
    opts.positional_weight = positional_weight_;
    opts.noise_channels = noise_channels_;
    opts.seed = ctx.seed;
    const Manifest images = load_checked(images_);
    std::optional<Manifest> gt;
    if (!gt_.empty()) gt = load_checked(gt_);
    const Manifest out = make_features(images, gt ? &*gt : nullptr, opts, out_, ctx.workers());
    ordered_json result;
    result["n_maps"] = out.entries.size();
    result["manifest"] = "features.jsonl";
    ordered_json config;
    config["images"] = images_;
    config["gt"] = gt_.empty() ? ordered_json(nullptr) : ordered_json(gt_);
    config["mode"] = mode_;
    config["patch"] = patch_;
    config["positional_weight"] = positional_weight_;
    config["noise_channels"] = noise_channels_;
    config["out"] = out_;
    write_json(fs::path(out_) / "features.json", envelope("features", ctx, config, result));
  }

 private:
  std::string images_, gt_, out_, mode_ = "intensity_positional";
  int patch_ = 4;
  double positional_weight_ = 0.25;
  int noise_channels_ = 8;
};

class SplitCommand : public Command {
 public:
  void add_to(CLI::App& parent) override {
    app = parent.add_subcommand("split", "Patient-disjoint split of a manifest");
    app->add_option("--manifest", manifest_, "Manifest to split")->required()->check(CLI::ExistingFile);
    app->add_option("--ratios", ratios_, "Comma-separated slice ratios summing to 1")->capture_default_str();
    app->add_option("--stratify", stratify_, "Label key balanced across splits");
    app->add_option("--out", out_, "Split report (JSON); stdout when omitted");
    app->add_option("--out-dir", out_dir_, "Also write one <name>.jsonl manifest per split");
  }

  void run(const Context& ctx) override {
    const Manifest m = load_checked(manifest_);
    const auto ratios = parse_double_list(ratios_);
    const SplitPlan plan = patient_split(m, ratios, ctx.seed,
                                         stratify_.empty() ? std::nullopt : std::optional(stratify_));
    ordered_json parts = ordered_json::array();
    for (std::size_t i = 0; i < plan.parts.size(); ++i) {
      std::set<std::string> patients;
      for (const auto& k : plan.parts[i]) patients.insert(k.patient_id);
      ordered_json p;
      p["name"] = plan.names[i];
      p["ratio"] = plan.ratios[i];
      p["n_slices"] = plan.parts[i].size();
      p["fraction"] = m.entries.empty() ? 0.0
                                        : static_cast<double>(plan.parts[i].size()) /
                                              static_cast<double>(m.entries.size());
      p["patients"] = std::vector<std::string>(patients.begin(), patients.end());
      parts.push_back(std::move(p));
      if (!out_dir_.empty()) {
        Manifest sub = plan.subset(m, i);
        for (auto& e : sub.entries) {
          e.image_path = rebase_path(m, e.image_path, out_dir_);
          if (e.mask_path) e.mask_path = rebase_path(m, *e.mask_path, out_dir_);
          if (e.feature_path) e.feature_path = rebase_path(m, *e.feature_path, out_dir_);
        }
        fs::create_directories(out_dir_);
        save_manifest(sub, fs::path(out_dir_) / (plan.names[i] + ".jsonl"));
      }
    }
    ordered_json result;
    result["n_slices"] = m.entries.size();
    result["parts"] = std::move(parts);
    ordered_json config;
    config["manifest"] = manifest_;
    config["ratios"] = ratios;
    config["stratify"] = stratify_.empty() ? ordered_json(nullptr) : ordered_json(stratify_);
    config["out_dir"] = out_dir_.empty() ? ordered_json(nullptr) : ordered_json(out_dir_);
    const auto doc = envelope("split", ctx, config, result);
    if (out_.empty()) {
      *ctx.out << doc.dump(2) << "\n";
    } else {
      write_json(out_, doc);
    }
  }

 private:
  std::string manifest_, ratios_ = "0.6,0.4", stratify_, out_, out_dir_;
};

class FewShotCommand : public Command {
 public:
  void add_to(CLI::App& parent) override {
    app = parent.add_subcommand("fewshot", "Draw 5 training and 5 validation slices with non-empty masks");
    app->add_option("--pool", pool_, "Pool manifest with mask_path entries")->required()->check(CLI::ExistingFile);
    app->add_option("--out", out_, "Sample (JSON); stdout when omitted");
  }

  void run(const Context& ctx) override {
    const Manifest pool = load_checked(pool_);
    const FewShotSample s = fewshot_sample(pool, ctx.seed);
    ordered_json train = ordered_json::array(), val = ordered_json::array();
    for (const auto& k : s.train_slices) train.push_back(key_json(k));
    for (const auto& k : s.val_slices) val.push_back(key_json(k));
    ordered_json result;
    result["train"] = std::move(train);
    result["val"] = std::move(val);
    ordered_json config;
    config["pool"] = pool_;
    const auto doc = envelope("fewshot", ctx, config, result);
    if (out_.empty()) {
      *ctx.out << doc.dump(2) << "\n";
    } else {
      write_json(out_, doc);
    }
  }

 private:
  std::string pool_, out_;
};

}  // namespace

void add_data_commands(CommandList& list) {
  list.push_back(std::make_unique<CurateCommand>());
  list.push_back(std::make_unique<SynthCommand>());
  list.push_back(std::make_unique<FeaturesCommand>());
  list.push_back(std::make_unique<SplitCommand>());
  list.push_back(std::make_unique<FewShotCommand>());
}

}  // namespace slicebench::cli
