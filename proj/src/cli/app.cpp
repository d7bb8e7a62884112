// Copyright 2026 The PolyLane Authors. All Rights Reserved.
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

#include "polylane/cli/app.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <ostream>

#include <CLI11.hpp>
#include <json.hpp>
#include <opencv2/imgproc.hpp>

#include "polylane/cli/config.hpp"
#include "polylane/cli/pipeline.hpp"
#include "polylane/cli/report.hpp"
#include "polylane/dataset/annotation.hpp"
#include "polylane/dataset/image.hpp"
#include "polylane/dataset/synthetic.hpp"
#include "polylane/dataset/target.hpp"
#include "polylane/evaluation/predictions.hpp"
#include "polylane/evaluation/upper_bound.hpp"
#include "polylane/model/checkpoint.hpp"
#include "polylane/training/trainer.hpp"

namespace polylane::cli {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

class UsageError : public std::runtime_error {
 public:
  explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

// Flags every config-consuming command accepts.
struct ConfigFlags {
  std::string file;
  std::string preset_name;
  std::vector<std::string> overrides;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", file, "JSON run configuration");
    cmd->add_option("--preset", preset_name, "Start from a preset: default or overfit");
    cmd->add_option("--set", overrides, "Override one field, e.g. train.epochs=10")->take_all();
  }

  RunConfig resolve() const {
    if (!file.empty() && !preset_name.empty()) throw UsageError("--config and --preset are mutually exclusive");
    RunConfig c = file.empty() ? preset(preset_name.empty() ? "default" : preset_name) : load_config(file);
    for (const auto& o : overrides) c = with_override(c, o);
    return c;
  }
};

geometry::ImageSize parse_size(const std::string& text) {
  const auto x = text.find('x');
  try {
    if (x == std::string::npos) throw std::invalid_argument(text);
    const geometry::ImageSize s{std::stoi(text.substr(0, x)), std::stoi(text.substr(x + 1))};
    if (s.width < 1 || s.height < 1) throw std::invalid_argument(text);
    return s;
  } catch (const std::logic_error&) {
    throw UsageError("image size must look like 1280x720, got '" + text + "'");
  }
}

ojson loss_json(const training::LossBreakdown& l) {
  return ojson{{"total", l.total}, {"point", l.point}, {"offset", l.offset}, {"confidence", l.confidence},
               {"horizon", l.horizon}};
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f || !(f << text)) throw DataError("cannot write " + path.string());
}

std::vector<std::string> expand_images(const std::vector<std::string>& inputs) {
  std::vector<std::string> files;
  for (const auto& in : inputs) {
    if (fs::is_directory(in)) {
      std::vector<std::string> found;
      for (const auto& e : fs::directory_iterator(in)) {
        auto ext = e.path().extension().string();
        std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
        if (e.is_regular_file() && (ext == ".png" || ext == ".jpg" || ext == ".jpeg")) found.push_back(e.path());
      }
      std::sort(found.begin(), found.end());
      files.insert(files.end(), found.begin(), found.end());
    } else {
      files.push_back(in);
    }
  }
  return files;
}

// ---------------------------------------------------------------- config

int cmd_config(const ConfigFlags& flags, std::ostream& out) {
  out << canonical_config(flags.resolve());
  return kExitOk;
}

// ---------------------------------------------------------------- train

struct TrainFlags {
  ConfigFlags config;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  bool dry_run = false;
};

int cmd_train(const TrainFlags& flags, std::ostream& out, std::ostream& err) {
  RunConfig config = flags.config.resolve();
  if (flags.seed) {
    config.seed = *flags.seed;
    config.train.seed = *flags.seed;
  }
  if (!flags.out_dir.empty()) config.output.dir = flags.out_dir;

  const model::LaneModel model(config.model);
  const RunData data = load_run_data(config);
  const auto samples = training_samples(data.train);

  if (flags.dry_run) {
    const auto params = model.init_params(config.seed);
    const auto& s = samples.front();
    const auto target = dataset::build_target(s.annotation, model.layout().m_max);
    model::LaneModel::Cache cache;
    const auto raw = model.forward(params, model.prepare(dataset::resize_to(s.image, model.input_size())), &cache);
    const auto loss = training::total_loss_with_gradient(raw, model.layout(), target, config.loss);
    std::vector<double> grad(params.values.size(), 0.0);
    model.backward(params, cache, loss.grad, grad);
    double norm = 0.0;
    for (double g : grad) norm += g * g;
    out << ojson{{"event", "dry_run"},
                 {"params", model.param_count()},
                 {"train_images", samples.size()},
                 {"loss", loss_json(loss.terms)},
                 {"grad_norm", std::sqrt(norm)}}
               .dump()
        << "\n";
    return kExitOk;
  }

  const fs::path dir(config.output.dir);
  fs::create_directories(dir);
  write_text(dir / "config.json", canonical_config(config));
  std::ofstream log(dir / config.output.log, std::ios::binary);
  if (!log) throw DataError("cannot write " + (dir / config.output.log).string());

  auto emit = [&](const ojson& record, bool print) {
    const auto line = record.dump();
    log << line << "\n";
    if (print) out << line << "\n";
  };
  emit(ojson{{"event", "start"},
             {"seed", config.seed},
             {"params", model.param_count()},
             {"train_images", samples.size()},
             {"eval_images", data.eval.records.size()}},
       true);

  const int last_epoch = config.train.epochs - 1;
  auto on_epoch = [&](const training::EpochRecord& r) {
    emit(ojson{{"event", "epoch"}, {"epoch", r.epoch}, {"step", r.step}, {"lr", r.lr}, {"loss", loss_json(r.loss)}},
         r.epoch % config.output.log_every == 0 || r.epoch == last_epoch);
  };

  training::TrainResult result;
  try {
    result = training::train(model, samples, config.train, config.loss, on_epoch);
  } catch (const training::DivergedLoss& e) {
    const auto path = dir / ("last_good." + config.output.checkpoint);
    model::save_checkpoint(path.string(), {config.model, e.last_good()});
    emit(ojson{{"event", "diverged"}, {"epoch", e.epoch()}, {"step", e.step()}, {"checkpoint", path.string()}}, true);
    err << "error: " << e.what() << "; last good parameters saved to " << path.string() << "\n";
    return kExitNumeric;
  }
  if (result.dropped_images > 0) {
    err << "warning: dropped " << result.dropped_images << " training images with too many lanes\n";
  }

  const auto ckpt_path = dir / config.output.checkpoint;
  model::save_checkpoint(ckpt_path.string(), {config.model, result.params});

  const auto eval = evaluate_model(model, result.params, data.eval, config.train.conf_threshold);
  auto report = metrics_json(eval.metrics);
  report["eval_set"] = data.eval_is_train ? "train" : "validation";
  write_text(dir / config.output.report, report.dump(2) + "\n");
  emit(ojson{{"event", "done"},
             {"checkpoint", ckpt_path.string()},
             {"steps", result.log.empty() ? 0 : result.log.back().step},
             {"dropped_images", result.dropped_images},
             {"report", report_json(eval.metrics.report())}},
       true);
  out << format_metrics(eval.metrics.report());
  return kExitOk;
}

// ---------------------------------------------------------------- evaluate

struct EvaluateFlags {
  std::string gt;
  std::string pred;
  std::string checkpoint;
  std::string images;
  std::string image_size = "1280x720";
  double conf = 0.5;
  std::string write_pred;
  std::string report;
};

int cmd_evaluate(const EvaluateFlags& flags, std::ostream& out) {
  if (flags.pred.empty() == flags.checkpoint.empty()) {
    throw UsageError("give exactly one of --pred or --checkpoint");
  }
  if (!flags.checkpoint.empty() && flags.images.empty()) throw UsageError("--checkpoint needs --images");
  const auto size = parse_size(flags.image_size);
  if (!fs::exists(flags.gt)) throw DataError("ground-truth file not found: " + flags.gt);
  const auto gt = dataset::load_annotations(flags.gt, size);

  std::vector<dataset::ImageAnnotation> preds;
  if (!flags.pred.empty()) {
    if (!fs::exists(flags.pred)) throw DataError("prediction file not found: " + flags.pred);
    preds = dataset::load_annotations(flags.pred, size);
  } else {
    if (!fs::exists(flags.checkpoint)) throw DataError("checkpoint not found: " + flags.checkpoint);
    const auto ckpt = model::load_checkpoint(flags.checkpoint);
    const model::LaneModel model(ckpt.config);
    for (const auto& record : gt) {
      const auto path = (fs::path(flags.images) / record.raw_file).string();
      if (!fs::exists(path)) throw DataError("image not found: " + path);
      const cv::Mat gray = dataset::load_gray(path);
      if (gray.cols != size.width || gray.rows != size.height) {
        throw DataError(path + " does not match --image-size " + flags.image_size);
      }
      const auto lanes = evaluation::detections(predict(model, ckpt.params, gray), size, flags.conf);
      preds.push_back(evaluation::sample_predictions(lanes, record));
    }
  }
  if (!flags.write_pred.empty()) dataset::save_annotations(flags.write_pred, preds);

  const auto metrics = evaluation::evaluate_records(gt, preds);
  out << format_metrics(metrics.report()) << format_discrepancies(metrics);
  if (!flags.report.empty()) write_text(flags.report, metrics_json(metrics).dump(2) + "\n");
  return kExitOk;
}

// ---------------------------------------------------------------- upperbound

struct UpperBoundFlags {
  std::string gt;
  std::optional<int> degree;
  bool sweep = false;
  std::string image_size = "1280x720";
  std::string report;
};

int cmd_upperbound(const UpperBoundFlags& flags, std::ostream& out, std::ostream& err) {
  if (flags.degree.has_value() == flags.sweep) throw UsageError("give exactly one of --degree or --sweep");
  if (flags.degree && (*flags.degree < evaluation::kMinUpperBoundDegree ||
                       *flags.degree > evaluation::kMaxUpperBoundDegree)) {
    throw UsageError("--degree must be in 1..5, got " + std::to_string(*flags.degree));
  }
  const auto size = parse_size(flags.image_size);
  if (!fs::exists(flags.gt)) throw DataError("annotation file not found: " + flags.gt);
  const auto annotations = dataset::load_annotations(flags.gt, size);
  if (annotations.empty()) err << "warning: " << flags.gt << " contains no annotations\n";

  std::vector<evaluation::UpperBoundResult> rows;
  const int lo = flags.sweep ? evaluation::kMinUpperBoundDegree : *flags.degree;
  const int hi = flags.sweep ? evaluation::kMaxUpperBoundDegree : *flags.degree;
  for (int k = lo; k <= hi; ++k) {
    rows.push_back(evaluation::upper_bound(annotations, k));
    if (rows.back().fallback_fits > 0) {
      err << "warning: degree " << k << ": " << rows.back().fallback_fits
          << " lanes had too few rows and were fit with a straight line\n";
    }
  }
  out << format_upper_bound_table(rows);
  for (const auto& row : rows) {
    out << "degree " << row.degree << " matching: " << row.oracle_checked << " images checked, max acc gap "
        << row.max_matching_gap << ", " << row.discrepancies.size() << " below optimum\n";
    for (const auto& d : row.discrepancies) {
      out << "  " << d.image << ": greedy " << d.greedy_acc << ", optimal " << d.optimal_acc << "\n";
    }
  }
  if (!flags.report.empty()) write_text(flags.report, upper_bound_json(rows).dump(2) + "\n");
  return kExitOk;
}

// ---------------------------------------------------------------- overlay

struct OverlayFlags {
  std::string checkpoint;
  std::vector<std::string> images;
  std::string out_dir;
  double conf = 0.5;
};

int cmd_overlay(const OverlayFlags& flags, std::ostream& out, std::ostream& err) {
  if (!fs::exists(flags.checkpoint)) throw DataError("checkpoint not found: " + flags.checkpoint);
  const auto ckpt = model::load_checkpoint(flags.checkpoint);
  const model::LaneModel model(ckpt.config);
  const auto files = expand_images(flags.images);
  if (files.empty()) throw DataError("no input images");
  fs::create_directories(flags.out_dir);

  int written = 0;
  for (const auto& file : files) {
    try {
      const cv::Mat color = dataset::load_color(file);
      cv::Mat gray;
      cv::cvtColor(color, gray, cv::COLOR_BGR2GRAY);
      const auto output = predict(model, ckpt.params, gray);
      const auto lines = lane_polylines(output, {color.cols, color.rows}, flags.conf);
      const auto target = (fs::path(flags.out_dir) / fs::path(file).stem()).string() + ".png";
      dataset::save_png(target, draw_overlay(color, lines));
      out << ojson{{"event", "overlay"}, {"image", file}, {"output", target}, {"lanes", lines.size()}}.dump() << "\n";
      ++written;
    } catch (const std::exception& e) {
      err << "warning: " << file << ": " << e.what() << "\n";
    }
  }
  return written > 0 ? kExitOk : kExitData;
}

// ---------------------------------------------------------------- synth

struct SynthFlags {
  ConfigFlags config;
  std::string out_dir;
  int count = 8;
  std::optional<std::uint64_t> seed;
  std::optional<double> noise;
};

int cmd_synth(const SynthFlags& flags, std::ostream& out) {
  const RunConfig config = flags.config.resolve();
  auto spec = config.synthetic;
  if (flags.noise) spec.x_noise_px = *flags.noise;
  if (flags.count < 0) throw UsageError("--count must be non-negative");
  const auto data = dataset::generate_synthetic(flags.seed.value_or(synthetic_seed(config, "train")), flags.count, spec);

  const fs::path dir(flags.out_dir);
  fs::create_directories(dir);
  for (std::size_t i = 0; i < data.images.size(); ++i) {
    const auto path = dir / data.annotations[i].raw_file;
    fs::create_directories(path.parent_path());
    dataset::save_png(path.string(), data.images[i]);
  }
  const auto ann = dir / "annotations.jsonl";
  dataset::save_annotations(ann.string(), data.annotations);
  out << ojson{{"event", "synth"},
               {"images", data.images.size()},
               {"annotations", ann.string()},
               {"image_size", {spec.image_size.width, spec.image_size.height}}}
             .dump()
      << "\n";
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Polynomial lane detection: training, evaluation and upper-bound studies", "polylane"};
  app.require_subcommand(1);

  ConfigFlags config_flags;
  auto* config_cmd = app.add_subcommand("config", "Print the canonical form of a run configuration");
  config_flags.attach(config_cmd);

  TrainFlags train_flags;
  auto* train_cmd = app.add_subcommand("train", "Train a model and write a checkpoint, log and report");
  train_flags.config.attach(train_cmd);
  train_cmd->add_option("--seed", train_flags.seed, "Override the config seed");
  train_cmd->add_option("--out", train_flags.out_dir, "Override output.dir");
  train_cmd->add_flag("--dry-run", train_flags.dry_run, "Validate, build, run one forward/backward and exit");

  EvaluateFlags eval_flags;
  auto* eval_cmd = app.add_subcommand("evaluate", "Score predictions against ground truth");
  eval_cmd->add_option("--gt", eval_flags.gt, "Ground-truth annotation file")->required();
  eval_cmd->add_option("--pred", eval_flags.pred, "Prediction file in the annotation format");
  eval_cmd->add_option("--checkpoint", eval_flags.checkpoint, "Run this model instead of reading predictions");
  eval_cmd->add_option("--images", eval_flags.images, "Image root for raw_file paths (with --checkpoint)");
  eval_cmd->add_option("--image-size", eval_flags.image_size, "Native image size WxH")->capture_default_str();
  eval_cmd->add_option("--conf", eval_flags.conf, "Confidence threshold")->capture_default_str();
  eval_cmd->add_option("--write-pred", eval_flags.write_pred, "Save the sampled predictions here");
  eval_cmd->add_option("--report", eval_flags.report, "Write the report as JSON");

  UpperBoundFlags ub_flags;
  auto* ub_cmd = app.add_subcommand("upperbound", "Score least-squares fits of the ground truth itself");
  ub_cmd->add_option("--gt", ub_flags.gt, "Annotation file")->required();
  ub_cmd->add_option("--degree", ub_flags.degree, "Polynomial degree (1..5)");
  ub_cmd->add_flag("--sweep", ub_flags.sweep, "All degrees 1..5");
  ub_cmd->add_option("--image-size", ub_flags.image_size, "Native image size WxH")->capture_default_str();
  ub_cmd->add_option("--report", ub_flags.report, "Write the table as JSON");

  OverlayFlags ov_flags;
  auto* ov_cmd = app.add_subcommand("overlay", "Draw detected lanes on images");
  ov_cmd->add_option("--checkpoint", ov_flags.checkpoint, "Model checkpoint")->required();
  ov_cmd->add_option("--images", ov_flags.images, "Image files or directories")->required()->take_all();
  ov_cmd->add_option("--out", ov_flags.out_dir, "Output directory")->required();
  ov_cmd->add_option("--conf", ov_flags.conf, "Confidence threshold")->capture_default_str();

  SynthFlags synth_flags;
  auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic dataset");
  synth_flags.config.attach(synth_cmd);
  synth_cmd->add_option("--out", synth_flags.out_dir, "Output directory")->required();
  synth_cmd->add_option("--count", synth_flags.count, "Number of images")->capture_default_str();
  synth_cmd->add_option("--seed", synth_flags.seed, "Generator seed (default: the training-set seed of the config)");
  synth_cmd->add_option("--noise", synth_flags.noise, "Gaussian x noise on annotations, pixels");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (config_cmd->parsed()) return cmd_config(config_flags, out);
    if (train_cmd->parsed()) return cmd_train(train_flags, out, err);
    if (eval_cmd->parsed()) return cmd_evaluate(eval_flags, out);
    if (ub_cmd->parsed()) return cmd_upperbound(ub_flags, out, err);
    if (ov_cmd->parsed()) return cmd_overlay(ov_flags, out, err);
    if (synth_cmd->parsed()) return cmd_synth(synth_flags, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const training::DivergedLoss& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const dataset::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace polylane::cli
