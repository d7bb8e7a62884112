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

#include "polylane/cli/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace polylane::cli {

using nlohmann::json;

namespace {

// Reads one JSON object, remembering which keys were consumed so leftovers
// can be reported.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(where() + " must be an object");
  }

  template <typename T>
  void get(const char* key, T& dst) {
    const json* v = find(key);
    if (!v) return;
    try {
      dst = v->get<T>();
    } catch (const json::exception&) {
      throw ConfigError(where(key) + " has the wrong type");
    }
  }

  void get(const char* key, double& dst) {
    const json* v = find(key);
    if (!v) return;
    if (!v->is_number()) throw ConfigError(where(key) + " must be a number");
    dst = v->get<double>();
  }

  void get(const char* key, int& dst) {
    const json* v = find(key);
    if (!v) return;
    if (!v->is_number_integer()) throw ConfigError(where(key) + " must be an integer");
    dst = v->get<int>();
  }

  void get(const char* key, bool& dst) {
    const json* v = find(key);
    if (!v) return;
    if (!v->is_boolean()) throw ConfigError(where(key) + " must be true or false");
    dst = v->get<bool>();
  }

  void get(const char* key, geometry::ImageSize& dst) {
    const json* v = find(key);
    if (!v) return;
    if (!v->is_array() || v->size() != 2 || !(*v)[0].is_number_integer() || !(*v)[1].is_number_integer()) {
      throw ConfigError(where(key) + " must be [width, height]");
    }
    dst = {(*v)[0].get<int>(), (*v)[1].get<int>()};
  }

  void get(const char* key, dataset::Range& dst) {
    const json* v = find(key);
    if (!v) return;
    dst = range(*v, where(key));
  }

  void get(const char* key, std::vector<dataset::Range>& dst) {
    const json* v = find(key);
    if (!v) return;
    if (!v->is_array()) throw ConfigError(where(key) + " must be a list of [lo, hi] pairs");
    dst.clear();
    for (const auto& r : *v) dst.push_back(range(r, where(key)));
  }

  Section child(const char* key) {
    const json* v = find(key);
    return Section(v ? *v : empty_object(), where(key));
  }

  bool has(const char* key) const { return j_.contains(key); }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!used_.count(key)) throw ConfigError("unknown key " + where(key.c_str()));
    }
  }

 private:
  static const json& empty_object() {
    static const json e = json::object();
    return e;
  }

  static dataset::Range range(const json& v, const std::string& where) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
      throw ConfigError(where + " must contain [lo, hi] pairs");
    }
    const dataset::Range r{v[0].get<double>(), v[1].get<double>()};
    if (r.lo > r.hi) throw ConfigError(where + " has lo > hi");
    return r;
  }

  const json* find(const char* key) {
    used_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  std::string where(const char* key = nullptr) const {
    std::string p = path_;
    if (key) p += (p.empty() ? "" : ".") + std::string(key);
    return p.empty() ? "config" : "'" + p + "'";
  }

  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

json size_json(geometry::ImageSize s) { return json::array({s.width, s.height}); }
json range_json(dataset::Range r) { return json::array({r.lo, r.hi}); }

void validate(const RunConfig& c) {
  const auto& l = c.model.layout;
  if (l.degree < 1 || l.degree > 5) throw ConfigError("'model.degree' must be in 1..5");
  if (l.m_max < 1) throw ConfigError("'model.m_max' must be positive");
  const auto& b = c.model.backbone;
  if (b.input.width < 1 || b.input.height < 1) throw ConfigError("'model.input_size' must be positive");
  if (b.downsample < 1) throw ConfigError("'model.downsample' must be positive");
  if (b.channels.empty()) throw ConfigError("'model.channels' must not be empty");
  for (int ch : b.channels) {
    if (ch < 1) throw ConfigError("'model.channels' entries must be positive");
  }
  if (c.loss.tau_loss_px < 0.0) throw ConfigError("'loss.tau_loss_px' must be non-negative");
  if (c.train.lr < 0.0) throw ConfigError("'train.lr' must be non-negative");
  if (c.train.batch_size < 1) throw ConfigError("'train.batch_size' must be positive");
  if (c.train.epochs < 0) throw ConfigError("'train.epochs' must be non-negative");
  if (c.train.conf_threshold < 0.0 || c.train.conf_threshold > 1.0) {
    throw ConfigError("'train.conf_threshold' must be in [0, 1]");
  }
  const auto& a = c.train.augmentation;
  if (a.probability < 0.0 || a.probability > 1.0) throw ConfigError("'augmentation.probability' must be in [0, 1]");
  if (a.flip_probability < 0.0 || a.flip_probability > 1.0) {
    throw ConfigError("'augmentation.flip_probability' must be in [0, 1]");
  }
  if (a.crop.width > a.crop_reference.width || a.crop.height > a.crop_reference.height || a.crop.width < 1 ||
      a.crop.height < 1) {
    throw ConfigError("'augmentation.crop' must fit inside 'augmentation.crop_reference'");
  }
  if (c.dataset.synthetic_train < 0 || c.dataset.synthetic_val < 0) {
    throw ConfigError("synthetic image counts must be non-negative");
  }
  if (c.synthetic.degree < 1 || c.synthetic.min_lanes < 0 || c.synthetic.max_lanes < c.synthetic.min_lanes) {
    throw ConfigError("'synthetic' lane counts or degree are invalid");
  }
  if (c.synthetic.row_step < 1) throw ConfigError("'synthetic.row_step' must be positive");
  if (c.output.log_every < 1) throw ConfigError("'output.log_every' must be positive");
}

}  // namespace

RunConfig parse_config(const json& j) {
  RunConfig c;
  Section root(j, "");
  root.get("seed", c.seed);

  {
    Section s = root.child("model");
    s.get("degree", c.model.layout.degree);
    s.get("m_max", c.model.layout.m_max);
    s.get("share_h", c.model.layout.share_h);
    s.get("input_size", c.model.backbone.input);
    s.get("downsample", c.model.backbone.downsample);
    s.get("coord_channels", c.model.backbone.coord_channels);
    s.get("channels", c.model.backbone.channels);
    s.finish();
  }
  {
    Section s = root.child("loss");
    s.get("w_p", c.loss.w_p);
    s.get("w_s", c.loss.w_s);
    s.get("w_c", c.loss.w_c);
    s.get("w_h", c.loss.w_h);
    s.get("tau_loss_px", c.loss.tau_loss_px);
    s.finish();
  }
  {
    Section s = root.child("train");
    s.get("lr", c.train.lr);
    s.get("cosine_period", c.train.cosine_period);
    s.get("batch_size", c.train.batch_size);
    s.get("epochs", c.train.epochs);
    s.get("conf_threshold", c.train.conf_threshold);
    s.get("augment", c.train.augment);
    std::string policy = c.train.too_many_lanes == training::TooManyLanesPolicy::kDrop ? "drop" : "error";
    s.get("too_many_lanes", policy);
    if (policy == "drop") {
      c.train.too_many_lanes = training::TooManyLanesPolicy::kDrop;
    } else if (policy == "error") {
      c.train.too_many_lanes = training::TooManyLanesPolicy::kError;
    } else {
      throw ConfigError("'train.too_many_lanes' must be \"drop\" or \"error\"");
    }
    s.finish();
  }
  {
    Section s = root.child("augmentation");
    auto& a = c.train.augmentation;
    s.get("probability", a.probability);
    s.get("max_rotation_deg", a.max_rotation_deg);
    s.get("flip_probability", a.flip_probability);
    s.get("crop", a.crop);
    s.get("crop_reference", a.crop_reference);
    s.finish();
  }
  {
    Section s = root.child("dataset");
    auto& d = c.dataset;
    std::string source = d.source == DatasetSource::kFiles ? "files" : "synthetic";
    s.get("source", source);
    if (source == "files") {
      d.source = DatasetSource::kFiles;
    } else if (source == "synthetic") {
      d.source = DatasetSource::kSynthetic;
    } else {
      throw ConfigError("'dataset.source' must be \"files\" or \"synthetic\"");
    }
    s.get("train_annotations", d.train_annotations);
    s.get("train_images", d.train_images);
    s.get("val_annotations", d.val_annotations);
    s.get("val_images", d.val_images);
    s.get("image_size", d.image_size);
    s.get("synthetic_train", d.synthetic_train);
    s.get("synthetic_val", d.synthetic_val);
    s.finish();
  }
  {
    Section s = root.child("synthetic");
    auto& y = c.synthetic;
    s.get("image_size", y.image_size);
    s.get("min_lanes", y.min_lanes);
    s.get("max_lanes", y.max_lanes);
    s.get("degree", y.degree);
    s.get("curvature", y.curvature);
    s.get("horizon", y.horizon);
    s.get("vanishing_x", y.vanishing_x);
    s.get("lane_spacing", y.lane_spacing);
    s.get("top_margin", y.top_margin);
    s.get("first_row", y.first_row);
    s.get("row_step", y.row_step);
    s.get("x_noise_px", y.x_noise_px);
    s.get("background_level", y.background_level);
    s.get("background_noise", y.background_noise);
    s.get("lane_level", y.lane_level);
    s.get("stroke_width_bottom_px", y.stroke_width_bottom_px);
    s.get("stroke_width_top_px", y.stroke_width_top_px);
    s.finish();
  }
  {
    Section s = root.child("output");
    s.get("dir", c.output.dir);
    s.get("checkpoint", c.output.checkpoint);
    s.get("log", c.output.log);
    s.get("report", c.output.report);
    s.get("log_every", c.output.log_every);
    s.finish();
  }
  root.finish();
  c.train.seed = c.seed;
  validate(c);
  return c;
}

RunConfig parse_config_text(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(j);
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse_config_text(buffer.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

json config_to_json(const RunConfig& c) {
  json j;
  j["seed"] = c.seed;
  const auto& l = c.model.layout;
  const auto& b = c.model.backbone;
  j["model"] = {{"degree", l.degree},
                {"m_max", l.m_max},
                {"share_h", l.share_h},
                {"input_size", size_json(b.input)},
                {"downsample", b.downsample},
                {"coord_channels", b.coord_channels},
                {"channels", b.channels}};
  j["loss"] = {{"w_p", c.loss.w_p},
               {"w_s", c.loss.w_s},
               {"w_c", c.loss.w_c},
               {"w_h", c.loss.w_h},
               {"tau_loss_px", c.loss.tau_loss_px}};
  const auto& t = c.train;
  j["train"] = {{"lr", t.lr},
                {"cosine_period", t.cosine_period},
                {"batch_size", t.batch_size},
                {"epochs", t.epochs},
                {"conf_threshold", t.conf_threshold},
                {"augment", t.augment},
                {"too_many_lanes", t.too_many_lanes == training::TooManyLanesPolicy::kDrop ? "drop" : "error"}};
  const auto& a = t.augmentation;
  j["augmentation"] = {{"probability", a.probability},
                       {"max_rotation_deg", a.max_rotation_deg},
                       {"flip_probability", a.flip_probability},
                       {"crop", size_json(a.crop)},
                       {"crop_reference", size_json(a.crop_reference)}};
  const auto& d = c.dataset;
  j["dataset"] = {{"source", d.source == DatasetSource::kFiles ? "files" : "synthetic"},
                  {"train_annotations", d.train_annotations},
                  {"train_images", d.train_images},
                  {"val_annotations", d.val_annotations},
                  {"val_images", d.val_images},
                  {"image_size", size_json(d.image_size)},
                  {"synthetic_train", d.synthetic_train},
                  {"synthetic_val", d.synthetic_val}};
  const auto& y = c.synthetic;
  json curvature = json::array();
  for (const auto& r : y.curvature) curvature.push_back(range_json(r));
  j["synthetic"] = {{"image_size", size_json(y.image_size)},
                    {"min_lanes", y.min_lanes},
                    {"max_lanes", y.max_lanes},
                    {"degree", y.degree},
                    {"curvature", curvature},
                    {"horizon", range_json(y.horizon)},
                    {"vanishing_x", range_json(y.vanishing_x)},
                    {"lane_spacing", range_json(y.lane_spacing)},
                    {"top_margin", range_json(y.top_margin)},
                    {"first_row", y.first_row},
                    {"row_step", y.row_step},
                    {"x_noise_px", y.x_noise_px},
                    {"background_level", y.background_level},
                    {"background_noise", y.background_noise},
                    {"lane_level", y.lane_level},
                    {"stroke_width_bottom_px", y.stroke_width_bottom_px},
                    {"stroke_width_top_px", y.stroke_width_top_px}};
  j["output"] = {{"dir", c.output.dir},
                 {"checkpoint", c.output.checkpoint},
                 {"log", c.output.log},
                 {"report", c.output.report},
                 {"log_every", c.output.log_every}};
  return j;
}

std::string canonical_config(const RunConfig& config) { return config_to_json(config).dump(2) + "\n"; }

RunConfig preset(std::string_view name) {
  RunConfig c;
  if (name == "default") return c;
  if (name != "overfit") throw ConfigError("unknown preset '" + std::string(name) + "' (use default or overfit)");

  // Eight synthetic images, no augmentation, scored on themselves.
  c.dataset.source = DatasetSource::kSynthetic;
  c.dataset.synthetic_train = 8;
  c.dataset.synthetic_val = 0;
  c.dataset.image_size = c.synthetic.image_size;
  c.train.augment = false;
  c.train.batch_size = 8;
  c.train.epochs = 3000;
  c.train.cosine_period = 6000;  // lr reaches 0 at the last epoch
  c.train.lr = 3e-3;
  c.loss.tau_loss_px = 1.0;
  c.output.dir = "runs/overfit";
  c.output.log_every = 100;
  return c;
}

RunConfig with_override(const RunConfig& config, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw ConfigError("override '" + std::string(assignment) + "' must look like section.key=value");
  }
  const std::string path(assignment.substr(0, eq));
  const std::string text(assignment.substr(eq + 1));
  json value;
  try {
    value = json::parse(text);
  } catch (const json::parse_error&) {
    value = text;
  }
  json j = config_to_json(config);
  json* node = &j;
  std::size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (key.empty()) throw ConfigError("override path '" + path + "' is malformed");
    if (!node->is_object() || !node->contains(key)) throw ConfigError("unknown key '" + path + "' in override");
    node = &(*node)[key];
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  *node = std::move(value);
  return parse_config(j);
}

}  // namespace polylane::cli
