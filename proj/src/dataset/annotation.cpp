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

#include "polylane/dataset/annotation.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace polylane::dataset {

using nlohmann::json;

ParseError::ParseError(std::size_t line, const std::string& reason)
    : std::runtime_error("line " + std::to_string(line) + ": " + reason), line_(line), reason_(reason) {}

std::vector<PointList> ImageAnnotation::lane_points() const {
  std::vector<PointList> out;
  for (const auto& lane : lanes) {
    PointList pts;
    for (std::size_t i = 0; i < lane.size() && i < h_samples.size(); ++i) {
      if (lane[i] >= 0.0) pts.push_back({lane[i], h_samples[i]});
    }
    if (pts.size() >= 2) out.push_back(std::move(pts));
  }
  return out;
}

AnnotatedImage to_annotated(const ImageAnnotation& a) {
  return {a.raw_file, a.image_size, a.lane_points()};
}

namespace {

std::vector<double> number_list(const json& value, const char* what) {
  if (!value.is_array()) throw std::runtime_error(std::string(what) + " must be a list");
  std::vector<double> out;
  out.reserve(value.size());
  for (const auto& v : value) {
    if (!v.is_number()) throw std::runtime_error(std::string(what) + " must contain only numbers");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw std::runtime_error(std::string(what) + " contains a non-finite number");
    out.push_back(d);
  }
  return out;
}

ImageAnnotation parse_record(const std::string& line, ImageSize image_size) {
  const json j = json::parse(line);
  if (!j.is_object()) throw std::runtime_error("record is not a JSON object");
  for (const char* key : {"lanes", "h_samples", "raw_file"}) {
    if (!j.contains(key)) throw std::runtime_error(std::string("missing key \"") + key + "\"");
  }
  if (!j["raw_file"].is_string()) throw std::runtime_error("raw_file must be a string");

  ImageAnnotation a;
  a.raw_file = j["raw_file"].get<std::string>();
  a.image_size = image_size;
  a.h_samples = number_list(j["h_samples"], "h_samples");
  for (std::size_t i = 1; i < a.h_samples.size(); ++i) {
    if (!(a.h_samples[i] > a.h_samples[i - 1])) {
      throw std::runtime_error("h_samples must be strictly increasing");
    }
  }
  if (!j["lanes"].is_array()) throw std::runtime_error("lanes must be a list of lists");
  for (std::size_t lane = 0; lane < j["lanes"].size(); ++lane) {
    auto xs = number_list(j["lanes"][lane], "lanes");
    if (xs.size() != a.h_samples.size()) {
      throw std::runtime_error("lane " + std::to_string(lane) + " has " + std::to_string(xs.size()) +
                               " entries but h_samples has " + std::to_string(a.h_samples.size()));
    }
    a.lanes.push_back(std::move(xs));
  }
  return a;
}

bool is_blank(const std::string& line) {
  return line.find_first_not_of(" \t\r\n") == std::string::npos;
}

nlohmann::ordered_json number(double v) {
  if (std::floor(v) == v && std::fabs(v) < 9.0e15) return static_cast<std::int64_t>(v);
  return v;
}

}  // namespace

std::vector<ImageAnnotation> parse_annotations(std::istream& in, ImageSize image_size) {
  std::vector<ImageAnnotation> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    try {
      out.push_back(parse_record(line, image_size));
    } catch (const json::exception& e) {
      throw ParseError(line_no, std::string("invalid JSON: ") + e.what());
    } catch (const std::runtime_error& e) {
      throw ParseError(line_no, e.what());
    }
  }
  return out;
}

std::vector<ImageAnnotation> parse_annotations(std::string_view text, ImageSize image_size) {
  std::istringstream in{std::string(text)};
  return parse_annotations(in, image_size);
}

std::vector<ImageAnnotation> load_annotations(const std::string& path, ImageSize image_size) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open annotation file: " + path);
  return parse_annotations(in, image_size);
}

std::string serialize_annotation(const ImageAnnotation& a) {
  nlohmann::ordered_json j;
  auto lanes = nlohmann::ordered_json::array();
  for (const auto& lane : a.lanes) {
    auto xs = nlohmann::ordered_json::array();
    for (double x : lane) xs.push_back(number(x));
    lanes.push_back(std::move(xs));
  }
  auto rows = nlohmann::ordered_json::array();
  for (double y : a.h_samples) rows.push_back(number(y));
  j["lanes"] = std::move(lanes);
  j["h_samples"] = std::move(rows);
  j["raw_file"] = a.raw_file;
  return j.dump();
}

void write_annotations(std::ostream& out, const std::vector<ImageAnnotation>& records) {
  for (const auto& r : records) out << serialize_annotation(r) << '\n';
}

void save_annotations(const std::string& path, const std::vector<ImageAnnotation>& records) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write annotation file: " + path);
  write_annotations(out, records);
}

}  // namespace polylane::dataset
