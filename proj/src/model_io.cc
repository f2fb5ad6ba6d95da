// Copyright 2026 The SAM Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Model file layout (format_version 1):
//
//   {
//     "format_version": 1,
//     "feature_names": ["a", "b", ...],              // d strings
//     "intercepts": [...],                           // d numbers
//     "coefficients": [...],                         // d*d numbers, row-major
//     "fit_meta": [{"used_ransac": false, "converged": true,
//                   "degenerate": false, "standardized": false}, ...],
//     "standardization": null | {"means": [...], "scales": [...]},
//     "default_normalize": false,
//     "created_unix_seconds": 0
//   }
//
// Doubles are written in shortest round-trip form.

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "sam/sam.h"

namespace sam {

namespace {

using nlohmann::json;

json ToJson(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

const json& Field(const json& doc, const char* key) {
  const auto it = doc.find(key);
  if (it == doc.end()) {
    throw ModelError(std::string("model: missing field '") + key + "'");
  }
  return *it;
}

Vector ReadNumbers(const json& arr, const char* key, Eigen::Index expected) {
  if (!arr.is_array()) {
    throw ModelError(std::string("model: '") + key + "' must be an array");
  }
  if (static_cast<Eigen::Index>(arr.size()) != expected) {
    throw ModelError(std::string("model: '") + key + "' has " +
                     std::to_string(arr.size()) + " entries, expected " +
                     std::to_string(expected));
  }
  Vector out(expected);
  for (Eigen::Index i = 0; i < expected; ++i) {
    const json& v = arr[static_cast<std::size_t>(i)];
    // Non-finite doubles serialize as null.
    if (v.is_null()) {
      throw ModelError(std::string("model: non-finite entry in '") + key +
                       "' at index " + std::to_string(i));
    }
    if (!v.is_number()) {
      throw ModelError(std::string("model: non-numeric entry in '") + key +
                       "' at index " + std::to_string(i));
    }
    out(i) = v.get<double>();
  }
  return out;
}

bool ReadBool(const json& obj, const char* key) {
  const json& v = Field(obj, key);
  if (!v.is_boolean()) {
    throw ModelError(std::string("model: '") + key + "' must be a boolean");
  }
  return v.get<bool>();
}

}  // namespace

std::string SerializeModel(const SamModel& model) {
  model.Validate();
  const Eigen::Index d = model.dimension();
  json doc;
  doc["format_version"] = model.format_version;
  doc["feature_names"] = model.feature_names;
  doc["intercepts"] = ToJson(model.intercepts);
  json coefficients = json::array();
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      coefficients.push_back(model.coefficients(i, j));
    }
  }
  doc["coefficients"] = std::move(coefficients);
  json meta = json::array();
  for (const auto& m : model.fit_meta) {
    meta.push_back({{"used_ransac", m.used_ransac},
                    {"converged", m.converged},
                    {"degenerate", m.degenerate},
                    {"standardized", m.standardized}});
  }
  doc["fit_meta"] = std::move(meta);
  if (model.standardization) {
    doc["standardization"] = {{"means", ToJson(model.standardization->means)},
                              {"scales", ToJson(model.standardization->scales)}};
  } else {
    doc["standardization"] = nullptr;
  }
  doc["default_normalize"] = model.default_normalize;
  doc["created_unix_seconds"] = model.created_unix_seconds;
  return doc.dump(2) + "\n";
}

SamModel DeserializeModel(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ModelError("model: parse error at byte " + std::to_string(e.byte) +
                     ": " + e.what());
  }
  if (!doc.is_object()) throw ModelError("model: document is not an object");

  const json& version = Field(doc, "format_version");
  if (!version.is_number_integer()) {
    throw ModelError("model: format_version must be an integer");
  }
  if (version.get<int>() != kModelFormatVersion) {
    throw ModelError("model: unsupported format_version " + version.dump() +
                     " (expected " + std::to_string(kModelFormatVersion) + ")");
  }

  SamModel model;
  model.format_version = version.get<int>();
  const json& names = Field(doc, "feature_names");
  if (!names.is_array()) {
    throw ModelError("model: 'feature_names' must be an array");
  }
  for (const auto& name : names) {
    if (!name.is_string()) {
      throw ModelError("model: feature names must be strings");
    }
    model.feature_names.push_back(name.get<std::string>());
  }
  const auto d = static_cast<Eigen::Index>(model.feature_names.size());
  model.intercepts = ReadNumbers(Field(doc, "intercepts"), "intercepts", d);
  const Vector flat =
      ReadNumbers(Field(doc, "coefficients"), "coefficients", d * d);
  model.coefficients.resize(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      model.coefficients(i, j) = flat(i * d + j);
    }
  }
  const json& meta = Field(doc, "fit_meta");
  if (!meta.is_array()) throw ModelError("model: 'fit_meta' must be an array");
  for (const auto& m : meta) {
    if (!m.is_object()) {
      throw ModelError("model: fit_meta entries must be objects");
    }
    model.fit_meta.push_back({ReadBool(m, "used_ransac"),
                              ReadBool(m, "converged"),
                              ReadBool(m, "degenerate"),
                              ReadBool(m, "standardized")});
  }
  if (const auto it = doc.find("standardization");
      it != doc.end() && !it->is_null()) {
    Standardization z;
    z.means = ReadNumbers(Field(*it, "means"), "standardization.means", d);
    z.scales = ReadNumbers(Field(*it, "scales"), "standardization.scales", d);
    model.standardization = std::move(z);
  }
  if (doc.contains("default_normalize")) {
    model.default_normalize = ReadBool(doc, "default_normalize");
  }
  const json& created = Field(doc, "created_unix_seconds");
  if (!created.is_number_integer()) {
    throw ModelError("model: created_unix_seconds must be an integer");
  }
  model.created_unix_seconds = created.get<std::int64_t>();
  model.Validate();
  return model;
}

void SaveModel(const SamModel& model, const std::string& path) {
  const std::string text = SerializeModel(model);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ModelError("model: cannot write '" + path + "'");
  out << text;
  if (!out) throw ModelError("model: write failed for '" + path + "'");
}

SamModel LoadModel(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ModelError("model: cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return DeserializeModel(buffer.str());
}

}  // namespace sam
