// Copyright 2026 The dtmil Authors.
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

#include "dtmil/data_io.h"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <unistd.h>
#include <utility>

#include "dtmil/errors.h"
#include "json.hpp"

namespace dtmil {
namespace {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

OrderedJson VectorToJson(const Eigen::Ref<const Vector>& v) {
  OrderedJson out = OrderedJson::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

// Columns of `m` become inner arrays.
OrderedJson ColumnsToJson(const Matrix& m) {
  OrderedJson out = OrderedJson::array();
  for (Eigen::Index c = 0; c < m.cols(); ++c) out.push_back(VectorToJson(m.col(c)));
  return out;
}

Vector JsonToVector(const Json& j, const std::string& what) {
  if (!j.is_array()) throw FormatError(what + " must be an array of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) {
      throw FormatError(what + "[" + std::to_string(i) + "] is not a number");
    }
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

Matrix JsonToColumns(const Json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) {
    throw FormatError(what + " must be a nonempty array of arrays");
  }
  Matrix m;
  for (size_t c = 0; c < j.size(); ++c) {
    const Vector col = JsonToVector(j[c], what + "[" + std::to_string(c) + "]");
    if (c == 0) {
      m.resize(col.size(), static_cast<Eigen::Index>(j.size()));
    } else if (col.size() != m.rows()) {
      throw FormatError(what + "[" + std::to_string(c) + "] has length " +
                        std::to_string(col.size()) + ", expected " +
                        std::to_string(m.rows()));
    }
    m.col(static_cast<Eigen::Index>(c)) = col;
  }
  return m;
}

OrderedJson HyperToJson(const Hyperparams& h) {
  OrderedJson out;
  out["c1"] = h.c1;
  out["c2"] = h.c2;
  out["kappa"] = h.kappa;
  out["eta"] = h.eta;
  out["inner_iters"] = h.inner_iters;
  out["max_outer"] = h.max_outer;
  out["tol"] = h.tol;
  out["r_max"] = h.r_max;
  out["seed"] = h.seed;
  return out;
}

Hyperparams HyperFromJson(const Json& j) {
  static const std::set<std::string> kKeys = {
      "c1", "c2", "kappa", "eta", "inner_iters",
      "max_outer", "tol", "r_max", "seed"};
  if (!j.is_object()) throw FormatError("hyper must be an object");
  for (const auto& [key, value] : j.items()) {
    if (!kKeys.count(key)) throw FormatError("unknown hyper key '" + key + "'");
  }
  for (const std::string& key : kKeys) {
    if (!j.contains(key)) throw FormatError("hyper is missing '" + key + "'");
  }
  try {
    Hyperparams h;
    h.c1 = j.at("c1").get<double>();
    h.c2 = j.at("c2").get<double>();
    h.kappa = j.at("kappa").get<int>();
    h.eta = j.at("eta").get<double>();
    h.inner_iters = j.at("inner_iters").get<int>();
    h.max_outer = j.at("max_outer").get<int>();
    h.tol = j.at("tol").get<double>();
    h.r_max = j.at("r_max").get<double>();
    h.seed = j.at("seed").get<std::uint64_t>();
    return h;
  } catch (const Json::exception& e) {
    throw FormatError(std::string("bad hyper value: ") + e.what());
  }
}

OrderedJson ModelJson(const SourceModel& source) {
  source.Validate();
  OrderedJson out;
  out["format_version"] = kModelFormatVersion;
  out["phi"] = ColumnsToJson(source.phi.codewords());
  out["v"] = VectorToJson(source.v);
  out["psi"] = nullptr;
  out["w"] = nullptr;
  out["hyper"] = nullptr;
  return out;
}

Bag ParseBagLine(const std::string& line, int line_number,
                 std::set<std::string>& seen_ids, int& dim) {
  const std::string where = "line " + std::to_string(line_number) + ": ";
  Json record;
  try {
    record = Json::parse(line);
  } catch (const Json::parse_error& e) {
    throw FormatError(where + "invalid JSON (" + e.what() + ")");
  }
  if (!record.is_object()) throw FormatError(where + "expected a JSON object");
  for (const auto& [key, value] : record.items()) {
    if (key != "id" && key != "label" && key != "instances") {
      throw FormatError(where + "unknown key '" + key + "'");
    }
  }
  if (!record.contains("id") || !record["id"].is_string()) {
    throw FormatError(where + "missing string field 'id'");
  }
  std::string id = record["id"].get<std::string>();
  if (!seen_ids.insert(id).second) {
    throw FormatError(where + "duplicate bag id '" + id + "'");
  }

  std::optional<Label> label;
  if (record.contains("label") && !record["label"].is_null()) {
    const Json& l = record["label"];
    if (!l.is_number_integer() || (l.get<int>() != 1 && l.get<int>() != -1)) {
      throw FormatError(where + "label of bag '" + id + "' must be 1 or -1");
    }
    label = LabelFromInt(l.get<int>());
  }

  if (!record.contains("instances") || !record["instances"].is_array()) {
    throw FormatError(where + "missing array field 'instances'");
  }
  const Json& instances = record["instances"];
  if (instances.empty()) {
    throw FormatError(where + "bag '" + id + "' has no instances");
  }
  Matrix x;
  try {
    x = JsonToColumns(instances, "instances");
  } catch (const FormatError& e) {
    throw FormatError(where + "bag '" + id + "': " + e.what());
  }
  if (x.rows() == 0) {
    throw FormatError(where + "bag '" + id + "' has empty instances");
  }
  if (dim < 0) {
    dim = static_cast<int>(x.rows());
  } else if (x.rows() != dim) {
    throw FormatError(where + "bag '" + id + "' has dimension " +
                      std::to_string(x.rows()) + ", expected " +
                      std::to_string(dim));
  }
  try {
    return Bag(id, label, std::move(x));
  } catch (const InvalidInputError& e) {
    throw FormatError(where + e.what());
  }
}

}  // namespace

std::vector<Bag> ParseDataset(const std::string& text) {
  std::vector<Bag> bags;
  std::set<std::string> seen_ids;
  int dim = -1;
  std::istringstream in(text);
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    bags.push_back(ParseBagLine(line, line_number, seen_ids, dim));
  }
  return bags;
}

std::vector<Bag> LoadDataset(const std::string& path) {
  try {
    return ParseDataset(ReadFile(path));
  } catch (const FormatError& e) {
    throw FormatError(path + ": " + e.what());
  }
}

std::string SerializeDataset(const std::vector<Bag>& bags) {
  std::string out;
  for (const Bag& bag : bags) {
    OrderedJson record;
    record["id"] = bag.id();
    if (bag.label()) record["label"] = static_cast<int>(*bag.label());
    record["instances"] = ColumnsToJson(bag.instances());
    out += record.dump();
    out += '\n';
  }
  return out;
}

void SaveDataset(const std::vector<Bag>& bags, const std::string& path) {
  WriteFileAtomic(path, SerializeDataset(bags));
}

std::string SerializeModel(const SourceModel& model) {
  return ModelJson(model).dump(1) + "\n";
}

std::string SerializeModel(const AdaptedModel& model) {
  model.Validate();
  OrderedJson out = ModelJson(model.source);
  out["psi"] = ColumnsToJson(model.psi.codewords());
  out["w"] = VectorToJson(model.w);
  out["hyper"] = HyperToJson(model.hyper);
  return out.dump(1) + "\n";
}

void SaveModel(const SourceModel& model, const std::string& path) {
  WriteFileAtomic(path, SerializeModel(model));
}

void SaveModel(const AdaptedModel& model, const std::string& path) {
  WriteFileAtomic(path, SerializeModel(model));
}

AnyModel ParseModel(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw FormatError(std::string("model is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw FormatError("model must be a JSON object");
  if (!doc.contains("format_version") ||
      !doc["format_version"].is_number_integer()) {
    throw FormatError("model is missing integer 'format_version'");
  }
  const auto version = doc["format_version"].get<long long>();
  if (version != kModelFormatVersion) {
    throw VersionError("unsupported model format_version: expected " +
                       std::to_string(kModelFormatVersion) + ", found " +
                       std::to_string(version));
  }
  static const std::set<std::string> kKeys = {"format_version", "phi", "v",
                                              "psi", "w", "hyper"};
  for (const auto& [key, value] : doc.items()) {
    if (!kKeys.count(key)) {
      throw FormatError("unknown top-level model key '" + key + "'");
    }
  }
  for (const std::string& key : kKeys) {
    if (!doc.contains(key)) throw FormatError("model is missing '" + key + "'");
  }

  try {
    SourceModel source{Dictionary(JsonToColumns(doc["phi"], "phi")),
                       JsonToVector(doc["v"], "v")};
    source.Validate();

    const bool has_psi = !doc["psi"].is_null();
    const bool has_w = !doc["w"].is_null();
    const bool has_hyper = !doc["hyper"].is_null();
    if (!has_psi && !has_w && !has_hyper) return source;
    if (!(has_psi && has_w && has_hyper)) {
      throw FormatError("psi, w and hyper must be all present or all null");
    }
    AdaptedModel adapted{std::move(source),
                         Dictionary(JsonToColumns(doc["psi"], "psi")),
                         JsonToVector(doc["w"], "w"),
                         HyperFromJson(doc["hyper"])};
    adapted.Validate();
    return adapted;
  } catch (const InvalidInputError& e) {
    throw FormatError(std::string("inconsistent model: ") + e.what());
  }
}

AnyModel LoadModel(const std::string& path) {
  try {
    return ParseModel(ReadFile(path));
  } catch (const VersionError& e) {
    throw VersionError(path + ": " + e.what());
  } catch (const FormatError& e) {
    throw FormatError(path + ": " + e.what());
  }
}

SourceModel LoadSourceModel(const std::string& path) {
  AnyModel any = LoadModel(path);
  if (auto* source = std::get_if<SourceModel>(&any)) return std::move(*source);
  throw ModelTypeError(path + ": expected a source model, found an adapted "
                              "model");
}

AdaptedModel LoadAdaptedModel(const std::string& path) {
  AnyModel any = LoadModel(path);
  if (auto* adapted = std::get_if<AdaptedModel>(&any)) {
    return std::move(*adapted);
  }
  throw ModelTypeError(path + ": expected an adapted model, found a source "
                              "model");
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw IoError("error while reading '" + path + "'");
  return buffer.str();
}

void WriteFileAtomic(const std::string& path, const std::string& contents) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path temp = target;
  temp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + temp.string() + "' for writing");
    out << contents;
    out.flush();
    if (!out) {
      out.close();
      std::error_code ignored;
      fs::remove(temp, ignored);
      throw IoError("error while writing '" + temp.string() + "'");
    }
  }
  std::error_code ec;
  fs::rename(temp, target, ec);
  if (ec) {
    std::error_code ignored;
    fs::remove(temp, ignored);
    throw IoError("cannot rename '" + temp.string() + "' to '" + path +
                  "': " + ec.message());
  }
}

}  // namespace dtmil
