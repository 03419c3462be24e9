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

#include "dtmil/synthetic.h"

#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <utility>

#include "dtmil/errors.h"
#include "json.hpp"

namespace dtmil {
namespace {

class InstanceSampler {
 public:
  InstanceSampler(const SynthConfig& config, std::uint64_t seed)
      : config_(config), rng_(seed) {}

  int BagSize() {
    std::uniform_int_distribution<int> size(config_.min_instances,
                                            config_.max_instances);
    return size(rng_);
  }

  Vector Gaussian(double sigma) {
    Vector x(config_.d);
    for (int r = 0; r < config_.d; ++r) x[r] = sigma * normal_(rng_);
    return x;
  }

  Matrix DrawBag(bool positive) {
    const int m = BagSize();
    const int witnesses =
        positive ? static_cast<int>(std::ceil(config_.witness_rate * m)) : 0;
    Matrix x(config_.d, m);
    for (int j = 0; j < m; ++j) {
      x.col(j) = Gaussian(config_.cluster_sigma);
      if (j < witnesses) x(0, j) += config_.cluster_separation;
    }
    return x;
  }

  std::mt19937_64& rng() { return rng_; }

 private:
  const SynthConfig& config_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

std::vector<Bag> DrawDomain(InstanceSampler& sampler, int per_class,
                            const std::string& prefix) {
  std::vector<Bag> bags;
  bags.reserve(2 * static_cast<size_t>(per_class));
  for (int i = 0; i < per_class; ++i) {
    bags.emplace_back(prefix + "-pos-" + std::to_string(i), Label::kPositive,
                      sampler.DrawBag(true));
    bags.emplace_back(prefix + "-neg-" + std::to_string(i), Label::kNegative,
                      sampler.DrawBag(false));
  }
  return bags;
}

}  // namespace

void SynthConfig::Validate() const {
  auto fail = [](const std::string& message) {
    throw InvalidInputError("synth config: " + message);
  };
  if (d < 2) fail("d must be >= 2 (the shift rotates two coordinates)");
  if (source_bags_per_class < 1) fail("source_bags_per_class must be >= 1");
  if (target_bags_per_class < 1) fail("target_bags_per_class must be >= 1");
  if (min_instances < 1) fail("min_instances must be >= 1");
  if (max_instances < min_instances) fail("max_instances < min_instances");
  if (!(witness_rate > 0.0 && witness_rate <= 1.0)) {
    fail("witness_rate must lie in (0, 1]");
  }
  if (!(std::isfinite(cluster_separation) && cluster_separation > 0.0)) {
    fail("cluster_separation must be positive");
  }
  if (!(std::isfinite(cluster_sigma) && cluster_sigma > 0.0)) {
    fail("cluster_sigma must be positive");
  }
  if (!std::isfinite(shift_rotation_degrees)) {
    fail("shift_rotation_degrees must be finite");
  }
  if (!std::isfinite(shift_translation)) fail("shift_translation must be finite");
  if (!(std::isfinite(noise_sigma) && noise_sigma >= 0.0)) {
    fail("noise_sigma must be non-negative");
  }
}

SynthData GenerateSynthetic(const SynthConfig& config, std::uint64_t seed) {
  config.Validate();
  InstanceSampler sampler(config, seed);
  SynthData data;
  data.source = DrawDomain(sampler, config.source_bags_per_class, "s");
  std::vector<Bag> raw_target =
      DrawDomain(sampler, config.target_bags_per_class, "t");

  const double theta = config.shift_rotation_degrees * std::numbers::pi / 180.0;
  Matrix rotation = Matrix::Identity(config.d, config.d);
  rotation(0, 0) = std::cos(theta);
  rotation(0, 1) = -std::sin(theta);
  rotation(1, 0) = std::sin(theta);
  rotation(1, 1) = std::cos(theta);
  Vector translation = Vector::Zero(config.d);
  translation[0] = config.shift_translation;

  data.target.reserve(raw_target.size());
  for (const Bag& bag : raw_target) {
    Matrix x = rotation * bag.instances();
    x.colwise() += translation;
    if (config.noise_sigma > 0.0) {
      for (Eigen::Index j = 0; j < x.cols(); ++j) {
        x.col(j) += sampler.Gaussian(config.noise_sigma);
      }
    }
    data.target.emplace_back(bag.id(), bag.label(), std::move(x));
  }
  return data;
}

SynthConfig ParseSynthConfig(const std::string& json_text) {
  using Json = nlohmann::json;
  Json doc;
  try {
    doc = Json::parse(json_text);
  } catch (const Json::parse_error& e) {
    throw InvalidInputError(std::string("synth config is not valid JSON: ") +
                            e.what());
  }
  if (!doc.is_object()) throw InvalidInputError("synth config must be an object");
  SynthConfig config;
  try {
    for (const auto& [key, value] : doc.items()) {
      if (key == "d") config.d = value.get<int>();
      else if (key == "source_bags_per_class") config.source_bags_per_class = value.get<int>();
      else if (key == "target_bags_per_class") config.target_bags_per_class = value.get<int>();
      else if (key == "min_instances") config.min_instances = value.get<int>();
      else if (key == "max_instances") config.max_instances = value.get<int>();
      else if (key == "witness_rate") config.witness_rate = value.get<double>();
      else if (key == "cluster_separation") config.cluster_separation = value.get<double>();
      else if (key == "cluster_sigma") config.cluster_sigma = value.get<double>();
      else if (key == "shift_rotation_degrees") config.shift_rotation_degrees = value.get<double>();
      else if (key == "shift_translation") config.shift_translation = value.get<double>();
      else if (key == "noise_sigma") config.noise_sigma = value.get<double>();
      else throw InvalidInputError("unknown synth config key '" + key + "'");
    }
  } catch (const Json::exception& e) {
    throw InvalidInputError(std::string("bad synth config value: ") + e.what());
  }
  config.Validate();
  return config;
}

}  // namespace dtmil
