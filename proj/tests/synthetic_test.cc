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
#include <tuple>
#include <string>
#include <vector>

#include "dtmil/data_io.h"
#include "dtmil/errors.h"
#include "gtest/gtest.h"

namespace dtmil {
namespace {

// Tiny cluster spread so concept and background instances are unambiguous.
SynthConfig Crisp() {
  SynthConfig config;
  config.d = 3;
  config.source_bags_per_class = 30;
  config.target_bags_per_class = 30;
  config.min_instances = 1;
  config.max_instances = 9;
  config.cluster_sigma = 1e-3;
  config.cluster_separation = 10.0;
  config.noise_sigma = 0.0;
  return config;
}

int CountConcept(const Bag& bag, double center0, double center1) {
  int count = 0;
  for (int j = 0; j < bag.size(); ++j) {
    const Vector x = bag.instance(j);
    if (std::abs(x[0] - center0) < 0.1 && std::abs(x[1] - center1) < 0.1) {
      ++count;
    }
  }
  return count;
}

TEST(GenerateSyntheticTest, ShapesIdsAndLabels) {
  SynthConfig config;
  config.source_bags_per_class = 7;
  config.target_bags_per_class = 3;
  const SynthData data = GenerateSynthetic(config, 0);
  ASSERT_EQ(data.source.size(), 14u);
  ASSERT_EQ(data.target.size(), 6u);
  EXPECT_EQ(data.source[0].id(), "s-pos-0");
  EXPECT_EQ(data.source[1].id(), "s-neg-0");
  EXPECT_EQ(data.target[5].id(), "t-neg-2");
  for (const std::vector<Bag>* domain : {&data.source, &data.target}) {
    int positives = 0;
    for (const Bag& bag : *domain) {
      EXPECT_EQ(bag.dim(), config.d);
      EXPECT_GE(bag.size(), config.min_instances);
      EXPECT_LE(bag.size(), config.max_instances);
      EXPECT_TRUE(bag.instances().allFinite());
      positives += bag.label() == Label::kPositive;
    }
    EXPECT_EQ(2 * positives, static_cast<int>(domain->size()));
  }
}

TEST(GenerateSyntheticTest, WitnessCountsFollowRate) {
  for (double rate : {0.5, 1.0, 0.2}) {
    SynthConfig config = Crisp();
    config.witness_rate = rate;
    config.shift_rotation_degrees = 0.0;
    config.shift_translation = 0.0;
    const SynthData data = GenerateSynthetic(config, 1);
    for (const Bag& bag : data.source) {
      const int expected =
          bag.label() == Label::kPositive
              ? static_cast<int>(std::ceil(rate * bag.size()))
              : 0;
      EXPECT_EQ(CountConcept(bag, 10.0, 0.0), expected) << bag.id();
      if (rate == 1.0 && bag.label() == Label::kPositive) {
        EXPECT_EQ(CountConcept(bag, 10.0, 0.0), bag.size());
      }
    }
  }
}

TEST(GenerateSyntheticTest, TargetShiftMovesConcept) {
  SynthConfig config = Crisp();
  config.shift_rotation_degrees = 90.0;
  config.shift_translation = 2.0;
  const SynthData data = GenerateSynthetic(config, 2);
  // Rotating 10 e_0 by 90 degrees lands on 10 e_1, then + 2 e_0.
  for (const Bag& bag : data.target) {
    const int concept_hits = CountConcept(bag, 2.0, 10.0);
    const int background_hits = CountConcept(bag, 2.0, 0.0);
    EXPECT_EQ(concept_hits + background_hits, bag.size()) << bag.id();
    EXPECT_EQ(concept_hits > 0, bag.label() == Label::kPositive) << bag.id();
  }
}

TEST(GenerateSyntheticTest, NullShiftMatchesSourceDistribution) {
  SynthConfig config;
  config.shift_rotation_degrees = 0.0;
  config.shift_translation = 0.0;
  config.noise_sigma = 0.0;
  config.source_bags_per_class = 400;
  config.target_bags_per_class = 400;
  const SynthData data = GenerateSynthetic(config, 3);
  // Compare per-class instance means and bag-size means between domains.
  auto summarize = [&](const std::vector<Bag>& bags, Label label) {
    Vector mean = Vector::Zero(config.d);
    double second = 0.0;
    int instances = 0, count = 0;
    for (const Bag& bag : bags) {
      if (bag.label() != label) continue;
      mean += bag.instances().rowwise().sum();
      second += bag.instances().squaredNorm();
      instances += bag.size();
      ++count;
    }
    mean /= instances;
    return std::make_tuple(mean, second / instances,
                           static_cast<double>(instances) / count);
  };
  for (Label label : {Label::kPositive, Label::kNegative}) {
    const auto [ms, ss, bs] = summarize(data.source, label);
    const auto [mt, st, bt] = summarize(data.target, label);
    // Standard errors: instance mean ~ 2.5 / sqrt(2400), bag size ~ 1.4 / 20.
    EXPECT_LE((ms - mt).cwiseAbs().maxCoeff(), 0.35);
    EXPECT_NEAR(ss / st, 1.0, 0.06);
    EXPECT_NEAR(bs, bt, 0.35);
  }
}

TEST(GenerateSyntheticTest, NullShiftIsExactIdentityMap) {
  SynthConfig config = Crisp();
  config.shift_rotation_degrees = 0.0;
  config.shift_translation = 0.0;
  config.witness_rate = 1.0;
  const SynthData data = GenerateSynthetic(config, 4);
  for (const Bag& bag : data.target) {
    EXPECT_EQ(CountConcept(bag, 10.0, 0.0),
              bag.label() == Label::kPositive ? bag.size() : 0);
  }
}

TEST(GenerateSyntheticTest, DeterministicPerSeed) {
  SynthConfig config;
  config.source_bags_per_class = 10;
  config.target_bags_per_class = 5;
  const SynthData a = GenerateSynthetic(config, 42);
  const SynthData b = GenerateSynthetic(config, 42);
  const SynthData c = GenerateSynthetic(config, 43);
  EXPECT_EQ(SerializeDataset(a.source), SerializeDataset(b.source));
  EXPECT_EQ(SerializeDataset(a.target), SerializeDataset(b.target));
  EXPECT_NE(SerializeDataset(a.source), SerializeDataset(c.source));
  EXPECT_NE(SerializeDataset(a.target), SerializeDataset(c.target));
}

TEST(SynthConfigTest, RejectsInvalidConfigs) {
  auto expect_invalid = [](auto mutate) {
    SynthConfig config;
    mutate(config);
    EXPECT_THROW(GenerateSynthetic(config, 0), InvalidInputError);
  };
  expect_invalid([](SynthConfig& c) { c.d = 1; });
  expect_invalid([](SynthConfig& c) { c.source_bags_per_class = 0; });
  expect_invalid([](SynthConfig& c) { c.target_bags_per_class = 0; });
  expect_invalid([](SynthConfig& c) { c.min_instances = 0; });
  expect_invalid([](SynthConfig& c) { c.max_instances = 3; });
  expect_invalid([](SynthConfig& c) { c.witness_rate = 0.0; });
  expect_invalid([](SynthConfig& c) { c.witness_rate = 1.5; });
  expect_invalid([](SynthConfig& c) { c.cluster_sigma = 0.0; });
  expect_invalid([](SynthConfig& c) { c.cluster_separation = -1.0; });
  expect_invalid([](SynthConfig& c) { c.noise_sigma = -0.1; });
  expect_invalid([](SynthConfig& c) { c.shift_translation = NAN; });
}

TEST(ParseSynthConfigTest, OverridesSubsetOfFields) {
  const SynthConfig config =
      ParseSynthConfig(R"({"d": 4, "witness_rate": 0.25, "noise_sigma": 0})");
  const SynthConfig defaults;
  EXPECT_EQ(config.d, 4);
  EXPECT_EQ(config.witness_rate, 0.25);
  EXPECT_EQ(config.noise_sigma, 0.0);
  EXPECT_EQ(config.source_bags_per_class, defaults.source_bags_per_class);
  EXPECT_EQ(config.shift_rotation_degrees, defaults.shift_rotation_degrees);
}

TEST(ParseSynthConfigTest, RejectsBadDocuments) {
  EXPECT_THROW(ParseSynthConfig(R"({"dims": 4})"), InvalidInputError);
  EXPECT_THROW(ParseSynthConfig(R"({"d": "four"})"), InvalidInputError);
  EXPECT_THROW(ParseSynthConfig(R"({"d": 1})"), InvalidInputError);
  EXPECT_THROW(ParseSynthConfig("[1]"), InvalidInputError);
  EXPECT_THROW(ParseSynthConfig("{"), InvalidInputError);
}

}  // namespace
}  // namespace dtmil
