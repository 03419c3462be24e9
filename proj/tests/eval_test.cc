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

#include "dtmil/eval.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "dtmil/dtc.h"
#include "dtmil/errors.h"
#include "dtmil/mil_core.h"
#include "dtmil/synthetic.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace dtmil {
namespace {

using ::dtmil::testing::RandomBags;

std::vector<Bag> Labeled(int positives, int negatives) {
  std::vector<Bag> bags;
  for (int i = 0; i < positives; ++i) {
    bags.push_back(MakeBag("p" + std::to_string(i), Label::kPositive, {{1.0 * i}}));
  }
  for (int i = 0; i < negatives; ++i) {
    bags.push_back(MakeBag("n" + std::to_string(i), Label::kNegative, {{-1.0 * i}}));
  }
  return bags;
}

SynthConfig SmallConfig() {
  SynthConfig config;
  config.d = 4;
  config.source_bags_per_class = 30;
  config.target_bags_per_class = 10;
  return config;
}

Hyperparams FastHyper() {
  Hyperparams hyper;
  hyper.kappa = 5;
  hyper.max_outer = 5;
  hyper.inner_iters = 10;
  return hyper;
}

TEST(SplitFoldsTest, OneBagPerFold) {
  const FoldSplit split = SplitFolds(Labeled(5, 5), 10, 0);
  for (int f = 0; f < 10; ++f) EXPECT_EQ(split.Members(f).size(), 1u);
  EXPECT_EQ(split.assignments.size(), 10u);
}

TEST(SplitFoldsTest, StratifiesTwentyBags) {
  const std::vector<Bag> bags = Labeled(10, 10);
  const FoldSplit split = SplitFolds(bags, 10, 7);
  for (int f = 0; f < 10; ++f) {
    const std::vector<int> members = split.Members(f);
    ASSERT_EQ(members.size(), 2u);
    EXPECT_NE(bags[members[0]].label(), bags[members[1]].label());
  }
}

TEST(SplitFoldsTest, DeterministicAndSeedDependent) {
  const std::vector<Bag> bags = Labeled(13, 9);
  EXPECT_EQ(SplitFolds(bags, 4, 3).fold_of, SplitFolds(bags, 4, 3).fold_of);
  bool any_differs = false;
  for (std::uint64_t seed = 4; seed < 10; ++seed) {
    any_differs |= SplitFolds(bags, 4, 3).fold_of != SplitFolds(bags, 4, seed).fold_of;
  }
  EXPECT_TRUE(any_differs);
}

TEST(SplitFoldsTest, BalancedPartitionOfAllBags) {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> count(1, 30);
  for (int trial = 0; trial < 100; ++trial) {
    const int positives = count(rng), negatives = count(rng);
    const std::vector<Bag> bags = Labeled(positives, negatives);
    const int n = positives + negatives;
    const int k = 2 + trial % std::min(9, n - 1);
    const FoldSplit split = SplitFolds(bags, k, trial);
    std::vector<int> sizes(k, 0), pos(k, 0);
    for (int i = 0; i < n; ++i) {
      ASSERT_GE(split.fold_of[i], 0);
      ASSERT_LT(split.fold_of[i], k);
      EXPECT_EQ(split.assignments.at(bags[i].id()), split.fold_of[i]);
      ++sizes[split.fold_of[i]];
      pos[split.fold_of[i]] += bags[i].label() == Label::kPositive;
    }
    const auto [lo, hi] = std::minmax_element(sizes.begin(), sizes.end());
    EXPECT_LE(*hi - *lo, 1);
    for (int f = 0; f < k; ++f) {
      EXPECT_LE(std::abs(pos[f] - static_cast<double>(positives) / k), 1.0);
      // Every bag not in fold f is in exactly one other fold.
      const std::vector<int> members = split.Members(f);
      int rest = 0;
      for (int g = 0; g < k; ++g) {
        if (g != f) rest += static_cast<int>(split.Members(g).size());
      }
      EXPECT_EQ(rest + static_cast<int>(members.size()), n);
    }
  }
}

TEST(SplitFoldsTest, RejectsBadFoldCounts) {
  EXPECT_THROW(SplitFolds(Labeled(2, 2), 5, 0), InvalidInputError);
  EXPECT_THROW(SplitFolds(Labeled(2, 2), 1, 0), InvalidInputError);
  EXPECT_NO_THROW(SplitFolds(Labeled(2, 2), 4, 0));
}

TEST(AccuracyTest, Examples) {
  const SourceModel model{MakeDictionary({{1.0}}), (Vector(1) << 1.0).finished()};
  // Scores equal the single coordinate. p0 and n0 both score zero, which
  // predicts positive.
  EXPECT_DOUBLE_EQ(Accuracy(model, Labeled(3, 1)), 0.75);
  EXPECT_DOUBLE_EQ(Accuracy(model, Labeled(1, 1)), 0.5);
  EXPECT_DOUBLE_EQ(Accuracy(model, Labeled(1, 3)), 0.75);
  std::vector<Bag> perfect = {MakeBag("a", Label::kPositive, {{2.0}}),
                              MakeBag("b", Label::kNegative, {{-2.0}})};
  EXPECT_DOUBLE_EQ(Accuracy(model, perfect), 1.0);
  EXPECT_THROW(Accuracy(model, std::vector<Bag>{}), InvalidInputError);
}

TEST(AccuracyTest, MatchesRecount) {
  std::mt19937_64 rng(2);
  const std::vector<Bag> bags = RandomBags(rng, 40, 3, 4);
  const SourceModel source = TrainSource(bags, 4, 1.0, 2);
  AdaptedModel adapted{source, InitDictionary(bags, 3, 5),
                       (Vector(3) << 0.5, -1.0, 0.25).finished(), Hyperparams{}};
  int source_correct = 0, adapted_correct = 0;
  for (const Bag& bag : bags) {
    const double y = bag.label() == Label::kPositive ? 1.0 : -1.0;
    const double f = ScoreSource(bag, source);
    const double g = ScoreTarget(bag, adapted);
    source_correct += (f >= 0 ? 1.0 : -1.0) == y;
    adapted_correct += (g >= 0 ? 1.0 : -1.0) == y;
  }
  EXPECT_DOUBLE_EQ(Accuracy(source, bags), source_correct / 40.0);
  EXPECT_DOUBLE_EQ(Accuracy(adapted, bags), adapted_correct / 40.0);
}

TEST(FoldSeedTest, DistinctAcrossFolds) {
  std::set<std::uint64_t> seeds;
  for (int f = 0; f < 50; ++f) seeds.insert(FoldSeed(9, f));
  EXPECT_EQ(seeds.size(), 50u);
  EXPECT_EQ(FoldSeed(9, 3), FoldSeed(9, 3));
}

class ProtocolTest : public ::testing::Test {
 protected:
  ProtocolTest()
      : data_(GenerateSynthetic(SmallConfig(), 3)),
        source_(TrainSource(data_.source, 6, 1.0, 3)) {}
  SynthData data_;
  SourceModel source_;
};

TEST_F(ProtocolTest, MeanIsArithmeticMeanOfFolds) {
  const ProtocolReport report = RunProtocol(data_.target, FastHyper(), 5, source_);
  ASSERT_EQ(report.per_fold_accuracy.size(), 5u);
  ASSERT_EQ(report.per_fold_seconds.size(), 5u);
  double sum = 0.0;
  for (double a : report.per_fold_accuracy) {
    EXPECT_GE(a, 0.0);
    EXPECT_LE(a, 1.0);
    sum += a;
  }
  EXPECT_NEAR(report.mean_accuracy, sum / 5, 1e-12);
  for (const char* name : {kSourceOnly, kTargetOnly}) {
    const std::vector<double>& folds = report.baseline_per_fold.at(name);
    ASSERT_EQ(folds.size(), 5u);
    double total = 0.0;
    for (double a : folds) total += a;
    EXPECT_NEAR(report.baseline_accuracies.at(name), total / 5, 1e-12);
  }
}

TEST_F(ProtocolTest, FoldMatchesDirectFit) {
  const Hyperparams hyper = FastHyper();
  const ProtocolReport report = RunProtocol(data_.target, hyper, 4, source_);
  const FoldSplit split = SplitFolds(data_.target, 4, hyper.seed);
  for (int f = 0; f < 4; ++f) {
    std::vector<Bag> train, test;
    for (size_t i = 0; i < data_.target.size(); ++i) {
      (split.fold_of[i] == f ? train : test).push_back(data_.target[i]);
    }
    Hyperparams fold_hyper = hyper;
    fold_hyper.seed = FoldSeed(hyper.seed, f);
    const FitResult fit = FitDtc(train, source_, fold_hyper);
    EXPECT_EQ(report.per_fold_accuracy[f], Accuracy(fit.model, test));
    EXPECT_EQ(report.baseline_per_fold.at(kSourceOnly)[f], Accuracy(source_, test));
  }
}

TEST_F(ProtocolTest, LeaveOneOutFoldCount) {
  std::vector<Bag> target(data_.target.begin(), data_.target.begin() + 8);
  const ProtocolReport report = RunProtocol(target, FastHyper(), 8, source_);
  EXPECT_EQ(report.per_fold_accuracy.size(), 8u);
  ProtocolOptions conventional;
  conventional.conventional = true;
  const ProtocolReport loo =
      RunProtocol(target, FastHyper(), 8, source_, conventional);
  for (double a : loo.per_fold_accuracy) EXPECT_TRUE(a == 0.0 || a == 1.0);
}

TEST_F(ProtocolTest, DeterministicAcrossRunsAndThreads) {
  const ProtocolReport a = RunProtocol(data_.target, FastHyper(), 5, source_);
  const ProtocolReport b = RunProtocol(data_.target, FastHyper(), 5, source_);
  ProtocolOptions threaded;
  threaded.threads = 4;
  const ProtocolReport c =
      RunProtocol(data_.target, FastHyper(), 5, source_, threaded);
  EXPECT_EQ(ReportToJson(a, false), ReportToJson(b, false));
  EXPECT_EQ(ReportToJson(a, false), ReportToJson(c, false));
  EXPECT_EQ(ReportToJson(a, true).find("per_fold_seconds") == std::string::npos,
            false);
  EXPECT_EQ(ReportToJson(a, false).find("per_fold_seconds"), std::string::npos);
}

TEST_F(ProtocolTest, RejectsBadInput) {
  EXPECT_THROW(RunProtocol(data_.target, FastHyper(), 100, source_),
               InvalidInputError);
  Hyperparams bad = FastHyper();
  bad.c2 = -1.0;
  EXPECT_THROW(RunProtocol(data_.target, bad, 5, source_), InvalidInputError);
}

TEST_F(ProtocolTest, SingleCellSweepEqualsProtocol) {
  const Hyperparams hyper = FastHyper();
  const std::uint64_t seed = 11;
  const std::vector<SweepRow> rows = Sweep(
      data_.source, data_.target, hyper, {hyper.c1}, {hyper.c2}, 5, seed, {6, 1.0});
  Hyperparams seeded = hyper;
  seeded.seed = seed;
  const SourceModel source = TrainSource(data_.source, 6, 1.0, seed);
  const ProtocolReport report = RunProtocol(data_.target, seeded, 5, source);
  ASSERT_EQ(rows.size(), 5u);
  for (int f = 0; f < 5; ++f) {
    EXPECT_EQ(rows[f].fold, f);
    EXPECT_EQ(rows[f].c1, hyper.c1);
    EXPECT_EQ(rows[f].c2, hyper.c2);
    EXPECT_EQ(rows[f].accuracy, report.per_fold_accuracy[f]);
  }
}

TEST_F(ProtocolTest, SweepGridShapeAndCsv) {
  const std::vector<SweepRow> rows =
      Sweep(data_.source, data_.target, FastHyper(), {0.5, 2.0}, {0.1, 1.0, 3.0},
            4, 1, {6, 1.0});
  ASSERT_EQ(rows.size(), 2u * 3u * 4u);
  const std::string csv = SweepToCsv(rows);
  std::istringstream lines(csv);
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line, "c1,c2,fold,accuracy,seconds");
  int count = 0;
  while (std::getline(lines, line)) {
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 4) << line;
    EXPECT_EQ(line.find('\r'), std::string::npos);
    ++count;
  }
  EXPECT_EQ(count, 24);
  EXPECT_EQ(csv.back(), '\n');
  EXPECT_EQ(csv.rfind("2,3,3,", csv.size() - 2) != std::string::npos, true);
  EXPECT_THROW(Sweep(data_.source, data_.target, FastHyper(), {}, {1.0}, 4, 1),
               InvalidInputError);
  EXPECT_THROW(Sweep(data_.source, data_.target, FastHyper(), {0.0}, {1.0}, 4, 1),
               InvalidInputError);
}

TEST(CsvTest, FieldQuoting) {
  EXPECT_EQ(CsvField("plain"), "plain");
  EXPECT_EQ(CsvField("a,b"), "\"a,b\"");
  EXPECT_EQ(CsvField("say \"hi\""), "\"say \"\"hi\"\"\"");
  EXPECT_EQ(CsvField("two\nlines"), "\"two\nlines\"");
  EXPECT_EQ(CsvField(""), "");
}

TEST(CsvTest, FormatDoubleRoundTrips) {
  EXPECT_EQ(FormatDouble(0.1), "0.1");
  EXPECT_EQ(FormatDouble(10.0), "10");
  EXPECT_EQ(FormatDouble(0.75), "0.75");
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> value(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    const double x = value(rng) / (1 + i);
    EXPECT_EQ(std::stod(FormatDouble(x)), x);
  }
}

TEST(NullShiftTest, AdaptationMatchesSourceWithoutShift) {
  SynthConfig config = SmallConfig();
  config.shift_rotation_degrees = 0.0;
  config.shift_translation = 0.0;
  config.noise_sigma = 0.0;
  config.target_bags_per_class = 20;
  double dtc = 0.0, source_only = 0.0;
  const int seeds = 3;
  for (int seed = 0; seed < seeds; ++seed) {
    const SynthData data = GenerateSynthetic(config, seed);
    const SourceModel source = TrainSource(data.source, 20, 1.0, seed);
    Hyperparams hyper;
    hyper.seed = seed;
    const ProtocolReport report = RunProtocol(data.target, hyper, 10, source);
    dtc += report.mean_accuracy;
    source_only += report.baseline_accuracies.at(kSourceOnly);
  }
  EXPECT_LE(std::abs(dtc - source_only) / seeds, 0.05);
}

}  // namespace
}  // namespace dtmil
