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

#ifndef DTMIL_EVAL_H_
#define DTMIL_EVAL_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dtmil/types.h"

namespace dtmil {

struct FoldSplit {
  int k = 0;
  std::uint64_t seed = 0;
  std::vector<int> fold_of;              // by bag position
  std::map<std::string, int> assignments;  // bag id -> fold

  // Positions of the bags in fold `f`, ascending.
  std::vector<int> Members(int f) const;
};

// Label-stratified split: each class is shuffled and dealt round-robin, the
// deal continuing across classes, so fold sizes differ by at most one and
// per-fold class counts are within one of n_c / k.
FoldSplit SplitFolds(const std::vector<Bag>& bags, int k, std::uint64_t seed);

double Accuracy(const SourceModel& model, const std::vector<Bag>& bags);
double Accuracy(const AdaptedModel& model, const std::vector<Bag>& bags);

// Per-fold seed for fit and baseline randomness.
std::uint64_t FoldSeed(std::uint64_t seed, int fold);

struct ProtocolOptions {
  // Train on k-1 folds and test on one instead of the default one/k-1.
  bool conventional = false;
  // Target-only baseline: TrainSource on the training fold alone.
  int target_only_words = 20;
  double target_only_c = 1.0;
  // Fold-level worker threads. Results do not depend on this.
  int threads = 1;
};

inline constexpr char kSourceOnly[] = "source-only";
inline constexpr char kTargetOnly[] = "target-only";

struct ProtocolReport {
  int k = 0;
  bool conventional = false;
  std::vector<double> per_fold_accuracy;
  double mean_accuracy = 0.0;
  std::vector<double> per_fold_seconds;
  std::map<std::string, double> baseline_accuracies;  // fold means
  std::map<std::string, std::vector<double>> baseline_per_fold;
  Hyperparams hyper;
};

// Fold f: FitDtc on the training part (fold f alone by default), accuracy on
// the rest. hyper.seed drives the split; each fold fit uses
// FoldSeed(hyper.seed, f).
ProtocolReport RunProtocol(const std::vector<Bag>& target,
                           const Hyperparams& hyper, int k,
                           const SourceModel& source_model,
                           const ProtocolOptions& options = {});

// Deterministic JSON rendering; per-fold timings only when asked since they
// vary between runs.
std::string ReportToJson(const ProtocolReport& report, bool include_timing);

struct SourceTrainingOptions {
  int words = 20;
  double c = 1.0;
};

struct SweepRow {
  double c1;
  double c2;
  int fold;
  double accuracy;
  double seconds;
};

// Trains one source model on `source` (seeded with `seed`), then runs the
// protocol for every (c1, c2) pair with hyper.seed = seed.
std::vector<SweepRow> Sweep(const std::vector<Bag>& source,
                            const std::vector<Bag>& target,
                            const Hyperparams& base_hyper,
                            const std::vector<double>& c1_grid,
                            const std::vector<double>& c2_grid, int k,
                            std::uint64_t seed,
                            const SourceTrainingOptions& source_options = {},
                            const ProtocolOptions& options = {});

// Header `c1,c2,fold,accuracy,seconds`, LF line endings.
std::string SweepToCsv(const std::vector<SweepRow>& rows);

// RFC-4180 field quoting.
std::string CsvField(const std::string& field);

// Shortest decimal string that parses back to the same double.
std::string FormatDouble(double value);

}  // namespace dtmil

#endif  // DTMIL_EVAL_H_
