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
#include <charconv>
#include <chrono>
#include <numeric>
#include <random>
#include <string>
#include <thread>
#include <utility>

#include "dtmil/dtc.h"
#include "dtmil/errors.h"
#include "dtmil/mil_core.h"
#include "json.hpp"

namespace dtmil {
namespace {

template <typename Scorer>
double CountAccuracy(const std::vector<Bag>& bags, Scorer score) {
  if (bags.empty()) throw InvalidInputError("accuracy of an empty bag list");
  size_t correct = 0;
  for (const Bag& bag : bags) {
    if (Predict(score(bag)) == bag.RequireLabel()) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(bags.size());
}

double Mean(const std::vector<double>& values) {
  return std::accumulate(values.begin(), values.end(), 0.0) /
         static_cast<double>(values.size());
}

std::vector<Bag> Select(const std::vector<Bag>& bags,
                        const std::vector<int>& positions) {
  std::vector<Bag> out;
  out.reserve(positions.size());
  for (int p : positions) out.push_back(bags[p]);
  return out;
}

struct FoldResult {
  double accuracy = 0.0;
  double source_only = 0.0;
  double target_only = 0.0;
  double seconds = 0.0;
};

// Target-only baseline. A single-class training part cannot train a
// classifier; predict its class for every test bag instead.
double TargetOnlyAccuracy(const std::vector<Bag>& train,
                          const std::vector<Bag>& test,
                          const ProtocolOptions& options, std::uint64_t seed) {
  const Vector labels = LabelVector(train);
  const bool both = (labels.array() > 0).any() && (labels.array() < 0).any();
  if (!both) {
    const double constant = labels[0];
    return CountAccuracy(test, [constant](const Bag&) { return constant; });
  }
  const SourceModel model =
      TrainSource(train, options.target_only_words, options.target_only_c, seed);
  return Accuracy(model, test);
}

FoldResult RunFold(const std::vector<Bag>& target, const FoldSplit& split,
                   int fold, const Hyperparams& hyper,
                   const SourceModel& source_model,
                   const ProtocolOptions& options) {
  std::vector<int> train_pos;
  std::vector<int> test_pos;
  for (int i = 0; i < static_cast<int>(target.size()); ++i) {
    const bool in_fold = split.fold_of[i] == fold;
    (in_fold != options.conventional ? train_pos : test_pos).push_back(i);
  }
  const std::vector<Bag> train = Select(target, train_pos);
  const std::vector<Bag> test = Select(target, test_pos);

  Hyperparams fold_hyper = hyper;
  fold_hyper.seed = FoldSeed(hyper.seed, fold);

  FoldResult result;
  const auto start = std::chrono::steady_clock::now();
  const FitResult fit = FitDtc(train, source_model, fold_hyper);
  result.accuracy = Accuracy(fit.model, test);
  result.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  result.source_only = Accuracy(source_model, test);
  result.target_only =
      TargetOnlyAccuracy(train, test, options, fold_hyper.seed);
  return result;
}

}  // namespace

std::vector<int> FoldSplit::Members(int f) const {
  std::vector<int> members;
  for (int i = 0; i < static_cast<int>(fold_of.size()); ++i) {
    if (fold_of[i] == f) members.push_back(i);
  }
  return members;
}

FoldSplit SplitFolds(const std::vector<Bag>& bags, int k, std::uint64_t seed) {
  if (k < 2) throw InvalidInputError("fold count must be >= 2");
  if (static_cast<int>(bags.size()) < k) {
    throw InvalidInputError("cannot split " + std::to_string(bags.size()) +
                            " bags into " + std::to_string(k) + " folds");
  }
  std::vector<int> positives;
  std::vector<int> negatives;
  for (int i = 0; i < static_cast<int>(bags.size()); ++i) {
    (bags[i].RequireLabel() == Label::kPositive ? positives : negatives)
        .push_back(i);
  }
  std::mt19937_64 rng(seed);
  auto shuffle = [&rng](std::vector<int>& v) {
    for (int i = static_cast<int>(v.size()) - 1; i > 0; --i) {
      std::uniform_int_distribution<int> pick(0, i);
      std::swap(v[i], v[pick(rng)]);
    }
  };
  shuffle(positives);
  shuffle(negatives);

  FoldSplit split;
  split.k = k;
  split.seed = seed;
  split.fold_of.assign(bags.size(), -1);
  int deal = 0;
  for (const std::vector<int>* group : {&positives, &negatives}) {
    for (int i : *group) {
      split.fold_of[i] = deal % k;
      split.assignments[bags[i].id()] = deal % k;
      ++deal;
    }
  }
  return split;
}

double Accuracy(const SourceModel& model, const std::vector<Bag>& bags) {
  return CountAccuracy(bags,
                       [&model](const Bag& b) { return ScoreSource(b, model); });
}

double Accuracy(const AdaptedModel& model, const std::vector<Bag>& bags) {
  return CountAccuracy(bags,
                       [&model](const Bag& b) { return ScoreTarget(b, model); });
}

std::uint64_t FoldSeed(std::uint64_t seed, int fold) {
  // splitmix64 finalizer over (seed, fold).
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL *
                               (static_cast<std::uint64_t>(fold) + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

ProtocolReport RunProtocol(const std::vector<Bag>& target,
                           const Hyperparams& hyper, int k,
                           const SourceModel& source_model,
                           const ProtocolOptions& options) {
  hyper.Validate();
  source_model.Validate();
  if (options.threads < 1) throw InvalidInputError("threads must be >= 1");
  const FoldSplit split = SplitFolds(target, k, hyper.seed);

  std::vector<FoldResult> results(k);
  if (options.threads == 1) {
    for (int f = 0; f < k; ++f) {
      results[f] = RunFold(target, split, f, hyper, source_model, options);
    }
  } else {
    std::vector<std::exception_ptr> errors(k);
    std::vector<std::thread> workers;
    const int count = std::min(options.threads, k);
    for (int t = 0; t < count; ++t) {
      workers.emplace_back([&, t] {
        for (int f = t; f < k; f += count) {
          try {
            results[f] = RunFold(target, split, f, hyper, source_model, options);
          } catch (...) {
            errors[f] = std::current_exception();
          }
        }
      });
    }
    for (std::thread& w : workers) w.join();
    for (const std::exception_ptr& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  ProtocolReport report;
  report.k = k;
  report.conventional = options.conventional;
  report.hyper = hyper;
  std::vector<double> source_only;
  std::vector<double> target_only;
  for (const FoldResult& r : results) {
    report.per_fold_accuracy.push_back(r.accuracy);
    report.per_fold_seconds.push_back(r.seconds);
    source_only.push_back(r.source_only);
    target_only.push_back(r.target_only);
  }
  report.mean_accuracy = Mean(report.per_fold_accuracy);
  report.baseline_accuracies[kSourceOnly] = Mean(source_only);
  report.baseline_accuracies[kTargetOnly] = Mean(target_only);
  report.baseline_per_fold[kSourceOnly] = std::move(source_only);
  report.baseline_per_fold[kTargetOnly] = std::move(target_only);
  return report;
}

std::string ReportToJson(const ProtocolReport& report, bool include_timing) {
  nlohmann::ordered_json out;
  out["k"] = report.k;
  out["protocol"] = report.conventional ? "conventional" : "inverted";
  out["mean_accuracy"] = report.mean_accuracy;
  out["per_fold_accuracy"] = report.per_fold_accuracy;
  out["baseline_accuracies"] = report.baseline_accuracies;
  out["baseline_per_fold"] = report.baseline_per_fold;
  if (include_timing) out["per_fold_seconds"] = report.per_fold_seconds;
  nlohmann::ordered_json hyper;
  hyper["c1"] = report.hyper.c1;
  hyper["c2"] = report.hyper.c2;
  hyper["kappa"] = report.hyper.kappa;
  hyper["eta"] = report.hyper.eta;
  hyper["inner_iters"] = report.hyper.inner_iters;
  hyper["max_outer"] = report.hyper.max_outer;
  hyper["tol"] = report.hyper.tol;
  hyper["r_max"] = report.hyper.r_max;
  hyper["seed"] = report.hyper.seed;
  out["hyper"] = hyper;
  return out.dump(2) + "\n";
}

std::vector<SweepRow> Sweep(const std::vector<Bag>& source,
                            const std::vector<Bag>& target,
                            const Hyperparams& base_hyper,
                            const std::vector<double>& c1_grid,
                            const std::vector<double>& c2_grid, int k,
                            std::uint64_t seed,
                            const SourceTrainingOptions& source_options,
                            const ProtocolOptions& options) {
  if (c1_grid.empty() || c2_grid.empty()) {
    throw InvalidInputError("sweep grids must be nonempty");
  }
  Hyperparams hyper = base_hyper;
  hyper.seed = seed;
  for (double c1 : c1_grid) {
    hyper.c1 = c1;
    for (double c2 : c2_grid) {
      hyper.c2 = c2;
      hyper.Validate();
    }
  }
  const SourceModel source_model =
      TrainSource(source, source_options.words, source_options.c, seed);

  std::vector<SweepRow> rows;
  for (double c1 : c1_grid) {
    for (double c2 : c2_grid) {
      hyper.c1 = c1;
      hyper.c2 = c2;
      const ProtocolReport report =
          RunProtocol(target, hyper, k, source_model, options);
      for (int f = 0; f < k; ++f) {
        rows.push_back({c1, c2, f, report.per_fold_accuracy[f],
                        report.per_fold_seconds[f]});
      }
    }
  }
  return rows;
}

std::string FormatDouble(double value) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

std::string CsvField(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string quoted = "\"";
  for (char c : field) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

std::string SweepToCsv(const std::vector<SweepRow>& rows) {
  std::string out = "c1,c2,fold,accuracy,seconds\n";
  for (const SweepRow& row : rows) {
    out += CsvField(FormatDouble(row.c1)) + ',' +
           CsvField(FormatDouble(row.c2)) + ',' + std::to_string(row.fold) +
           ',' + CsvField(FormatDouble(row.accuracy)) + ',' +
           CsvField(FormatDouble(row.seconds)) + '\n';
  }
  return out;
}

}  // namespace dtmil
