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

#include "dtmil/dtc.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>
#include <string>
#include <utility>

#include "dtmil/errors.h"
#include "dtmil/mil_core.h"

namespace dtmil {
namespace {

void CheckSameDim(const Vector& a, const Vector& b, const char* what) {
  if (a.size() != b.size()) {
    throw InvalidInputError(std::string(what) + ": dimension " +
                            std::to_string(a.size()) + " vs " +
                            std::to_string(b.size()));
  }
}

void ClipNorm(Vector& psi, double r_max) {
  const double norm = psi.norm();
  if (norm > r_max) psi *= r_max / norm;
}

bool HasBothClasses(const Vector& labels) {
  return (labels.array() > 0).any() && (labels.array() < 0).any();
}

}  // namespace

std::vector<int> AssignMaxInstances(const Vector& codeword,
                                    const std::vector<Bag>& bags) {
  std::vector<int> assignment(bags.size());
  for (size_t i = 0; i < bags.size(); ++i) {
    assignment[i] = MaxDotProduct(codeword, bags[i]).index;
  }
  return assignment;
}

Vector BuildU(const Vector& beta, const std::vector<Bag>& bags,
              const Vector& labels, const std::vector<int>& assignment) {
  const auto n = static_cast<Eigen::Index>(bags.size());
  if (beta.size() != n || labels.size() != n ||
      static_cast<Eigen::Index>(assignment.size()) != n) {
    throw InvalidInputError("BuildU: beta, labels, assignment and bags must "
                            "have equal length");
  }
  if (n == 0) throw InvalidInputError("BuildU: no bags");
  Vector u = Vector::Zero(bags[0].dim());
  for (Eigen::Index i = 0; i < n; ++i) {
    const Bag& bag = bags[i];
    const int j = assignment[i];
    if (j < 0 || j >= bag.size()) {
      throw InvalidInputError("BuildU: assignment " + std::to_string(j) +
                              " out of range for bag '" + bag.id() + "'");
    }
    if (bag.dim() != u.size()) {
      throw InvalidInputError("BuildU: bag '" + bag.id() +
                              "' has inconsistent dimension");
    }
    u.noalias() += (beta[i] * labels[i]) * bag.instance(j);
  }
  return u;
}

double CodewordObjective(const Vector& psi, const Vector& u, double c1,
                         double c2) {
  CheckSameDim(psi, u, "codeword objective");
  const double projection = u.dot(psi);
  return 0.5 * c2 * psi.squaredNorm() - projection * projection / (2.0 * c1);
}

Vector CodewordGradient(const Vector& psi, const Vector& u, double c1,
                        double c2) {
  CheckSameDim(psi, u, "codeword gradient");
  return c2 * psi - (u.dot(psi) / c1) * u;
}

Vector UpdateCodeword(const Vector& psi_init, const std::vector<Bag>& bags,
                      const Vector& beta, const Vector& labels,
                      const Hyperparams& hyper) {
  if (psi_init.size() == 0 || psi_init.isZero(0.0)) {
    throw DegenerateError("codeword update started from the zero vector, "
                          "which is a stationary point");
  }
  Vector psi = psi_init;
  for (int t = 0; t < hyper.inner_iters; ++t) {
    const std::vector<int> assignment = AssignMaxInstances(psi, bags);
    const Vector u = BuildU(beta, bags, labels, assignment);
    psi -= hyper.eta * CodewordGradient(psi, u, hyper.c1, hyper.c2);
    ClipNorm(psi, hyper.r_max);
  }
  return psi;
}

Vector RecoverW(const Vector& beta, const Vector& labels,
                const Matrix& features, double c1) {
  if (beta.size() != labels.size() || features.rows() != beta.size()) {
    throw InvalidInputError("RecoverW: beta, labels and features disagree "
                            "on n");
  }
  return features.transpose() * beta.cwiseProduct(labels) / c1;
}

Dictionary InitDictionary(const std::vector<Bag>& bags, int size,
                          std::uint64_t seed) {
  if (size < 1) throw InvalidInputError("dictionary size must be >= 1");
  if (bags.empty()) throw InvalidInputError("no bags to sample codewords from");
  const int dim = bags[0].dim();
  CheckBagDims(bags, dim);

  // Pool of nonzero instances in (bag, instance) order.
  std::vector<std::pair<int, int>> pool;
  for (size_t i = 0; i < bags.size(); ++i) {
    for (int j = 0; j < bags[i].size(); ++j) {
      if (!bags[i].instance(j).isZero(0.0)) {
        pool.emplace_back(static_cast<int>(i), j);
      }
    }
  }
  if (pool.empty()) {
    throw DegenerateError("every instance is the zero vector; cannot "
                          "initialize a dictionary");
  }

  std::mt19937_64 rng(seed);
  std::vector<std::pair<int, int>> picks;
  if (static_cast<int>(pool.size()) >= size) {
    // Partial Fisher-Yates.
    for (int k = 0; k < size; ++k) {
      std::uniform_int_distribution<size_t> pick(k, pool.size() - 1);
      std::swap(pool[k], pool[pick(rng)]);
    }
    picks.assign(pool.begin(), pool.begin() + size);
  } else {
    std::uniform_int_distribution<size_t> pick(0, pool.size() - 1);
    for (int k = 0; k < size; ++k) picks.push_back(pool[pick(rng)]);
  }

  Matrix codewords(dim, size);
  for (int k = 0; k < size; ++k) {
    const Vector x = bags[picks[k].first].instance(picks[k].second);
    codewords.col(k) = x / x.norm();
  }
  return Dictionary(std::move(codewords));
}

FitResult FitDtc(const std::vector<Bag>& target_train,
                 const SourceModel& source, const Hyperparams& hyper) {
  const auto start = std::chrono::steady_clock::now();
  hyper.Validate();
  source.Validate();
  if (target_train.empty()) {
    throw InvalidInputError("fit_dtc needs at least one training bag");
  }
  CheckBagDims(target_train, source.phi.dim());
  const Vector labels = LabelVector(target_train);
  const auto n = static_cast<Eigen::Index>(target_train.size());

  FitReport report;
  if (!HasBothClasses(labels)) {
    report.warnings.push_back("target training set contains a single class");
  }

  // Source responses do not depend on psi.
  Vector f(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    f[i] = ScoreSource(target_train[i], source);
  }

  Dictionary psi = InitDictionary(target_train, hyper.kappa, hyper.seed);
  Vector beta = Vector::Zero(n);
  AdaptedModel model{source, psi, Vector::Zero(hyper.kappa), hyper};

  for (int t = 0; t < hyper.max_outer; ++t) {
    const Matrix z = EmbedBags(target_train, psi);
    const DualProblem prob = MakeDualProblem(z, labels, f, hyper.c1);
    const double warm_value = DualValue(beta, prob);
    const DualState state = SolveBoxQp(prob, beta);
    beta = state.beta;

    model.psi = psi;
    model.w = RecoverW(beta, labels, z, hyper.c1);
    report.warm_start_dual_values.push_back(warm_value);
    report.dual_values.push_back(state.objective);
    report.primal_values.push_back(PrimalObjective(target_train, model));
    report.outer_iterations = t + 1;

    if (t > 0) {
      const double previous = report.dual_values[t - 1];
      const double change = std::abs(state.objective - previous);
      const double scale = std::max(std::abs(previous), 1e-300);
      if (change == 0.0 || change / scale < hyper.tol) {
        report.converged = true;
        break;
      }
    }

    Matrix updated(psi.dim(), psi.size());
    for (int k = 0; k < psi.size(); ++k) {
      updated.col(k) =
          UpdateCodeword(psi.codeword(k), target_train, beta, labels, hyper);
    }
    psi = Dictionary(std::move(updated));
  }

  // Final solve on the final dictionary so that w and beta share embeddings.
  const Matrix z = EmbedBags(target_train, psi);
  const DualProblem prob = MakeDualProblem(z, labels, f, hyper.c1);
  const DualState state = SolveBoxQp(prob, beta);
  beta = state.beta;
  model.psi = psi;
  model.w = RecoverW(beta, labels, z, hyper.c1);
  report.final_dual_value = state.objective;

  report.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return FitResult{std::move(model), std::move(report), std::move(beta)};
}

SourceModel TrainSource(const std::vector<Bag>& source_data, int iota,
                        double c, std::uint64_t seed) {
  if (source_data.empty()) {
    throw InvalidInputError("source training set is empty");
  }
  if (!(std::isfinite(c) && c > 0.0)) {
    throw InvalidInputError("source regularization c must be positive");
  }
  const Vector labels = LabelVector(source_data);
  if (!HasBothClasses(labels)) {
    throw InvalidInputError("source training set must contain both classes");
  }
  Dictionary phi = InitDictionary(source_data, iota, seed);
  const Matrix z = EmbedBags(source_data, phi);
  const DualProblem prob =
      MakeDualProblem(z, labels, Vector::Zero(labels.size()), c);
  const DualState state = SolveBoxQp(prob);
  Vector v = RecoverW(state.beta, labels, z, c);
  return SourceModel{std::move(phi), std::move(v)};
}

}  // namespace dtmil
