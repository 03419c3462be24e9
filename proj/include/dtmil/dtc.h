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

#ifndef DTMIL_DTC_H_
#define DTMIL_DTC_H_

#include <cstdint>
#include <string>
#include <vector>

#include "dtmil/box_qp.h"
#include "dtmil/types.h"

namespace dtmil {

// For each bag, index of the instance maximizing <codeword, x>; ties go to
// the lowest index.
std::vector<int> AssignMaxInstances(const Vector& codeword,
                                    const std::vector<Bag>& bags);

// u = sum_i beta_i y_i x^i_{assignment_i}. The codeword objective's
// quadratic term is (u . psi)^2, i.e. the assigned-instance outer products
// collapse to the rank-one matrix u u^T.
Vector BuildU(const Vector& beta, const std::vector<Bag>& bags,
              const Vector& labels, const std::vector<int>& assignment);

// h(psi) = (c2/2)||psi||^2 - (1/(2 c1)) (u . psi)^2
double CodewordObjective(const Vector& psi, const Vector& u, double c1,
                         double c2);

// grad h(psi) = c2 psi - (1/c1) u (u . psi)
Vector CodewordGradient(const Vector& psi, const Vector& u, double c1,
                        double c2);

// Runs hyper.inner_iters steps of: reassign max instances, rebuild u,
// psi <- psi - eta * grad h(psi), clip ||psi|| to hyper.r_max.
// A zero starting codeword is a stationary point of h and is rejected with
// DegenerateError.
Vector UpdateCodeword(const Vector& psi_init, const std::vector<Bag>& bags,
                      const Vector& beta, const Vector& labels,
                      const Hyperparams& hyper);

// w = (1/c1) sum_i beta_i y_i z_i, with z_i the rows of `features`.
Vector RecoverW(const Vector& beta, const Vector& labels,
                const Matrix& features, double c1);

// `size` pooled instances, unit-normalized, drawn without replacement (with
// replacement when the pool of nonzero instances is smaller than `size`).
// Zero instances are never drawn; a pool with no nonzero instance is a
// DegenerateError. Deterministic in `seed`.
Dictionary InitDictionary(const std::vector<Bag>& bags, int size,
                          std::uint64_t seed);

struct FitReport {
  int outer_iterations = 0;
  // Per outer iteration: dual value of the solved beta, dual value of the
  // warm-start beta under the same embeddings, and primal objective of
  // (psi_t, w(beta_t)).
  std::vector<double> dual_values;
  std::vector<double> warm_start_dual_values;
  std::vector<double> primal_values;
  // Dual value of the final solve on the final dictionary.
  double final_dual_value = 0.0;
  bool converged = false;
  double wall_time_seconds = 0.0;
  std::vector<std::string> warnings;
};

struct FitResult {
  AdaptedModel model;
  FitReport report;
  Vector beta;  // duals from which model.w was recovered
};

// Alternates box-QP solves for beta with per-codeword descent on psi until
// the relative change of the dual value drops below hyper.tol or
// hyper.max_outer iterations ran. w is recovered from a final solve on the
// final dictionary's embeddings.
FitResult FitDtc(const std::vector<Bag>& target_train,
                 const SourceModel& source, const Hyperparams& hyper);

// Source classifier: phi from InitDictionary, v from the box QP with f = 0
// and regularization weight `c`. Needs both classes present.
SourceModel TrainSource(const std::vector<Bag>& source_data, int iota,
                        double c, std::uint64_t seed);

}  // namespace dtmil

#endif  // DTMIL_DTC_H_
