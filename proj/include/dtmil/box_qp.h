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

#ifndef DTMIL_BOX_QP_H_
#define DTMIL_BOX_QP_H_

#include <optional>
#include <vector>

#include "dtmil/types.h"

namespace dtmil {

// Dual of the adaptation problem at fixed transfer dictionary:
//
//   max_beta  sum_i beta_i r_i - 1/(2 c1) sum_ij beta_i beta_j y_i y_j K_ij
//   s.t.      0 <= beta_i <= 1/n
//
// with K the Gram matrix of the bag features and r_i = 1 - y_i f_i.
struct DualProblem {
  Matrix gram;    // n x n, symmetric PSD
  Vector margins; // r
  Vector labels;  // +1/-1
  double c1 = 1.0;

  int n() const { return static_cast<int>(margins.size()); }
  double upper() const { return 1.0 / n(); }

  // Shape, symmetry, finiteness, label and c1 checks (InvalidInputError).
  // The PSD check is separate because it needs an eigendecomposition.
  void Validate() const;
  // Throws NumericalError if the smallest eigenvalue of `gram` is below
  // -1e-8 * max(1, max_i K_ii).
  void CheckPsd() const;
};

// Builds the problem from bag features (rows of `features`), labels and the
// cached source scores f_i.
DualProblem MakeDualProblem(const Matrix& features, const Vector& labels,
                            const Vector& source_scores, double c1);

struct DualState {
  Vector beta;
  double objective = 0.0;
  int iterations = 0;  // completed sweeps
  bool converged = false;
  // Objective after each sweep, only filled when requested.
  std::vector<double> sweep_objectives;
};

struct BoxQpOptions {
  double tolerance = 1e-8;      // max |delta beta_i| within a sweep
  double kkt_tolerance = 1e-9;  // and KktResidual below this to stop
  int max_sweeps = 10000;
  bool record_sweeps = false;
  bool check_psd = true;
};

// Objective value at `beta`; throws InvalidInputError if beta leaves the box
// by more than 1e-9.
double DualValue(const Vector& beta, const DualProblem& prob);

// Exact cyclic coordinate ascent in ascending index order, with an active-set
// finish when the sweeps stall (and every 32 sweeps). Stops once a sweep moves
// no coordinate by `tolerance` or more and the point is KKT to within
// `kkt_tolerance`; `converged` is false only when max_sweeps runs out.
// `warm_start`, when given, is projected onto the box and used as the first
// iterate.
DualState SolveBoxQp(const DualProblem& prob,
                     const std::optional<Vector>& warm_start = std::nullopt,
                     const BoxQpOptions& options = {});

// Largest projected-gradient magnitude; zero exactly at a KKT point.
double KktResidual(const Vector& beta, const DualProblem& prob);

}  // namespace dtmil

#endif  // DTMIL_BOX_QP_H_
