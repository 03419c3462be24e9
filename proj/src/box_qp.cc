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

#include "dtmil/box_qp.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "dtmil/errors.h"

namespace dtmil {
namespace {

constexpr double kBoxSlack = 1e-9;
constexpr double kPsdTolerance = 1e-8;
constexpr int kFinishEvery = 32;

void CheckBox(const Vector& beta, const DualProblem& prob) {
  if (beta.size() != prob.n()) {
    throw InvalidInputError("beta has length " + std::to_string(beta.size()) +
                            ", expected " + std::to_string(prob.n()));
  }
  const double upper = prob.upper();
  for (int i = 0; i < beta.size(); ++i) {
    if (!(beta[i] >= -kBoxSlack && beta[i] <= upper + kBoxSlack)) {
      throw InvalidInputError("beta[" + std::to_string(i) + "] = " +
                              std::to_string(beta[i]) + " is outside [0, " +
                              std::to_string(upper) + "]");
    }
  }
}

// Q = (y y^T o K) / c1, the negated Hessian.
Matrix SignedGram(const DualProblem& prob) {
  return (prob.labels.asDiagonal() * prob.gram * prob.labels.asDiagonal()) /
         prob.c1;
}

double ProjectedGradient(const Vector& beta, const Vector& gradient,
                         double upper) {
  double residual = 0.0;
  for (Eigen::Index i = 0; i < beta.size(); ++i) {
    double projected;
    if (beta[i] <= 0.0) {
      projected = std::max(0.0, gradient[i]);
    } else if (beta[i] >= upper) {
      projected = std::max(0.0, -gradient[i]);
    } else {
      projected = std::abs(gradient[i]);
    }
    residual = std::max(residual, projected);
  }
  return residual;
}

// Objective r^T beta - beta^T Q beta / 2.
double Objective(const Vector& beta, const Vector& margins, const Matrix& q) {
  return beta.dot(margins) - 0.5 * beta.dot(q * beta);
}

// Primal active-set finish. Coordinates at a bound form the working set; the
// rest move along the Newton direction of the reduced quadratic or, when the
// reduced gradient has a component in the null space of Q_FF, along that
// component (the objective is linear there). A step cut short by the box adds
// the blocking coordinate to the working set; at a reduced optimum the bound
// coordinate with the largest wrong-signed gradient is released. Cyclic sweeps
// alone crawl on rank-deficient, badly scaled problems. Every accepted step
// increases the objective. Returns true at a point with projected gradient
// below `tolerance`.
bool ActiveSetFinish(const Matrix& q, const Vector& margins, double upper,
                     double tolerance, int max_steps, Vector& beta,
                     Vector& gradient) {
  const Eigen::Index n = beta.size();
  std::vector<bool> free(n);
  for (Eigen::Index i = 0; i < n; ++i) free[i] = beta[i] > 0.0 && beta[i] < upper;
  bool reduced_optimal = false;
  for (int step_count = 0; step_count < max_steps; ++step_count) {
    gradient = margins - q * beta;
    if (ProjectedGradient(beta, gradient, upper) < tolerance) return true;

    std::vector<Eigen::Index> idx;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (free[i]) idx.push_back(i);
    }
    const Eigen::Index m = static_cast<Eigen::Index>(idx.size());
    Vector g_f(m);
    for (Eigen::Index a = 0; a < m; ++a) g_f[a] = gradient[idx[a]];

    if (m == 0 || reduced_optimal ||
        (m > 0 && g_f.cwiseAbs().maxCoeff() < tolerance)) {
      // Release the worst bound violator.
      Eigen::Index worst = -1;
      double worst_value = tolerance;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (free[i]) continue;
        const double wrong = beta[i] <= 0.0 ? gradient[i] : -gradient[i];
        if (wrong >= worst_value) {
          worst_value = wrong;
          worst = i;
        }
      }
      if (worst < 0) return false;  // free part not yet stationary
      free[worst] = true;
      reduced_optimal = false;
      continue;
    }

    Matrix q_ff(m, m);
    for (Eigen::Index a = 0; a < m; ++a) {
      for (Eigen::Index b = 0; b < m; ++b) q_ff(a, b) = q(idx[a], idx[b]);
    }
    const Eigen::CompleteOrthogonalDecomposition<Matrix> cod(q_ff);
    Vector direction = cod.solve(g_f);
    const Vector null_part = g_f - q_ff * direction;
    if (null_part.norm() > 1e-10 * (1.0 + g_f.norm())) direction = null_part;

    const double slope = g_f.dot(direction);
    if (!(slope > 0.0)) return false;
    const double curvature = direction.dot(q_ff * direction);
    double step = curvature > 0.0 ? slope / curvature
                                  : std::numeric_limits<double>::infinity();
    bool full = std::isfinite(step);
    Eigen::Index blocking = -1;
    for (Eigen::Index a = 0; a < m; ++a) {
      const double x = beta[idx[a]];
      double room = std::numeric_limits<double>::infinity();
      if (direction[a] > 0.0) room = (upper - x) / direction[a];
      if (direction[a] < 0.0) room = -x / direction[a];
      if (room < step) {
        step = room;
        blocking = a;
        full = false;
      }
    }
    if (!std::isfinite(step) || step <= 0.0) return false;

    Vector candidate = beta;
    for (Eigen::Index a = 0; a < m; ++a) {
      candidate[idx[a]] =
          std::clamp(beta[idx[a]] + step * direction[a], 0.0, upper);
    }
    if (blocking >= 0) {
      candidate[idx[blocking]] = direction[blocking] > 0.0 ? upper : 0.0;
      free[idx[blocking]] = false;
    }
    if (Objective(candidate, margins, q) < Objective(beta, margins, q)) {
      return false;
    }
    beta = candidate;
    reduced_optimal = full;
  }
  gradient = margins - q * beta;
  return ProjectedGradient(beta, gradient, upper) < tolerance;
}

}  // namespace

void DualProblem::Validate() const {
  const Eigen::Index size = margins.size();
  if (size < 1) throw InvalidInputError("dual problem needs n >= 1");
  if (gram.rows() != size || gram.cols() != size) {
    throw InvalidInputError("gram matrix is " + std::to_string(gram.rows()) +
                            "x" + std::to_string(gram.cols()) +
                            ", expected " + std::to_string(size) + "x" +
                            std::to_string(size));
  }
  if (labels.size() != size) {
    throw InvalidInputError("labels have length " +
                            std::to_string(labels.size()) + ", expected " +
                            std::to_string(size));
  }
  if (!(std::isfinite(c1) && c1 > 0.0)) {
    throw InvalidInputError("c1 must be positive and finite");
  }
  if (!gram.allFinite() || !margins.allFinite()) {
    throw InvalidInputError("dual problem has non-finite entries");
  }
  for (Eigen::Index i = 0; i < size; ++i) {
    if (labels[i] != 1.0 && labels[i] != -1.0) {
      throw InvalidInputError("labels must be +1/-1");
    }
  }
  const double scale = std::max(1.0, gram.cwiseAbs().maxCoeff());
  if ((gram - gram.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw InvalidInputError("gram matrix is not symmetric");
  }
}

void DualProblem::CheckPsd() const {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(gram, Eigen::EigenvaluesOnly);
  const double min_eig = solver.eigenvalues().minCoeff();
  const double scale = std::max(1.0, gram.diagonal().maxCoeff());
  if (min_eig < -kPsdTolerance * scale) {
    throw NumericalError("gram matrix is not positive semidefinite "
                         "(smallest eigenvalue " +
                         std::to_string(min_eig) + ")");
  }
}

DualProblem MakeDualProblem(const Matrix& features, const Vector& labels,
                            const Vector& source_scores, double c1) {
  if (features.rows() != labels.size() ||
      source_scores.size() != labels.size()) {
    throw InvalidInputError("features, labels and source scores disagree on n");
  }
  DualProblem prob;
  prob.gram = features * features.transpose();
  // Symmetrize exactly; the product is symmetric only up to rounding.
  prob.gram = 0.5 * (prob.gram + prob.gram.transpose()).eval();
  prob.margins = Vector::Ones(labels.size()) -
                 labels.cwiseProduct(source_scores);
  prob.labels = labels;
  prob.c1 = c1;
  return prob;
}

double DualValue(const Vector& beta, const DualProblem& prob) {
  prob.Validate();
  CheckBox(beta, prob);
  const Vector yb = prob.labels.cwiseProduct(beta);
  return beta.dot(prob.margins) - yb.dot(prob.gram * yb) / (2.0 * prob.c1);
}

DualState SolveBoxQp(const DualProblem& prob,
                     const std::optional<Vector>& warm_start,
                     const BoxQpOptions& options) {
  prob.Validate();
  if (options.check_psd) prob.CheckPsd();

  const int n = prob.n();
  const double upper = prob.upper();
  const Matrix q = SignedGram(prob);

  DualState state;
  state.beta = Vector::Zero(n);
  if (warm_start) {
    if (warm_start->size() != n) {
      throw InvalidInputError("warm start has length " +
                              std::to_string(warm_start->size()) +
                              ", expected " + std::to_string(n));
    }
    state.beta = warm_start->cwiseMax(0.0).cwiseMin(upper);
  }

  // gradient_i = r_i - (Q beta)_i, kept in sync with every coordinate move.
  Vector gradient = prob.margins - q * state.beta;

  for (int sweep = 0; sweep < options.max_sweeps; ++sweep) {
    double max_change = 0.0;
    for (int i = 0; i < n; ++i) {
      const double old = state.beta[i];
      double updated;
      if (q(i, i) > 0.0) {
        updated = std::clamp(old + gradient[i] / q(i, i), 0.0, upper);
      } else {
        // Linear in beta_i: jump to whichever bound the slope favours.
        updated = gradient[i] > 0.0 ? upper : 0.0;
      }
      const double delta = updated - old;
      if (delta != 0.0) {
        state.beta[i] = updated;
        gradient.noalias() -= delta * q.col(i);
        max_change = std::max(max_change, std::abs(delta));
      }
    }
    state.iterations = sweep + 1;
    if (options.record_sweeps) {
      state.sweep_objectives.push_back(DualValue(state.beta, prob));
    }
    if (max_change < options.tolerance || (sweep + 1) % kFinishEvery == 0) {
      // Small steps alone do not bound the gradient when q_ii is large, so
      // stopping also requires a near-KKT point.
      gradient = prob.margins - q * state.beta;
      if (max_change < options.tolerance &&
          ProjectedGradient(state.beta, gradient, upper) <
              options.kkt_tolerance) {
        state.converged = true;
        break;
      }
      const bool done = ActiveSetFinish(q, prob.margins, upper,
                                        options.kkt_tolerance, 4 * n + 16,
                                        state.beta, gradient);
      if (options.record_sweeps) {
        state.sweep_objectives.back() = DualValue(state.beta, prob);
      }
      if (done) {
        state.converged = true;
        break;
      }
    }
  }
  state.objective = DualValue(state.beta, prob);
  return state;
}

double KktResidual(const Vector& beta, const DualProblem& prob) {
  prob.Validate();
  CheckBox(beta, prob);
  return ProjectedGradient(beta, prob.margins - SignedGram(prob) * beta,
                           prob.upper());
}

}  // namespace dtmil
