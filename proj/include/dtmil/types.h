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

#ifndef DTMIL_TYPES_H_
#define DTMIL_TYPES_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace dtmil {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Binary bag label. The numeric values are the +1/-1 used in margins.
enum class Label : int { kNegative = -1, kPositive = 1 };

inline double Sign(Label label) { return static_cast<double>(label); }

// Converts +1/-1 to a Label; anything else is an InvalidInputError.
Label LabelFromInt(int value);

// A labeled collection of d-dimensional instances. Instances are stored as
// the columns of a d x m matrix. Construction validates m >= 1, d >= 1 and
// that every entry is finite; the object is immutable afterwards.
class Bag {
 public:
  Bag(std::string id, std::optional<Label> label, Matrix instances);

  const std::string& id() const { return id_; }
  const std::optional<Label>& label() const { return label_; }
  const Matrix& instances() const { return instances_; }

  int size() const { return static_cast<int>(instances_.cols()); }
  int dim() const { return static_cast<int>(instances_.rows()); }
  Eigen::Ref<const Vector> instance(int j) const { return instances_.col(j); }

  // Returns the label or throws InvalidInputError for unlabeled bags.
  Label RequireLabel() const;

 private:
  std::string id_;
  std::optional<Label> label_;
  Matrix instances_;
};

// Builds a bag from row-major instance lists, e.g. {{1, 2}, {3, 4}} is a bag
// of two 2-d instances.
Bag MakeBag(std::string id, std::optional<Label> label,
            const std::vector<std::vector<double>>& instances);

// Ordered codewords, stored as the columns of a d x size matrix. Zero
// codewords are representable; learners reject them where it matters.
class Dictionary {
 public:
  explicit Dictionary(Matrix codewords);

  const Matrix& codewords() const { return codewords_; }
  int size() const { return static_cast<int>(codewords_.cols()); }
  int dim() const { return static_cast<int>(codewords_.rows()); }
  Eigen::Ref<const Vector> codeword(int k) const { return codewords_.col(k); }

  // Sum of squared codeword norms.
  double SquaredNorm() const { return codewords_.squaredNorm(); }

 private:
  Matrix codewords_;
};

Dictionary MakeDictionary(const std::vector<std::vector<double>>& codewords);

// Learning hyperparameters. Defaults match the CLI defaults.
struct Hyperparams {
  double c1 = 1.0;        // weight of the ||w||^2 regularizer
  double c2 = 0.1;        // weight of the codeword-norm regularizer
  int kappa = 20;         // transfer dictionary size
  double eta = 0.01;      // codeword step size
  int inner_iters = 50;   // codeword descent steps per outer iteration
  int max_outer = 30;     // alternating iterations
  double tol = 1e-4;      // relative dual-value change for convergence
  double r_max = 10.0;    // codeword norm clip
  std::uint64_t seed = 0;

  // Throws InvalidInputError naming the first offending field. max_outer
  // and inner_iters may be zero (degenerate but defined loops).
  void Validate() const;
};

bool operator==(const Hyperparams& a, const Hyperparams& b);

struct SourceModel {
  Dictionary phi;
  Vector v;

  void Validate() const;
};

// g(B) = v.z_B^phi + w.z_B^psi
struct AdaptedModel {
  SourceModel source;
  Dictionary psi;
  Vector w;
  Hyperparams hyper;

  void Validate() const;
};

// Throws InvalidInputError unless every bag has dimension `dim`.
void CheckBagDims(const std::vector<Bag>& bags, int dim);

// Labels of `bags` as a +1/-1 vector; throws for unlabeled bags.
Vector LabelVector(const std::vector<Bag>& bags);

}  // namespace dtmil

#endif  // DTMIL_TYPES_H_
