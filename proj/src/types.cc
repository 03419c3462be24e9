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

#include "dtmil/types.h"

#include <cmath>
#include <string>
#include <utility>

#include "dtmil/errors.h"

namespace dtmil {

Label LabelFromInt(int value) {
  if (value == 1) return Label::kPositive;
  if (value == -1) return Label::kNegative;
  throw InvalidInputError("label must be +1 or -1, got " +
                          std::to_string(value));
}

Bag::Bag(std::string id, std::optional<Label> label, Matrix instances)
    : id_(std::move(id)), label_(label), instances_(std::move(instances)) {
  if (instances_.cols() < 1) {
    throw InvalidInputError("bag '" + id_ + "' has no instances");
  }
  if (instances_.rows() < 1) {
    throw InvalidInputError("bag '" + id_ + "' has zero-dimensional instances");
  }
  if (!instances_.allFinite()) {
    throw InvalidInputError("bag '" + id_ + "' has a non-finite entry");
  }
}

Label Bag::RequireLabel() const {
  if (!label_) throw InvalidInputError("bag '" + id_ + "' is unlabeled");
  return *label_;
}

Bag MakeBag(std::string id, std::optional<Label> label,
            const std::vector<std::vector<double>>& instances) {
  const int m = static_cast<int>(instances.size());
  const int d = m > 0 ? static_cast<int>(instances[0].size()) : 0;
  Matrix x(d, m);
  for (int j = 0; j < m; ++j) {
    if (static_cast<int>(instances[j].size()) != d) {
      throw InvalidInputError("bag '" + id + "': instance " +
                              std::to_string(j) + " has dimension " +
                              std::to_string(instances[j].size()) +
                              ", expected " + std::to_string(d));
    }
    for (int r = 0; r < d; ++r) x(r, j) = instances[j][r];
  }
  return Bag(std::move(id), label, std::move(x));
}

Dictionary::Dictionary(Matrix codewords) : codewords_(std::move(codewords)) {
  if (codewords_.cols() < 1) {
    throw InvalidInputError("dictionary must have at least one codeword");
  }
  if (codewords_.rows() < 1) {
    throw InvalidInputError("dictionary codewords must have dimension >= 1");
  }
  if (!codewords_.allFinite()) {
    throw InvalidInputError("dictionary has a non-finite entry");
  }
}

Dictionary MakeDictionary(const std::vector<std::vector<double>>& codewords) {
  const int size = static_cast<int>(codewords.size());
  const int d = size > 0 ? static_cast<int>(codewords[0].size()) : 0;
  Matrix m(d, size);
  for (int k = 0; k < size; ++k) {
    if (static_cast<int>(codewords[k].size()) != d) {
      throw InvalidInputError("codeword " + std::to_string(k) +
                              " has inconsistent dimension");
    }
    for (int r = 0; r < d; ++r) m(r, k) = codewords[k][r];
  }
  return Dictionary(std::move(m));
}

void Hyperparams::Validate() const {
  auto positive = [](double x, const char* name) {
    if (!(std::isfinite(x) && x > 0.0)) {
      throw InvalidInputError(std::string(name) +
                              " must be a positive finite number, got " +
                              std::to_string(x));
    }
  };
  positive(c1, "c1");
  positive(c2, "c2");
  positive(eta, "eta");
  positive(tol, "tol");
  positive(r_max, "r_max");
  if (kappa < 1) {
    throw InvalidInputError("kappa must be >= 1, got " + std::to_string(kappa));
  }
  if (inner_iters < 0) {
    throw InvalidInputError("inner_iters must be >= 0, got " +
                            std::to_string(inner_iters));
  }
  if (max_outer < 0) {
    throw InvalidInputError("max_outer must be >= 0, got " +
                            std::to_string(max_outer));
  }
}

bool operator==(const Hyperparams& a, const Hyperparams& b) {
  return a.c1 == b.c1 && a.c2 == b.c2 && a.kappa == b.kappa &&
         a.eta == b.eta && a.inner_iters == b.inner_iters &&
         a.max_outer == b.max_outer && a.tol == b.tol && a.r_max == b.r_max &&
         a.seed == b.seed;
}

void SourceModel::Validate() const {
  if (v.size() != phi.size()) {
    throw InvalidInputError("source model has " + std::to_string(phi.size()) +
                            " codewords but |v| = " + std::to_string(v.size()));
  }
  if (!v.allFinite()) throw InvalidInputError("source model v is not finite");
}

void AdaptedModel::Validate() const {
  source.Validate();
  if (w.size() != psi.size()) {
    throw InvalidInputError("adapted model has " + std::to_string(psi.size()) +
                            " transfer codewords but |w| = " +
                            std::to_string(w.size()));
  }
  if (psi.dim() != source.phi.dim()) {
    throw InvalidInputError("psi dimension " + std::to_string(psi.dim()) +
                            " != phi dimension " +
                            std::to_string(source.phi.dim()));
  }
  if (!w.allFinite()) throw InvalidInputError("adapted model w is not finite");
  hyper.Validate();
}

void CheckBagDims(const std::vector<Bag>& bags, int dim) {
  for (const Bag& bag : bags) {
    if (bag.dim() != dim) {
      throw InvalidInputError("bag '" + bag.id() + "' has dimension " +
                              std::to_string(bag.dim()) + ", expected " +
                              std::to_string(dim));
    }
  }
}

Vector LabelVector(const std::vector<Bag>& bags) {
  Vector y(static_cast<Eigen::Index>(bags.size()));
  for (size_t i = 0; i < bags.size(); ++i) y[i] = Sign(bags[i].RequireLabel());
  return y;
}

}  // namespace dtmil
