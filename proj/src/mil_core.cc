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

#include "dtmil/mil_core.h"

#include <cmath>
#include <string>

#include "dtmil/errors.h"

namespace dtmil {
namespace {

void CheckDim(const Bag& bag, int dict_dim) {
  if (bag.dim() != dict_dim) {
    throw InvalidInputError("bag '" + bag.id() + "' has dimension " +
                            std::to_string(bag.dim()) +
                            " but dictionary codewords have dimension " +
                            std::to_string(dict_dim));
  }
}

}  // namespace

MaxDot MaxDotProduct(const Eigen::Ref<const Vector>& codeword, const Bag& bag) {
  CheckDim(bag, static_cast<int>(codeword.size()));
  MaxDot best{codeword.dot(bag.instance(0)), 0};
  for (int j = 1; j < bag.size(); ++j) {
    const double value = codeword.dot(bag.instance(j));
    if (value > best.value) best = {value, j};
  }
  return best;
}

BagFeature EmbedBag(const Bag& bag, const Dictionary& dict) {
  CheckDim(bag, dict.dim());
  BagFeature z(dict.size());
  for (int k = 0; k < dict.size(); ++k) {
    z[k] = MaxDotProduct(dict.codeword(k), bag).value;
  }
  return z;
}

Matrix EmbedBags(const std::vector<Bag>& bags, const Dictionary& dict) {
  Matrix z(static_cast<Eigen::Index>(bags.size()), dict.size());
  for (size_t i = 0; i < bags.size(); ++i) {
    z.row(static_cast<Eigen::Index>(i)) = EmbedBag(bags[i], dict).transpose();
  }
  return z;
}

double ScoreSource(const Bag& bag, const SourceModel& model) {
  model.Validate();
  return model.v.dot(EmbedBag(bag, model.phi));
}

double ScoreTarget(const Bag& bag, const AdaptedModel& model) {
  if (model.w.size() != model.psi.size()) {
    throw InvalidInputError("adapted model |w| != |psi|");
  }
  return ScoreSource(bag, model.source) + model.w.dot(EmbedBag(bag, model.psi));
}

Label Predict(double score) {
  if (!std::isfinite(score)) {
    throw InvalidInputError("cannot predict from a non-finite score");
  }
  return score >= 0.0 ? Label::kPositive : Label::kNegative;
}

double HingeLoss(double score, Label label) {
  if (label != Label::kPositive && label != Label::kNegative) {
    throw InvalidInputError("hinge loss needs a +1/-1 label");
  }
  return std::max(0.0, 1.0 - Sign(label) * score);
}

double PrimalObjective(const std::vector<Bag>& train,
                       const AdaptedModel& model) {
  if (train.empty()) {
    throw InvalidInputError("primal objective of an empty training set");
  }
  double loss = 0.0;
  for (const Bag& bag : train) {
    loss += HingeLoss(ScoreTarget(bag, model), bag.RequireLabel());
  }
  const double n = static_cast<double>(train.size());
  return loss / n + 0.5 * model.hyper.c1 * model.w.squaredNorm() +
         0.5 * model.hyper.c2 * model.psi.SquaredNorm();
}

}  // namespace dtmil
