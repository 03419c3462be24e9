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

#ifndef DTMIL_MIL_CORE_H_
#define DTMIL_MIL_CORE_H_

#include <vector>

#include "dtmil/types.h"

namespace dtmil {

// Bag-level feature: entry k is max_j <codeword_k, x_j>.
using BagFeature = Vector;

struct MaxDot {
  double value;
  int index;  // lowest instance index attaining the max
};

// Maximum dot product between `codeword` and the bag's instances.
MaxDot MaxDotProduct(const Eigen::Ref<const Vector>& codeword, const Bag& bag);

BagFeature EmbedBag(const Bag& bag, const Dictionary& dict);

// Row i is EmbedBag(bags[i], dict).
Matrix EmbedBags(const std::vector<Bag>& bags, const Dictionary& dict);

double ScoreSource(const Bag& bag, const SourceModel& model);
double ScoreTarget(const Bag& bag, const AdaptedModel& model);

// +1 for score >= 0, -1 otherwise.
Label Predict(double score);

double HingeLoss(double score, Label label);

// (1/n) sum_i hinge(g(B_i), y_i) + (c1/2)||w||^2 + (c2/2) sum_k ||psi_k||^2,
// with c1 and c2 taken from model.hyper.
double PrimalObjective(const std::vector<Bag>& train, const AdaptedModel& model);

}  // namespace dtmil

#endif  // DTMIL_MIL_CORE_H_
