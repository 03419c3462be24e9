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

#ifndef DTMIL_SYNTHETIC_H_
#define DTMIL_SYNTHETIC_H_

#include <cstdint>
#include <string>
#include <vector>

#include "dtmil/types.h"

namespace dtmil {

// Two-domain multi-instance data. Background instances are drawn from
// N(0, cluster_sigma^2 I); concept instances from N(cluster_separation * e_0,
// cluster_sigma^2 I). A positive bag of m instances holds
// ceil(witness_rate * m) concept instances, a negative bag none. Target bags
// are drawn the same way and then mapped x -> R x + t + noise_sigma * eps,
// where R rotates the first two coordinates by shift_rotation_degrees and
// t = shift_translation * e_0 moves everything along the concept axis.
//
// The defaults give a shift under which the source classifier loses roughly
// ten points of accuracy on the target domain.
struct SynthConfig {
  int d = 10;
  int source_bags_per_class = 100;
  int target_bags_per_class = 50;
  int min_instances = 4;
  int max_instances = 8;
  double witness_rate = 0.5;
  double cluster_separation = 7.5;
  double cluster_sigma = 2.5;
  double shift_rotation_degrees = 30.0;
  double shift_translation = 3.0;
  double noise_sigma = 1.5;

  void Validate() const;
};

struct SynthData {
  std::vector<Bag> source;
  std::vector<Bag> target;
};

SynthData GenerateSynthetic(const SynthConfig& config, std::uint64_t seed);

// JSON object with any subset of the SynthConfig field names; omitted fields
// keep their defaults, unknown fields are rejected.
SynthConfig ParseSynthConfig(const std::string& json_text);

}  // namespace dtmil

#endif  // DTMIL_SYNTHETIC_H_
