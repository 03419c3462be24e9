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

#ifndef DTMIL_DATA_IO_H_
#define DTMIL_DATA_IO_H_

#include <string>
#include <variant>
#include <vector>

#include "dtmil/types.h"

namespace dtmil {

inline constexpr int kModelFormatVersion = 1;

// JSON Lines, one bag per line:
//   {"id": "b1", "label": 1, "instances": [[1.0, 2.0], ...]}
// Blank lines are skipped. "label" may be omitted for unlabeled bags.
// Errors name the offending line (FormatError) or bag id (dimension).
std::vector<Bag> ParseDataset(const std::string& text);
std::vector<Bag> LoadDataset(const std::string& path);

std::string SerializeDataset(const std::vector<Bag>& bags);
void SaveDataset(const std::vector<Bag>& bags, const std::string& path);

// Model document:
//   {"format_version": 1, "phi": [[...]], "v": [...],
//    "psi": [[...]] | null, "w": [...] | null, "hyper": {...} | null}
// A source model has null psi, w and hyper. Doubles are written in shortest
// round-trip form, so save/load is bit-exact.
std::string SerializeModel(const SourceModel& model);
std::string SerializeModel(const AdaptedModel& model);
void SaveModel(const SourceModel& model, const std::string& path);
void SaveModel(const AdaptedModel& model, const std::string& path);

using AnyModel = std::variant<SourceModel, AdaptedModel>;

AnyModel ParseModel(const std::string& text);
AnyModel LoadModel(const std::string& path);
// These throw ModelTypeError when the file holds the other kind of model.
SourceModel LoadSourceModel(const std::string& path);
AdaptedModel LoadAdaptedModel(const std::string& path);

std::string ReadFile(const std::string& path);
// Writes to a sibling temporary file and renames it over `path`, so a failed
// write never leaves a partial file behind.
void WriteFileAtomic(const std::string& path, const std::string& contents);

}  // namespace dtmil

#endif  // DTMIL_DATA_IO_H_
