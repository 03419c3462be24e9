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

#ifndef DTMIL_ERRORS_H_
#define DTMIL_ERRORS_H_

#include <stdexcept>
#include <string>

namespace dtmil {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller supplied data that violates a documented precondition
// (dimension mismatch, out-of-box duals, bad hyperparameters, ...).
class InvalidInputError : public Error {
 public:
  using Error::Error;
};

// Numerically unusable input, e.g. a Gram matrix that is not PSD.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// Degenerate starting point or data from which learning cannot proceed
// (all-zero codeword, dataset whose instances are all zero).
class DegenerateError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Malformed dataset or model file.
class FormatError : public Error {
 public:
  using Error::Error;
};

// Model file carries a format_version this build does not read.
class VersionError : public FormatError {
 public:
  using FormatError::FormatError;
};

// Model file holds a different kind of model than the one requested.
class ModelTypeError : public FormatError {
 public:
  using FormatError::FormatError;
};

// Filesystem failure while reading or writing.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace dtmil

#endif  // DTMIL_ERRORS_H_
