// Copyright 2026 The pcfilter Authors
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
#pragma once

#include <stdexcept>
#include <string>

namespace pcf {

// Argument / shape problems a caller can fix.
class InvalidSizeError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

class ShapeError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

class RangeError : public std::out_of_range {
  public:
    using std::out_of_range::out_of_range;
};

class ResourceLimitError : public std::length_error {
  public:
    using std::length_error::length_error;
};

class ParseError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

// Numerical failures. The CLI maps every NumericalError to exit code 3.
class NumericalError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Squared norm fell below the degenerate-state threshold (1e-300).
class DegenerateStateError : public NumericalError {
  public:
    using NumericalError::NumericalError;
};

class ResonanceUndefinedError : public NumericalError {
  public:
    using NumericalError::NumericalError;
};

class UndefinedDegreeError : public NumericalError {
  public:
    using NumericalError::NumericalError;
};

/// Bad experiment configuration; the CLI maps it to exit code 2.
class ConfigError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

class PlanError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

} // namespace pcf
