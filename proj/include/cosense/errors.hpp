// Copyright 2026 The cosense Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace cosense {

/// Base of every error thrown by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid user-facing configuration (bad lengths, grid too small, bad field).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// An operation was called with inputs violating its contract.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A propagated state would no longer fit inside the simulation window.
class GridOverflowError : public Error {
 public:
  using Error::Error;
};

/// Finite-difference or quadrature estimate failed its self-consistency check.
class NumericalQualityError : public Error {
 public:
  using Error::Error;
};

/// The requested function of the parameters is not estimable from a singular
/// Fisher matrix.
class NotEstimableError : public Error {
 public:
  using Error::Error;
};

/// Regression failed (degenerate design, invalid data).
class FitError : public Error {
 public:
  using Error::Error;
};

}  // namespace cosense
