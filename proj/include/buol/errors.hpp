// Copyright 2026 The buol Authors.
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

#ifndef BUOL_ERRORS_HPP_
#define BUOL_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace buol {

// Base class of every error raised by the library. The CLI turns any of these
// into a one-line diagnostic and a nonzero exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation (z <= 0, empty
// sets, invalid intrinsics).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Inputs whose shapes, grids or cameras do not agree.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Malformed container or manifest; the message names the offset or field.
class ParseError : public Error {
 public:
  using Error::Error;
};

// Procedural generation could not satisfy a requested constraint.
class PlacementError : public Error {
 public:
  using Error::Error;
};

}  // namespace buol

#endif  // BUOL_ERRORS_HPP_
