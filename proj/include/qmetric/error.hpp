// Copyright 2026 The qmetric Authors
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

namespace qmetric {

/// Operand shapes do not fit together (matrix sizes, qubit counts, subsystem
/// factorizations).
class DimensionError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// An input was required to be Hermitian (or unitary) within tolerance and
/// is not.
class StructureError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// A domain object violates one of its invariants (trace, positivity, norm).
class InvariantViolation : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

/// An index or count argument lies outside its admissible range.
class RangeError : public std::out_of_range {
  public:
    using std::out_of_range::out_of_range;
};

} // namespace qmetric
