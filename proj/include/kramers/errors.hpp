/* Copyright 2026 The kramers-lab Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *
 */

#pragma once

#include <stdexcept>
#include <string>

namespace kramers {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define KRAMERS_ERROR(Name)            \
  class Name : public Error {          \
   public:                             \
    using Error::Error;                \
  };

KRAMERS_ERROR(AdmissibilityError)
KRAMERS_ERROR(QuadratureError)
KRAMERS_ERROR(MonotonicityError)
KRAMERS_ERROR(RangeError)
KRAMERS_ERROR(GridMismatch)
KRAMERS_ERROR(SingularDensity)
KRAMERS_ERROR(ViolationError)
KRAMERS_ERROR(DegenerateBound)
KRAMERS_ERROR(EmptyMeasure)
KRAMERS_ERROR(StructureError)
KRAMERS_ERROR(InfiniteCost)
KRAMERS_ERROR(DegenerateDenominator)
KRAMERS_ERROR(StabilityError)
KRAMERS_ERROR(NegativityError)
KRAMERS_ERROR(TuningFailure)
KRAMERS_ERROR(ConfigError)
KRAMERS_ERROR(IoError)
KRAMERS_ERROR(BudgetExceeded)

#undef KRAMERS_ERROR

}  // namespace kramers
