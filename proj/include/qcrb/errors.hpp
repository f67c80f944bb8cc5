// Copyright 2026 The qcrb-locc Authors
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

namespace qcrb {

/// Raised when an input violates a documented precondition (dimensions,
/// normalization, orthogonality, hermiticity, ...).
class ValidationError : public std::invalid_argument {
   public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when a numerical construction fails to reach its residual target.
class ConvergenceError : public std::runtime_error {
   public:
    ConvergenceError(const std::string &what, double residual)
        : std::runtime_error(what + " (residual " + std::to_string(residual) + ")"), residual_(residual) {}

    double residual() const noexcept {
        return residual_;
    }

   private:
    double residual_;
};

}  // namespace qcrb
