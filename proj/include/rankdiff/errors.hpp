/*
   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <stdexcept>
#include <string>

namespace rankdiff {

// Base class for rejected inputs (bad parameters, bad config, bad files).
// The CLI maps these to exit code 2; everything else exits 1.
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NonDecreasingDrift : InputError {
    using InputError::InputError;
};

struct DegenerateDiffusion : InputError {
    using InputError::InputError;
};

struct DomainError : InputError {
    using InputError::InputError;
};

struct NonPositiveRate : InputError {
    using InputError::InputError;
};

struct InvalidStep : InputError {
    using InputError::InputError;
};

struct ModelError : InputError {
    using InputError::InputError;
};

struct CflViolation : InputError {
    using InputError::InputError;
};

struct InsufficientCheckpoints : InputError {
    using InputError::InputError;
};

struct ConfigError : InputError {
    using InputError::InputError;
};

struct ParseError : InputError {
    using InputError::InputError;
};

struct ValidationError : InputError {
    using InputError::InputError;
};

} // namespace rankdiff
