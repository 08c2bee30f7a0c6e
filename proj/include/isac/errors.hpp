// SPDX-License-Identifier: Apache-2.0
//
// isac-arrays: joint beamforming simulation for dissimilar mono-static arrays
// Copyright (C) 2026 The isac-arrays authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <stdexcept>
#include <string>

namespace isac {

/// Bad parameter value (non-positive size, odd grid, mismatched dimensions, ...).
class invalid_argument : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// A transmit/receive pair that breaks the co-array spacing rules.
class constraint_violation : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// A normalized angular frequency outside the visible region.
class not_physical : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Numerical breakdown that should not happen for valid inputs.
class internal_error : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

} // namespace isac
