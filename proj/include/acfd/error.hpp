/* Copyright 2026 The ACFD Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#pragma once

#include <stdexcept>
#include <string>

namespace acfd {

/// Tensor or spec dimensions are incompatible with the requested operation.
struct ShapeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// A value lies outside the mathematical domain of an operation.
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

/// Serialized data has a bad magic string, version, or header.
struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Serialized data is internally inconsistent (offsets, sizes, dims).
struct CorruptionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace acfd
