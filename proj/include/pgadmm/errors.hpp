/*
 * Copyright 2026 The pgadmm Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef PGADMM_ERRORS_HPP_
#define PGADMM_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace pgadmm {

/// Invalid parameters, dimension mismatches, malformed configs/files.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// Operation requested on an object that cannot support it
/// (e.g. Lagrangian evaluation without function-value evaluators).
class UnsupportedOperation : public std::logic_error {
 public:
  explicit UnsupportedOperation(const std::string& what) : std::logic_error(what) {}
};

/// Numerical breakdown: singular/ill-conditioned solves, degenerate instances.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace pgadmm

#endif  // PGADMM_ERRORS_HPP_
