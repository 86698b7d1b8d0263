// Copyright 2026 The polnli Authors
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
#include <utility>

namespace polnli {

/// Invalid configuration value. `key()` holds the dotted path of the
/// offending field (e.g. "interferometer.sample.t_perp_mag").
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string key, const std::string& what)
      : std::invalid_argument(key.empty() ? what : key + ": " + what), key_(std::move(key)) {}

  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

/// A numerical routine could not produce a result (rank deficiency,
/// non-convergence, malformed series).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The data do not identify a requested parameter. `flag()` is a stable
/// machine-readable name such as "degenerate_conic".
class UnidentifiableError : public std::runtime_error {
 public:
  UnidentifiableError(std::string flag, const std::string& what)
      : std::runtime_error(flag + ": " + what), flag_(std::move(flag)) {}

  const std::string& flag() const noexcept { return flag_; }

 private:
  std::string flag_;
};

}  // namespace polnli
