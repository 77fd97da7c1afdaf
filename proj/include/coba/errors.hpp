// Copyright 2026 The Authors.
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

namespace coba {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or out-of-range arguments.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// The budget constraints cannot be met for the given task count.
class Infeasible : public Error {
 public:
  using Error::Error;
};

// A solver refused an instance that exceeds its memory or step cap.
class ResourceLimit : public Error {
 public:
  using Error::Error;
};

// A serialized blob has the wrong schema or version.
class FormatError : public Error {
 public:
  using Error::Error;
};

// Simulation or CLI configuration is invalid.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace coba
