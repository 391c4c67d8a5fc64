// Copyright 2026 The qpbae Authors
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

namespace qpbae {

/// Broad failure classes. The CLI maps each class to a process exit code.
enum class ErrorKind {
  Config,   // invalid configuration or argument combination
  Data,     // unreadable or malformed input data
  Numeric,  // dimension/capacity/degenerate-input problems
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

#define QPBAE_DEFINE_ERROR(Name, Kind)                                   \
  class Name : public Error {                                            \
   public:                                                               \
    explicit Name(const std::string& what) : Error(ErrorKind::Kind, what) {} \
  };

QPBAE_DEFINE_ERROR(DimensionError, Numeric)
QPBAE_DEFINE_ERROR(IndexError, Numeric)
QPBAE_DEFINE_ERROR(CapacityError, Numeric)
QPBAE_DEFINE_ERROR(DegenerateInputError, Numeric)
QPBAE_DEFINE_ERROR(UndefinedMetricError, Numeric)
QPBAE_DEFINE_ERROR(ArgumentError, Config)
QPBAE_DEFINE_ERROR(ConfigError, Config)
QPBAE_DEFINE_ERROR(LayoutError, Data)
QPBAE_DEFINE_ERROR(DataError, Data)
QPBAE_DEFINE_ERROR(IoError, Data)

#undef QPBAE_DEFINE_ERROR

/// Process exit code for an error class: 2 config, 3 data, 4 numeric.
inline int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Config:
      return 2;
    case ErrorKind::Data:
      return 3;
    case ErrorKind::Numeric:
      return 4;
  }
  return 1;
}

}  // namespace qpbae
