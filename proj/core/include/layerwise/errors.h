// Copyright 2026 The Layerwise Authors. All Rights Reserved.
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

#ifndef LAYERWISE_ERRORS_H_
#define LAYERWISE_ERRORS_H_

#include <stdexcept>
#include <string>

namespace layerwise {

// Error classes double as process exit codes for the command-line tool.
enum class ErrorClass : int {
  kInput = 2,       // I/O, file format, schema, validation
  kDegenerate = 3,  // statistics undefined for the given data
  kNumerical = 4,   // linear-algebra failure
};

class Error : public std::runtime_error {
 public:
  Error(ErrorClass error_class, const std::string& message)
      : std::runtime_error(message), error_class_(error_class) {}

  ErrorClass error_class() const noexcept { return error_class_; }
  int exit_code() const noexcept { return static_cast<int>(error_class_); }

 private:
  ErrorClass error_class_;
};

#define LAYERWISE_DEFINE_ERROR(Name, Class)                    \
  class Name : public Error {                                  \
   public:                                                     \
    explicit Name(const std::string& message)                  \
        : Error(ErrorClass::Class, message) {}                 \
  }

LAYERWISE_DEFINE_ERROR(IoError, kInput);
LAYERWISE_DEFINE_ERROR(FormatError, kInput);
LAYERWISE_DEFINE_ERROR(TruncationError, kInput);
LAYERWISE_DEFINE_ERROR(DataError, kInput);
LAYERWISE_DEFINE_ERROR(SchemaError, kInput);
LAYERWISE_DEFINE_ERROR(RangeError, kInput);
LAYERWISE_DEFINE_ERROR(DimError, kInput);
LAYERWISE_DEFINE_ERROR(ValidationError, kInput);
LAYERWISE_DEFINE_ERROR(InsufficientDataError, kDegenerate);
LAYERWISE_DEFINE_ERROR(DegenerateError, kDegenerate);
LAYERWISE_DEFINE_ERROR(NotSymmetricError, kNumerical);
LAYERWISE_DEFINE_ERROR(NotPsdError, kNumerical);
LAYERWISE_DEFINE_ERROR(NumericalError, kNumerical);

#undef LAYERWISE_DEFINE_ERROR

// Short name of the class, for log lines ("input", "degenerate", ...).
const char* error_class_name(ErrorClass error_class);

}  // namespace layerwise

#endif  // LAYERWISE_ERRORS_H_
