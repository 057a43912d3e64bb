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

#include "layerwise/errors.h"

namespace layerwise {

const char* error_class_name(ErrorClass error_class) {
  switch (error_class) {
    case ErrorClass::kInput:
      return "input";
    case ErrorClass::kDegenerate:
      return "degenerate";
    case ErrorClass::kNumerical:
      return "numerical";
  }
  return "unknown";
}

}  // namespace layerwise
