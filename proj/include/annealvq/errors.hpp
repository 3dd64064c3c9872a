// Copyright 2026 The annealvq Authors
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

namespace annealvq {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

//! Caller supplied something unusable: bad arguments, mismatched shapes,
//! missing files, or a file of the wrong kind (magic mismatch).
class InputError : public Error {
 public:
  using Error::Error;
};

//! A file of the right kind whose payload is malformed or truncated.
class FormatError : public Error {
 public:
  using Error::Error;
};

//! An internal consistency check failed.
class InvariantError : public Error {
 public:
  using Error::Error;
};

}  // namespace annealvq
