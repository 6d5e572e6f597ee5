// Copyright 2026 The revmatch Authors.
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

#ifndef REVMATCH_ERROR_H_
#define REVMATCH_ERROR_H_

#include <stdexcept>
#include <string>

namespace revmatch {

// Broad failure classes. The numeric values double as CLI exit codes.
enum class ErrorKind {
  kUsage = 1,
  kData = 2,
  kInfeasible = 3,
  kNumerical = 4,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const { return kind_; }
  int exit_code() const { return static_cast<int>(kind_); }

 private:
  ErrorKind kind_;
};

class UsageError : public Error {
 public:
  explicit UsageError(const std::string& what)
      : Error(ErrorKind::kUsage, what) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& what)
      : Error(ErrorKind::kData, what) {}
};

class InfeasibleError : public Error {
 public:
  InfeasibleError(const std::string& what, long long deficit)
      : Error(ErrorKind::kInfeasible, what), deficit_(deficit) {}

  // Number of review slots that cannot be filled.
  long long deficit() const { return deficit_; }

 private:
  long long deficit_;
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what)
      : Error(ErrorKind::kNumerical, what) {}
};

}  // namespace revmatch

#endif  // REVMATCH_ERROR_H_
