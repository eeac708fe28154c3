// Copyright 2026 The ttfscat Authors
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

#ifndef TTFSCAT_ERRORS_H_
#define TTFSCAT_ERRORS_H_

#include <stdexcept>
#include <string>
#include <vector>

namespace ttfscat {

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller broke a documented precondition (bad parameters, TTFS violation,
// shape mismatch).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

// A file could not be parsed: bad magic, truncated payload, checksum mismatch.
class FormatError : public Error {
 public:
  using Error::Error;
};

// Configuration rejected. Carries one message per offending key.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> problems);

  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

#define TTFSCAT_REQUIRE(cond, msg)                            \
  do {                                                        \
    if (!(cond)) throw ::ttfscat::ContractViolation(msg);     \
  } while (false)

}  // namespace ttfscat

#endif  // TTFSCAT_ERRORS_H_
