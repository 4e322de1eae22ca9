// Copyright 2026 The sjlstm Authors.
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

#ifndef SJLSTM_STATUS_HPP_
#define SJLSTM_STATUS_HPP_

#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>

namespace sjlstm {

// Base class for recoverable failures surfaced to callers (bad input files,
// infeasible configurations, numerical blow-ups during training).
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}

  // Short machine-readable category, e.g. "corpus_format".
  const std::string& kind() const { return kind_; }

 private:
  std::string kind_;
};

// Broken preconditions. These indicate programming errors in the caller.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

namespace internal {

[[noreturn]] inline void FailCheck(const char* expr, const char* file, int line,
                                   const std::string& detail) {
  std::ostringstream os;
  os << file << ":" << line << ": check failed: " << expr;
  if (!detail.empty()) os << " (" << detail << ")";
  throw ContractViolation(os.str());
}

}  // namespace internal
}  // namespace sjlstm

#define SJ_CHECK(cond)                                                \
  do {                                                                \
    if (!(cond)) ::sjlstm::internal::FailCheck(#cond, __FILE__, __LINE__, ""); \
  } while (0)

#define SJ_CHECK_MSG(cond, msg)                                        \
  do {                                                                 \
    if (!(cond)) {                                                     \
      std::ostringstream sj_check_os_;                                 \
      sj_check_os_ << msg;                                             \
      ::sjlstm::internal::FailCheck(#cond, __FILE__, __LINE__,         \
                                    sj_check_os_.str());               \
    }                                                                  \
  } while (0)

#endif  // SJLSTM_STATUS_HPP_
