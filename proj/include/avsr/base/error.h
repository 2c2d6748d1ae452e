// include/avsr/base/error.h

// Copyright 2026  The avsrbench Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef AVSR_BASE_ERROR_H_
#define AVSR_BASE_ERROR_H_

#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>

namespace avsr {

// Single exception type for contract violations and malformed input. The
// message is meant for the user; callers at the CLI boundary print it and exit
// nonzero.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

namespace internal {
template <typename... Args>
std::string StrCat(Args&&... args) {
  std::ostringstream os;
  (os << ... << std::forward<Args>(args));
  return os.str();
}
}  // namespace internal

template <typename... Args>
[[noreturn]] void Fail(Args&&... args) {
  throw Error(internal::StrCat(std::forward<Args>(args)...));
}

#define AVSR_CHECK(cond, ...)                                        \
  do {                                                               \
    if (!(cond)) ::avsr::Fail("check failed: " #cond ": ", __VA_ARGS__); \
  } while (0)

}  // namespace avsr

#endif  // AVSR_BASE_ERROR_H_
