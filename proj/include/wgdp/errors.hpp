//
// Copyright 2026 The wgdp Authors
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
//

#ifndef WGDP_ERRORS_HPP_
#define WGDP_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace wgdp {

// Every error raised by the library derives from Error so callers (the
// harness in particular) can record a failure in-row and keep going.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// A data point or iterate broke a declared bound of the loss/instance.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

class UnsupportedMode : public Error {
 public:
  using Error::Error;
};

class BudgetExhausted : public Error {
 public:
  using Error::Error;
};

class InstanceTooSmall : public Error {
 public:
  using Error::Error;
};

// Importance weighting an arm that has zero probability.
class DegenerateWeight : public Error {
 public:
  using Error::Error;
};

// An iterative routine hit its iteration cap. `best_bound` is the tightest
// certified bound reached before giving up.
class NonConvergence : public Error {
 public:
  NonConvergence(const std::string& what, double best_bound)
      : Error(what), best_bound_(best_bound) {}
  double best_bound() const { return best_bound_; }

 private:
  double best_bound_;
};

}  // namespace wgdp

#endif  // WGDP_ERRORS_HPP_
