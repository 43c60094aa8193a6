// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace robinq {

using cdouble = std::complex<double>;

// Domain errors (bad graphs, out-of-range parameters).
struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Numerical failures (pole proximity, singular blocks, exhausted budgets).
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace robinq
