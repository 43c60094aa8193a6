// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "robinq/common.hpp"

namespace robinq {

// Entire-in-lambda basis on one edge:
//   C(x;l) = cos(sqrt(l) x),  S(x;l) = sin(sqrt(l) x)/sqrt(l),
// together with the lambda-derivatives needed for Newton steps. Both are even
// in sqrt(l), so the branch choice cannot matter; a series kicks in near
// sqrt(l)x = 0 so l = 0 is a regular point.
struct EdgeKernel {
  cdouble c;
  cdouble s;
  cdouble dc_dlambda;
  cdouble ds_dlambda;
};

EdgeKernel eval_kernel(cdouble lambda, double x);

// Same values from a caller-chosen square root of lambda (testing hook for
// branch invariance).
EdgeKernel eval_kernel_root(cdouble root, double x);

// Single-edge vertex response [[a, b], [b, a]] mapping boundary values to
// (negated) outgoing flux sums:
//   a = -C(ell)/S(ell) = -sqrt(l) cot(sqrt(l) ell)
//   b = 1/S(ell)       =  sqrt(l) csc(sqrt(l) ell)
struct EdgeDtn {
  cdouble a;
  cdouble b;
};

// Throws NumericError("edge Dirichlet pole ...") when lambda sits on the
// edge's Dirichlet spectrum n^2 pi^2 / ell^2.
EdgeDtn edge_dtn(cdouble lambda, double ell);
EdgeDtn edge_dtn_root(cdouble root, double ell);  // testing hook

}  // namespace robinq
