// SPDX-License-Identifier: Apache-2.0
#include "robinq/kernels.hpp"

#include <cmath>
#include <sstream>

namespace robinq {

namespace {

bool finite(cdouble z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

// Series in w = lambda x^2 around w = 0; ten terms keep the truncation error
// below 1e-24 for |sqrt(l)x| < 1/2.
EdgeKernel kernel_series(cdouble w, double x) {
  // cos: sum (-w)^k/(2k)!, sin z/z: sum (-w)^k/(2k+1)!,
  // dS/dl: x^3 sum_{k>=1} (-1)^k k w^{k-1}/(2k+1)!.
  cdouble c{1.0, 0.0}, snorm{1.0, 0.0}, dsum{0.0, 0.0};
  cdouble wk{1.0, 0.0};
  double f2k = 1.0, f2k1 = 1.0;  // (2k)!, (2k+1)!
  for (int k = 1; k <= 10; ++k) {
    f2k *= (2 * k - 1) * (2 * k);
    f2k1 *= (2 * k) * (2 * k + 1);
    dsum += wk * (double(k % 2 ? -1 : 1) * k / f2k1);
    wk *= w;
    const double sgn = (k % 2) ? -1.0 : 1.0;
    c += wk * (sgn / f2k);
    snorm += wk * (sgn / f2k1);
  }
  EdgeKernel out;
  out.c = c;
  out.s = x * snorm;
  out.dc_dlambda = -(x / 2.0) * out.s;
  out.ds_dlambda = x * x * x * dsum;
  return out;
}

EdgeKernel kernel_from_root(cdouble root, double x) {
  const cdouble z = root * x;
  if (std::abs(z) < 0.5) return kernel_series(z * z, x);
  EdgeKernel out;
  out.c = std::cos(z);
  out.s = x * (std::sin(z) / z);
  out.dc_dlambda = -(x / 2.0) * out.s;
  out.ds_dlambda = (x * out.c - out.s) / (2.0 * root * root);
  return out;
}

}  // namespace

EdgeKernel eval_kernel(cdouble lambda, double x) {
  if (!finite(lambda)) throw DomainError("non-finite spectral parameter");
  if (!(x > 0.0)) throw DomainError("kernel argument x must be positive");
  return kernel_from_root(std::sqrt(lambda), x);
}

EdgeKernel eval_kernel_root(cdouble root, double x) {
  if (!finite(root)) throw DomainError("non-finite spectral parameter");
  if (!(x > 0.0)) throw DomainError("kernel argument x must be positive");
  return kernel_from_root(root, x);
}

namespace {

EdgeDtn dtn_from_root(cdouble root, double ell) {
  const cdouble z = root * ell;
  if (std::abs(z.imag()) > 25.0) {
    // cos/sin grow like e^{|Im z|}; work with ratios scaled by e^{-|Im z|}:
    // with w = sign(Im z) z and q = e^{2iw} (|q| tiny),
    //   cot w = i(1+q)/(q-1),   csc w = 2i e^{iw}/(q-1),
    // and both are odd, so cot z = sign * cot w, csc z = sign * csc w.
    const double sgn = z.imag() > 0 ? 1.0 : -1.0;
    const cdouble w = sgn * z;
    const cdouble eiw = std::exp(cdouble(0.0, 1.0) * w);
    const cdouble q = eiw * eiw;
    const cdouble cot = cdouble(0.0, 1.0) * (1.0 + q) / (q - 1.0);
    const cdouble csc = 2.0 * cdouble(0.0, 1.0) * eiw / (q - 1.0);
    return {-root * sgn * cot, root * sgn * csc};
  }
  const EdgeKernel k = kernel_from_root(root, ell);
  if (std::abs(k.s) < 1e-10 * std::max(1.0, std::abs(k.c))) {
    const long n = std::max(1l, std::lround(std::abs(z.real()) / M_PI));
    std::ostringstream os;
    os << "edge Dirichlet pole near lambda = " << (n * n * M_PI * M_PI / (ell * ell))
       << " (ell = " << ell << ")";
    throw NumericError(os.str());
  }
  return {-k.c / k.s, 1.0 / k.s};
}

}  // namespace

EdgeDtn edge_dtn(cdouble lambda, double ell) {
  if (!finite(lambda)) throw DomainError("non-finite spectral parameter");
  if (!(ell > 0.0)) throw DomainError("edge length must be positive");
  return dtn_from_root(std::sqrt(lambda), ell);
}

EdgeDtn edge_dtn_root(cdouble root, double ell) {
  if (!finite(root)) throw DomainError("non-finite spectral parameter");
  if (!(ell > 0.0)) throw DomainError("edge length must be positive");
  return dtn_from_root(root, ell);
}

}  // namespace robinq
