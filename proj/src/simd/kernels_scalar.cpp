#include "kernels_impl.hpp"

namespace wgqed::simd::detail {

void lorentz_response_scalar(const double* x, std::size_t n, double a, double b, double* re, double* im) {
  const double b2 = b * b;
  for (std::size_t i = 0; i < n; ++i) {
    const double den = b2 + x[i] * x[i];
    const double s = a / den;
    re[i] = b * s;
    im[i] = x[i] * s;
  }
}

void weak_intensity_scalar(const double* x, std::size_t n, double a, double b, double cre, double cim,
                           double* out) {
  // Re[(cre + i cim)(gre + i gim)] = cre*gre - cim*gim
  const double b2 = b * b;
  for (std::size_t i = 0; i < n; ++i) {
    const double den = b2 + x[i] * x[i];
    const double s = a / den;
    const double gre = b * s;
    const double gim = x[i] * s;
    out[i] = 1.0 + (cre * gre - cim * gim);
  }
}

void correlate_scalar(const double* signal, const double* kernel, std::size_t nk, double* out,
                      std::size_t nout) {
  for (std::size_t i = 0; i < nout; ++i) {
    const double* s = signal + i;
    double acc = 0.0;
    for (std::size_t k = 0; k < nk; ++k) acc += kernel[k] * s[k];
    out[i] = acc;
  }
}

}  // namespace wgqed::simd::detail
