#include "kernels_impl.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#include <immintrin.h>
#define WGQED_X86 1
#else
#define WGQED_X86 0
#endif

namespace wgqed::simd::detail {

#if WGQED_X86

namespace {

__attribute__((target("avx2,fma"))) inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

}  // namespace

__attribute__((target("avx2,fma"))) void lorentz_response_avx2(const double* x, std::size_t n, double a,
                                                               double b, double* re, double* im) {
  const __m256d va = _mm256_set1_pd(a);
  const __m256d vb = _mm256_set1_pd(b);
  const __m256d vb2 = _mm256_set1_pd(b * b);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vx = _mm256_loadu_pd(x + i);
    const __m256d den = _mm256_add_pd(vb2, _mm256_mul_pd(vx, vx));
    const __m256d s = _mm256_div_pd(va, den);
    _mm256_storeu_pd(re + i, _mm256_mul_pd(vb, s));
    _mm256_storeu_pd(im + i, _mm256_mul_pd(vx, s));
  }
  if (i < n) lorentz_response_scalar(x + i, n - i, a, b, re + i, im + i);
}

__attribute__((target("avx2,fma"))) void weak_intensity_avx2(const double* x, std::size_t n, double a,
                                                             double b, double cre, double cim, double* out) {
  const __m256d va = _mm256_set1_pd(a);
  const __m256d vb = _mm256_set1_pd(b);
  const __m256d vb2 = _mm256_set1_pd(b * b);
  const __m256d vcre = _mm256_set1_pd(cre);
  const __m256d vcim = _mm256_set1_pd(cim);
  const __m256d one = _mm256_set1_pd(1.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vx = _mm256_loadu_pd(x + i);
    const __m256d den = _mm256_add_pd(vb2, _mm256_mul_pd(vx, vx));
    const __m256d s = _mm256_div_pd(va, den);
    const __m256d gre = _mm256_mul_pd(vb, s);
    const __m256d gim = _mm256_mul_pd(vx, s);
    const __m256d re = _mm256_sub_pd(_mm256_mul_pd(vcre, gre), _mm256_mul_pd(vcim, gim));
    _mm256_storeu_pd(out + i, _mm256_add_pd(one, re));
  }
  if (i < n) weak_intensity_scalar(x + i, n - i, a, b, cre, cim, out + i);
}

__attribute__((target("avx2,fma"))) void correlate_avx2(const double* signal, const double* kernel,
                                                        std::size_t nk, double* out, std::size_t nout) {
  for (std::size_t i = 0; i < nout; ++i) {
    const double* s = signal + i;
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t k = 0;
    for (; k + 8 <= nk; k += 8) {
      acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(kernel + k), _mm256_loadu_pd(s + k), acc0);
      acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(kernel + k + 4), _mm256_loadu_pd(s + k + 4), acc1);
    }
    for (; k + 4 <= nk; k += 4)
      acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(kernel + k), _mm256_loadu_pd(s + k), acc0);
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; k < nk; ++k) acc += kernel[k] * s[k];
    out[i] = acc;
  }
}

#else

// Non-x86 builds route the AVX2 entry points to the scalar reference; the
// dispatcher never selects them because backend_supported() reports false.
void lorentz_response_avx2(const double* x, std::size_t n, double a, double b, double* re, double* im) {
  lorentz_response_scalar(x, n, a, b, re, im);
}
void weak_intensity_avx2(const double* x, std::size_t n, double a, double b, double cre, double cim,
                         double* out) {
  weak_intensity_scalar(x, n, a, b, cre, cim, out);
}
void correlate_avx2(const double* signal, const double* kernel, std::size_t nk, double* out,
                    std::size_t nout) {
  correlate_scalar(signal, kernel, nk, out, nout);
}

#endif

}  // namespace wgqed::simd::detail
