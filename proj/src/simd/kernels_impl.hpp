#pragma once

// Raw-pointer kernel signatures. The AVX2 translation unit includes nothing
// else so no inline library code gets compiled with AVX2 enabled.

#include <cstddef>

namespace wgqed::simd::detail {

void lorentz_response_scalar(const double* x, std::size_t n, double a, double b, double* re, double* im);
void weak_intensity_scalar(const double* x, std::size_t n, double a, double b, double cre, double cim,
                           double* out);
void correlate_scalar(const double* signal, const double* kernel, std::size_t nk, double* out,
                      std::size_t nout);

void lorentz_response_avx2(const double* x, std::size_t n, double a, double b, double* re, double* im);
void weak_intensity_avx2(const double* x, std::size_t n, double a, double b, double cre, double cim,
                         double* out);
void correlate_avx2(const double* signal, const double* kernel, std::size_t nk, double* out,
                    std::size_t nout);

}  // namespace wgqed::simd::detail
