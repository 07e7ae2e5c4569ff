#pragma once

// Data-parallel inner loops. Each kernel has a portable scalar reference and
// an AVX2/FMA variant; the variant is picked once at runtime from CPUID and
// can be overridden with WGQED_SIMD=scalar|avx2 or force_backend().

#include <complex>
#include <span>
#include <string_view>

namespace wgqed::simd {

enum class Backend { scalar, avx2 };

bool backend_supported(Backend backend);
Backend active_backend();
/// Throws ArgumentError when the CPU cannot run `backend`.
void force_backend(Backend backend);
std::string_view backend_name(Backend backend);

/// re + i im = a / (b - i x) for every detuning x.
void lorentz_response(std::span<const double> detuning, double a, double b,
                      std::span<double> re, std::span<double> im);

/// 1 + Re[coeff * a / (b - i x)] for every detuning x.
void weak_intensity(std::span<const double> detuning, double a, double b,
                    std::complex<double> coeff, std::span<double> out);

/// out[i] = sum_k kernel[k] * signal[i + k]. Requires
/// signal.size() >= out.size() + kernel.size() - 1.
void correlate(std::span<const double> signal, std::span<const double> kernel,
               std::span<double> out);

/// Explicit-backend entry points, used by the equivalence tests.
void lorentz_response(Backend backend, std::span<const double> detuning, double a, double b,
                      std::span<double> re, std::span<double> im);
void weak_intensity(Backend backend, std::span<const double> detuning, double a, double b,
                    std::complex<double> coeff, std::span<double> out);
void correlate(Backend backend, std::span<const double> signal, std::span<const double> kernel,
               std::span<double> out);

}  // namespace wgqed::simd
