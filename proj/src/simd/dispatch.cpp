#include <atomic>
#include <cstdlib>
#include <string>

#include "kernels_impl.hpp"
#include "wgqed/core.hpp"
#include "wgqed/simd.hpp"

namespace wgqed::simd {

namespace {

Backend detect() {
  if (const char* env = std::getenv("WGQED_SIMD")) {
    const std::string v(env);
    if (v == "scalar") return Backend::scalar;
    if (v == "avx2" && backend_supported(Backend::avx2)) return Backend::avx2;
  }
  return backend_supported(Backend::avx2) ? Backend::avx2 : Backend::scalar;
}

std::atomic<Backend>& current() {
  static std::atomic<Backend> backend{detect()};
  return backend;
}

void check_sizes(std::size_t a, std::size_t b, const char* what) {
  if (a != b) throw ArgumentError(std::string(what) + ": output length mismatch");
}

}  // namespace

bool backend_supported(Backend backend) {
  switch (backend) {
    case Backend::scalar: return true;
    case Backend::avx2:
#if defined(__x86_64__) || defined(_M_X64)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

Backend active_backend() { return current().load(std::memory_order_relaxed); }

void force_backend(Backend backend) {
  if (!backend_supported(backend))
    throw ArgumentError("SIMD backend " + std::string(backend_name(backend)) + " is not supported on this CPU");
  current().store(backend, std::memory_order_relaxed);
}

std::string_view backend_name(Backend backend) { return backend == Backend::avx2 ? "avx2" : "scalar"; }

void lorentz_response(Backend backend, std::span<const double> x, double a, double b, std::span<double> re,
                      std::span<double> im) {
  check_sizes(x.size(), re.size(), "lorentz_response");
  check_sizes(x.size(), im.size(), "lorentz_response");
  if (backend == Backend::avx2)
    detail::lorentz_response_avx2(x.data(), x.size(), a, b, re.data(), im.data());
  else
    detail::lorentz_response_scalar(x.data(), x.size(), a, b, re.data(), im.data());
}

void weak_intensity(Backend backend, std::span<const double> x, double a, double b, std::complex<double> coeff,
                    std::span<double> out) {
  check_sizes(x.size(), out.size(), "weak_intensity");
  if (backend == Backend::avx2)
    detail::weak_intensity_avx2(x.data(), x.size(), a, b, coeff.real(), coeff.imag(), out.data());
  else
    detail::weak_intensity_scalar(x.data(), x.size(), a, b, coeff.real(), coeff.imag(), out.data());
}

void correlate(Backend backend, std::span<const double> signal, std::span<const double> kernel,
               std::span<double> out) {
  if (out.empty()) return;
  if (kernel.empty()) throw ArgumentError("correlate: empty kernel");
  if (signal.size() < out.size() + kernel.size() - 1) throw ArgumentError("correlate: signal too short");
  if (backend == Backend::avx2)
    detail::correlate_avx2(signal.data(), kernel.data(), kernel.size(), out.data(), out.size());
  else
    detail::correlate_scalar(signal.data(), kernel.data(), kernel.size(), out.data(), out.size());
}

void lorentz_response(std::span<const double> x, double a, double b, std::span<double> re, std::span<double> im) {
  lorentz_response(active_backend(), x, a, b, re, im);
}

void weak_intensity(std::span<const double> x, double a, double b, std::complex<double> coeff,
                    std::span<double> out) {
  weak_intensity(active_backend(), x, a, b, coeff, out);
}

void correlate(std::span<const double> signal, std::span<const double> kernel, std::span<double> out) {
  correlate(active_backend(), signal, kernel, out);
}

}  // namespace wgqed::simd
