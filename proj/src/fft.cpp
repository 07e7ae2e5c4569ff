#include "wgqed/fft.hpp"

#include <fftw3.h>

#include <memory>
#include <mutex>

#include "wgqed/core.hpp"

namespace wgqed::fft {

namespace {

// FFTW planning is not thread-safe; execution with new-array execute is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};
struct PlanDestroy {
  void operator()(fftw_plan_s* p) const {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(p);
  }
};

std::vector<std::complex<double>> transform(std::span<const std::complex<double>> x, int sign) {
  const int n = static_cast<int>(x.size());
  if (n == 0) return {};
  std::unique_ptr<fftw_complex, FftwFree> buf(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * x.size())));
  if (!buf) throw std::bad_alloc();
  std::unique_ptr<fftw_plan_s, PlanDestroy> plan;
  {
    std::lock_guard lock(planner_mutex());
    plan.reset(fftw_plan_dft_1d(n, buf.get(), buf.get(), sign, FFTW_ESTIMATE));
  }
  if (!plan) throw Error("FFTW failed to create a plan");
  for (int i = 0; i < n; ++i) {
    buf.get()[i][0] = x[static_cast<std::size_t>(i)].real();
    buf.get()[i][1] = x[static_cast<std::size_t>(i)].imag();
  }
  fftw_execute(plan.get());
  std::vector<std::complex<double>> out(x.size());
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = {buf.get()[i][0], buf.get()[i][1]};
  return out;
}

}  // namespace

std::vector<std::complex<double>> forward(std::span<const std::complex<double>> x) {
  return transform(x, FFTW_FORWARD);
}

std::vector<std::complex<double>> inverse(std::span<const std::complex<double>> x) {
  auto out = transform(x, FFTW_BACKWARD);
  const double scale = out.empty() ? 1.0 : 1.0 / static_cast<double>(out.size());
  for (auto& v : out) v *= scale;
  return out;
}

std::vector<double> convolve(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) return {};
  const std::size_t n = a.size() + b.size() - 1;
  std::vector<std::complex<double>> fa(n), fb(n);
  for (std::size_t i = 0; i < a.size(); ++i) fa[i] = a[i];
  for (std::size_t i = 0; i < b.size(); ++i) fb[i] = b[i];
  auto A = forward(fa);
  auto B = forward(fb);
  for (std::size_t i = 0; i < n; ++i) A[i] *= B[i];
  auto c = inverse(A);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = c[i].real();
  return out;
}

}  // namespace wgqed::fft
