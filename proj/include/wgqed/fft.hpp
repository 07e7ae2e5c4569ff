#pragma once

#include <complex>
#include <span>
#include <vector>

namespace wgqed::fft {

/// X_k = sum_j x_j exp(-2 pi i j k / n).
std::vector<std::complex<double>> forward(std::span<const std::complex<double>> x);
/// Inverse of forward(), including the 1/n factor.
std::vector<std::complex<double>> inverse(std::span<const std::complex<double>> x);

/// Full linear convolution (length a.size() + b.size() - 1).
std::vector<double> convolve(std::span<const double> a, std::span<const double> b);

}  // namespace wgqed::fft
