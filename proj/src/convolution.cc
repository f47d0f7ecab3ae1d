// Copyright 2026 The otrir Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "otrir/convolution.h"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <string>

#include "otrir/types.h"

namespace otrir {
namespace {

constexpr std::size_t kDirectThreshold = 32;
constexpr int kMinPowerIters = 50;
constexpr int kMaxPowerIters = 20000;
constexpr double kPowerTol = 1e-12;

// FFTW planning is not thread-safe; execution with the new-array interface is.
std::mutex& PlannerMutex() {
  static std::mutex mutex;
  return mutex;
}

std::size_t NextPow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

template <typename T>
struct FftwDeleter {
  void operator()(T* p) const { fftw_free(p); }
};
using RealBuffer = std::unique_ptr<double[], FftwDeleter<double>>;
using ComplexBuffer =
    std::unique_ptr<fftw_complex[], FftwDeleter<fftw_complex>>;

RealBuffer AllocReal(std::size_t n) {
  return RealBuffer(static_cast<double*>(fftw_malloc(sizeof(double) * n)));
}
ComplexBuffer AllocComplex(std::size_t n) {
  return ComplexBuffer(
      static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n)));
}

double Dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

struct ConvolutionOperator::FftPlans {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
  std::size_t size = 0;

  explicit FftPlans(std::size_t n) : size(n) {
    std::lock_guard<std::mutex> lock(PlannerMutex());
    RealBuffer real = AllocReal(n);
    ComplexBuffer cplx = AllocComplex(n / 2 + 1);
    forward = fftw_plan_dft_r2c_1d(static_cast<int>(n), real.get(), cplx.get(),
                                   FFTW_ESTIMATE);
    backward = fftw_plan_dft_c2r_1d(static_cast<int>(n), cplx.get(),
                                    real.get(), FFTW_ESTIMATE);
  }
  ~FftPlans() {
    std::lock_guard<std::mutex> lock(PlannerMutex());
    fftw_destroy_plan(forward);
    fftw_destroy_plan(backward);
  }
  FftPlans(const FftPlans&) = delete;
  FftPlans& operator=(const FftPlans&) = delete;
};

std::vector<double> DirectConvolve(std::span<const double> a,
                                   std::span<const double> b) {
  if (a.empty() || b.empty()) return {};
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

ConvolutionOperator::ConvolutionOperator(std::span<const double> input,
                                         std::size_t rir_length)
    : input_(input.begin(), input.end()), rir_length_(rir_length) {
  if (input_.empty()) throw InvalidArgumentError("convolution: empty input");
  if (rir_length_ < 1)
    throw InvalidArgumentError("convolution: rir_length must be >= 1");
  if (output_length() < kDirectThreshold) return;

  fft_size_ = NextPow2(output_length());
  plans_ = std::make_shared<const FftPlans>(fft_size_);
  RealBuffer real = AllocReal(fft_size_);
  ComplexBuffer cplx = AllocComplex(fft_size_ / 2 + 1);
  std::fill(real.get(), real.get() + fft_size_, 0.0);
  std::copy(input_.begin(), input_.end(), real.get());
  fftw_execute_dft_r2c(plans_->forward, real.get(), cplx.get());
  spectrum_.resize(fft_size_ / 2 + 1);
  for (std::size_t i = 0; i < spectrum_.size(); ++i)
    spectrum_[i] = {cplx[i][0], cplx[i][1]};
}

std::vector<double> ConvolutionOperator::Apply(
    std::span<const double> h) const {
  if (h.size() != rir_length_)
    throw InvalidArgumentError("convolution: expected " +
                               std::to_string(rir_length_) + " taps, got " +
                               std::to_string(h.size()));
  if (!uses_fft()) return DirectConvolve(input_, h);

  RealBuffer real = AllocReal(fft_size_);
  ComplexBuffer cplx = AllocComplex(fft_size_ / 2 + 1);
  std::fill(real.get(), real.get() + fft_size_, 0.0);
  std::copy(h.begin(), h.end(), real.get());
  fftw_execute_dft_r2c(plans_->forward, real.get(), cplx.get());
  for (std::size_t i = 0; i < spectrum_.size(); ++i) {
    const std::complex<double> z =
        std::complex<double>(cplx[i][0], cplx[i][1]) * spectrum_[i];
    cplx[i][0] = z.real();
    cplx[i][1] = z.imag();
  }
  fftw_execute_dft_c2r(plans_->backward, cplx.get(), real.get());
  const double scale = 1.0 / static_cast<double>(fft_size_);
  std::vector<double> out(output_length());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = real[i] * scale;
  return out;
}

std::vector<double> ConvolutionOperator::ApplyAdjoint(
    std::span<const double> r) const {
  if (r.size() != output_length())
    throw InvalidArgumentError("convolution adjoint: expected " +
                               std::to_string(output_length()) +
                               " samples, got " + std::to_string(r.size()));
  std::vector<double> out(rir_length_, 0.0);
  if (!uses_fft()) {
    for (std::size_t k = 0; k < rir_length_; ++k) {
      double s = 0.0;
      for (std::size_t n = 0; n < input_.size(); ++n) s += r[n + k] * input_[n];
      out[k] = s;
    }
    return out;
  }

  RealBuffer real = AllocReal(fft_size_);
  ComplexBuffer cplx = AllocComplex(fft_size_ / 2 + 1);
  std::fill(real.get(), real.get() + fft_size_, 0.0);
  std::copy(r.begin(), r.end(), real.get());
  fftw_execute_dft_r2c(plans_->forward, real.get(), cplx.get());
  for (std::size_t i = 0; i < spectrum_.size(); ++i) {
    const std::complex<double> z = std::complex<double>(cplx[i][0], cplx[i][1]) *
                                   std::conj(spectrum_[i]);
    cplx[i][0] = z.real();
    cplx[i][1] = z.imag();
  }
  fftw_execute_dft_c2r(plans_->backward, cplx.get(), real.get());
  const double scale = 1.0 / static_cast<double>(fft_size_);
  for (std::size_t k = 0; k < rir_length_; ++k) out[k] = real[k] * scale;
  return out;
}

std::vector<double> ConvolutionOperator::DataFitGradient(
    std::span<const double> y, std::span<const double> h,
    std::size_t fit_rows) const {
  if (y.size() != output_length())
    throw InvalidArgumentError("data fit: observation length " +
                               std::to_string(y.size()) + ", expected " +
                               std::to_string(output_length()));
  std::vector<double> residual = Apply(h);
  for (std::size_t i = 0; i < residual.size(); ++i)
    residual[i] = i < fit_rows ? residual[i] - y[i] : 0.0;
  return ApplyAdjoint(residual);
}

double ConvolutionOperator::OperatorNormSq(std::size_t fit_rows) const {
  if (std::all_of(input_.begin(), input_.end(),
                  [](double v) { return v == 0.0; }))
    throw InvalidArgumentError("operator norm: input signal is all zeros");
  fit_rows = std::min(fit_rows, output_length());

  // Deterministic start with components along every eigenvector.
  std::vector<double> v(rir_length_);
  for (std::size_t i = 0; i < v.size(); ++i)
    v[i] = 1.0 + 0.5 * std::sin(1.618 * static_cast<double>(i) + 0.3);
  double norm = std::sqrt(Dot(v, v));
  for (double& e : v) e /= norm;

  double rayleigh = 0.0;
  for (int it = 0; it < kMaxPowerIters; ++it) {
    std::vector<double> xv = Apply(v);
    for (std::size_t i = fit_rows; i < xv.size(); ++i) xv[i] = 0.0;
    std::vector<double> w = ApplyAdjoint(xv);
    const double next = Dot(v, w);
    norm = std::sqrt(Dot(w, w));
    if (norm == 0.0)
      throw InvalidArgumentError("operator norm: operator is zero on the fit "
                                 "rows");
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = w[i] / norm;
    const bool settled = std::abs(next - rayleigh) <= kPowerTol * next;
    rayleigh = next;
    if (it >= kMinPowerIters && settled) break;
  }
  return rayleigh;
}

}  // namespace otrir
