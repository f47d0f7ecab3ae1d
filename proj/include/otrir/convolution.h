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

#ifndef OTRIR_CONVOLUTION_H_
#define OTRIR_CONVOLUTION_H_

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace otrir {

// Full linear convolution with a fixed input x, viewed as a linear map from
// R^{rir_length} to R^{input_length + rir_length - 1}. Immutable after
// construction; Apply/ApplyAdjoint are reentrant.
//
// Outputs of length >= 32 go through a real FFT of size next_pow2(output);
// shorter ones use the direct sum.
class ConvolutionOperator {
 public:
  ConvolutionOperator(std::span<const double> input, std::size_t rir_length);

  std::size_t input_length() const { return input_.size(); }
  std::size_t rir_length() const { return rir_length_; }
  std::size_t output_length() const { return input_.size() + rir_length_ - 1; }
  bool uses_fft() const { return fft_size_ != 0; }

  // x * h. Throws InvalidArgumentError unless h.size() == rir_length().
  std::vector<double> Apply(std::span<const double> h) const;

  // X^T r, i.e. the cross-correlation of r with x at lags 0..rir_length-1.
  std::vector<double> ApplyAdjoint(std::span<const double> r) const;

  // X^T (X h - y). When fit_rows < output_length() only the first fit_rows
  // residual entries enter (the rest are treated as unobserved).
  std::vector<double> DataFitGradient(std::span<const double> y,
                                      std::span<const double> h,
                                      std::size_t fit_rows) const;
  std::vector<double> DataFitGradient(std::span<const double> y,
                                      std::span<const double> h) const {
    return DataFitGradient(y, h, output_length());
  }

  // ||P X||^2 by power iteration on X^T P X, where P keeps the first
  // fit_rows outputs. Throws InvalidArgumentError for an all-zero input.
  double OperatorNormSq(std::size_t fit_rows) const;
  double OperatorNormSq() const { return OperatorNormSq(output_length()); }

 private:
  struct FftPlans;

  std::vector<double> input_;
  std::size_t rir_length_;
  std::size_t fft_size_ = 0;
  std::vector<std::complex<double>> spectrum_;
  std::shared_ptr<const FftPlans> plans_;
};

// Reference O(N * N_h) full convolution.
std::vector<double> DirectConvolve(std::span<const double> a,
                                   std::span<const double> b);

}  // namespace otrir

#endif  // OTRIR_CONVOLUTION_H_
