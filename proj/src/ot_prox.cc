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

#include "otrir/ot_prox.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "otrir/wright_omega.h"

namespace otrir {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Streaming log-sum-exp that ignores -inf terms.
class LogSumExp {
 public:
  void Add(double x) {
    if (x == -kInf) return;
    if (x == kInf) {
      max_ = kInf;
      return;
    }
    if (max_ == kInf) return;
    if (x <= max_) {
      sum_ += std::exp(x - max_);
    } else {
      sum_ = sum_ * std::exp(max_ - x) + 1.0;
      max_ = x;
    }
  }
  double Value() const {
    if (max_ == -kInf || max_ == kInf) return max_;
    return max_ + std::log(sum_);
  }

 private:
  double max_ = -kInf;
  double sum_ = 0.0;
};

struct BandRange {
  std::size_t lo;
  std::size_t hi;  // inclusive
};

BandRange RangeOf(const CostKernel& kernel, std::size_t k) {
  const std::size_t lo = k >= kernel.reach ? k - kernel.reach : 0;
  const std::size_t hi = std::min(kernel.n - 1, k + kernel.reach);
  return {lo, hi};
}

// log(K exp(scaled_mu))_k for rows with active[k]; other rows untouched.
void RowLogSums(const CostKernel& kernel, std::span<const double> scaled_mu,
                std::span<const double> h0_sq, std::vector<double>* out) {
  out->assign(kernel.n, -kInf);
  for (std::size_t k = 0; k < kernel.n; ++k) {
    if (!(h0_sq[k] > 0.0)) continue;
    const auto [lo, hi] = RangeOf(kernel, k);
    LogSumExp lse;
    for (std::size_t l = lo; l <= hi; ++l)
      lse.Add(kernel.LogK(k, l) + scaled_mu[l]);
    (*out)[k] = lse.Value();
  }
}

// log(K^T exp(scaled_lambda))_l. The cost is symmetric.
void ColLogSums(const CostKernel& kernel, std::span<const double> scaled_lambda,
                std::vector<double>* out) {
  out->assign(kernel.n, -kInf);
  for (std::size_t l = 0; l < kernel.n; ++l) {
    const auto [lo, hi] = RangeOf(kernel, l);
    LogSumExp lse;
    for (std::size_t k = lo; k <= hi; ++k) {
      if (scaled_lambda[k] == -kInf) continue;
      lse.Add(kernel.LogK(l, k) + scaled_lambda[k]);
    }
    (*out)[l] = lse.Value();
  }
}

// mu / theta*eps for one column given log(K^T v) at that column.
double ScaledMu(double u_sq, double log_q, double theta_eps) {
  if (!(u_sq > 0.0)) return 0.0;
  if (log_q == -kInf) return kInf;
  const double c = 1.0 / (4.0 * theta_eps);
  const double rest = -std::log(4.0 * theta_eps) + 0.5 * (std::log(u_sq) - log_q);
  const double xi = c + rest;
  const double omega = WrightOmega(xi);
  // omega - c == rest - log(omega) exactly; the right side avoids
  // cancellation when c is large.
  const double scaled =
      omega > 1.0 ? 2.0 * (rest - std::log(omega)) : 2.0 * omega - 2.0 * c;
  return std::max(0.0, scaled);
}

// 1 / (1 + 2 mu), zero at mu = +inf.
double Shrink(double mu) { return 1.0 / (1.0 + 2.0 * mu); }

// mu / (1 + 2 mu), with the mu = +inf limit.
double SaturatedRatio(double mu) {
  if (mu == kInf) return 0.5;
  return mu / (1.0 + 2.0 * mu);
}

double MaxOf(std::span<const double> v) {
  double m = 0.0;
  for (double e : v) m = std::max(m, e);
  return m;
}

std::vector<double> Scaled(std::span<const double> v, double factor) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] * factor;
  return out;
}

void CheckSize(std::size_t got, std::size_t want, const char* what) {
  if (got != want)
    throw InvalidArgumentError(std::string(what) + ": length " +
                               std::to_string(got) + ", kernel expects " +
                               std::to_string(want));
}

CostKernel MakeKernel(std::size_t n, double epsilon, double cost_scale,
                      bool full) {
  if (n < 1) throw InvalidArgumentError("cost kernel: n must be >= 1");
  if (!(epsilon > 0.0) || !std::isfinite(epsilon))
    throw InvalidArgumentError("cost kernel: epsilon must be > 0");
  if (!(cost_scale > 0.0) || !std::isfinite(cost_scale))
    throw InvalidArgumentError("cost kernel: cost_scale must be > 0");
  CostKernel kernel;
  kernel.n = n;
  kernel.epsilon = epsilon;
  kernel.cost_scale = cost_scale;
  kernel.full = full;
  if (full) {
    kernel.band = n - 1;
  } else {
    const double b = std::ceil(std::sqrt(kKernelLogCutoff * epsilon) / cost_scale);
    const double clamped = std::min(b, static_cast<double>(n - 1));
    kernel.band =
        n == 1 ? 0 : static_cast<std::size_t>(std::max(1.0, clamped));
  }
  kernel.reach = 0;
  const std::size_t width = kernel.width();
  kernel.log_band.assign(n * width, -kInf);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t j = 0; j < width; ++j) {
      const auto l = static_cast<std::ptrdiff_t>(k + j) -
                     static_cast<std::ptrdiff_t>(kernel.band);
      if (l < 0 || l >= static_cast<std::ptrdiff_t>(n)) continue;
      const double ratio = kernel.Cost(k, static_cast<std::size_t>(l)) / epsilon;
      if (!full && ratio > kKernelLogCutoff) continue;
      kernel.log_band[k * width + j] = -ratio;
      const std::size_t dist = j > kernel.band ? j - kernel.band : kernel.band - j;
      kernel.reach = std::max(kernel.reach, dist);
    }
  }
  return kernel;
}

}  // namespace

double CostKernel::Cost(std::size_t k, std::size_t l) const {
  const double d = cost_scale * (static_cast<double>(k) - static_cast<double>(l));
  return d * d;
}

double CostKernel::LogK(std::size_t k, std::size_t l) const {
  const std::size_t dist = k > l ? k - l : l - k;
  if (dist > band) return -kInf;
  return log_band[k * width() + (l + band - k)];
}

CostKernel BuildCostKernel(std::size_t n, double epsilon, double cost_scale) {
  return MakeKernel(n, epsilon, cost_scale, /*full=*/false);
}

CostKernel BuildFullCostKernel(std::size_t n, double epsilon,
                               double cost_scale) {
  return MakeKernel(n, epsilon, cost_scale, /*full=*/true);
}

std::vector<double> Squared(std::span<const double> v) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] * v[i];
  return out;
}

TransportPlan::TransportPlan(CostKernel kernel, std::vector<double> log_v,
                             std::vector<double> log_w)
    : kernel_(std::move(kernel)),
      log_v_(std::move(log_v)),
      log_w_(std::move(log_w)) {
  CheckSize(log_v_.size(), kernel_.n, "transport plan");
  CheckSize(log_w_.size(), kernel_.n, "transport plan");
}

double TransportPlan::LogEntry(std::size_t k, std::size_t l) const {
  const double lk = kernel_.LogK(k, l);
  if (lk == -kInf || log_v_[k] == -kInf) return -kInf;
  return lk + log_v_[k] + log_w_[l];
}

double TransportPlan::Entry(std::size_t k, std::size_t l) const {
  return std::exp(LogEntry(k, l));
}

std::vector<double> TransportPlan::Dense() const {
  const std::size_t n = kernel_.n;
  std::vector<double> m(n * n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const auto [lo, hi] = RangeOf(kernel_, k);
    for (std::size_t l = lo; l <= hi; ++l) m[k * n + l] = Entry(k, l);
  }
  return m;
}

std::vector<double> TransportPlan::RowSums() const {
  std::vector<double> out(kernel_.n, 0.0);
  for (std::size_t k = 0; k < kernel_.n; ++k) {
    const auto [lo, hi] = RangeOf(kernel_, k);
    for (std::size_t l = lo; l <= hi; ++l) out[k] += Entry(k, l);
  }
  return out;
}

std::vector<double> TransportPlan::ColSums() const {
  std::vector<double> out(kernel_.n, 0.0);
  for (std::size_t k = 0; k < kernel_.n; ++k) {
    const auto [lo, hi] = RangeOf(kernel_, k);
    for (std::size_t l = lo; l <= hi; ++l) out[l] += Entry(k, l);
  }
  return out;
}

double TransportPlan::TransportCost() const {
  double cost = 0.0;
  for (std::size_t k = 0; k < kernel_.n; ++k) {
    const auto [lo, hi] = RangeOf(kernel_, k);
    for (std::size_t l = lo; l <= hi; ++l)
      cost += kernel_.Cost(k, l) * Entry(k, l);
  }
  return cost;
}

double TransportPlan::RegularizerValue() const {
  const std::size_t n = kernel_.n;
  double cost = 0.0;
  double entropy = 0.0;
  double nonzero = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const auto [lo, hi] = RangeOf(kernel_, k);
    for (std::size_t l = lo; l <= hi; ++l) {
      const double log_m = LogEntry(k, l);
      if (log_m == -kInf) continue;
      const double m = std::exp(log_m);
      if (m == 0.0) continue;
      cost += kernel_.Cost(k, l) * m;
      entropy += m * log_m - m + 1.0;
      nonzero += 1.0;
    }
  }
  entropy += static_cast<double>(n) * static_cast<double>(n) - nonzero;
  return cost + kernel_.epsilon * entropy;
}

void BcdLambdaUpdate(ProxDualState* state, const CostKernel& kernel,
                     std::span<const double> h0_sq) {
  CheckSize(h0_sq.size(), kernel.n, "lambda update");
  const double te = state->theta_epsilon;
  if (state->mu.size() != kernel.n) state->mu.assign(kernel.n, 0.0);
  std::vector<double> row;
  RowLogSums(kernel, Scaled(state->mu, 1.0 / te), h0_sq, &row);
  state->lambda.assign(kernel.n, -kInf);
  for (std::size_t k = 0; k < kernel.n; ++k)
    if (h0_sq[k] > 0.0) state->lambda[k] = te * (std::log(h0_sq[k]) - row[k]);
}

void BcdMuUpdate(ProxDualState* state, const CostKernel& kernel,
                 std::span<const double> u_sq) {
  CheckSize(u_sq.size(), kernel.n, "mu update");
  CheckSize(state->lambda.size(), kernel.n, "mu update lambda");
  const double te = state->theta_epsilon;
  std::vector<double> col;
  ColLogSums(kernel, Scaled(state->lambda, 1.0 / te), &col);
  state->mu.resize(kernel.n);
  for (std::size_t l = 0; l < kernel.n; ++l)
    state->mu[l] = te * ScaledMu(u_sq[l], col[l], te);
}

double DualObjective(std::span<const double> mu, std::span<const double> lambda,
                     const CostKernel& kernel, std::span<const double> h0_sq,
                     std::span<const double> u_sq, double theta) {
  const double te = theta * kernel.epsilon;
  LogSumExp lse;
  for (std::size_t k = 0; k < kernel.n; ++k) {
    if (lambda[k] == -kInf) continue;
    const auto [lo, hi] = RangeOf(kernel, k);
    for (std::size_t l = lo; l <= hi; ++l)
      lse.Add(kernel.LogK(k, l) + lambda[k] / te + mu[l] / te);
  }
  double value = te * std::exp(lse.Value());
  for (std::size_t k = 0; k < kernel.n; ++k)
    if (h0_sq[k] > 0.0) value -= h0_sq[k] * lambda[k];
  for (std::size_t l = 0; l < kernel.n; ++l)
    if (u_sq[l] > 0.0) value -= u_sq[l] * SaturatedRatio(mu[l]);
  return value;
}

ProxResult ProxOt(std::span<const double> u, std::span<const double> h0,
                  double theta, const CostKernel& kernel,
                  const ProxDualState* warm, const BcdOptions& options) {
  CheckSize(u.size(), kernel.n, "prox input");
  CheckSize(h0.size(), kernel.n, "prior");
  if (!(theta > 0.0) || !std::isfinite(theta))
    throw InvalidArgumentError("prox: theta must be > 0");
  const std::size_t n = kernel.n;
  const double te = theta * kernel.epsilon;
  const std::vector<double> h0_sq = Squared(h0);
  const std::vector<double> u_sq = Squared(u);
  const double row_scale = MaxOf(h0_sq);
  const double u_scale = std::sqrt(MaxOf(u_sq));

  // Iterate on the scaled potentials log v = lambda / te, log w = mu / te.
  std::vector<double> log_w(n, 0.0);
  if (warm != nullptr && warm->mu.size() == n) {
    for (std::size_t l = 0; l < n; ++l) log_w[l] = warm->mu[l] / te;
  }
  std::vector<double> log_v(n, -kInf);
  std::vector<double> row, prev_row, col;

  ProxResult result;
  result.state.theta_epsilon = te;
  double max_change = kInf;
  int it = 0;
  bool converged = false;
  while (true) {
    RowLogSums(kernel, log_w, h0_sq, &row);
    if (it > 0) {
      double residual = 0.0;
      for (std::size_t k = 0; k < n; ++k)
        if (h0_sq[k] > 0.0)
          residual = std::max(
              residual, h0_sq[k] * std::abs(std::expm1(row[k] - prev_row[k])));
      converged = max_change <= options.tol * u_scale &&
                  residual <= options.marginal_tol * row_scale;
    }
    for (std::size_t k = 0; k < n; ++k)
      log_v[k] = h0_sq[k] > 0.0 ? std::log(h0_sq[k]) - row[k] : -kInf;
    if (converged || it >= options.max_iters) break;

    ColLogSums(kernel, log_v, &col);
    max_change = 0.0;
    for (std::size_t l = 0; l < n; ++l) {
      const double next = ScaledMu(u_sq[l], col[l], te);
      // Change of the shrunk tap |u| / (1 + 2 mu).
      const double change =
          std::sqrt(u_sq[l]) * std::abs(Shrink(te * next) - Shrink(te * log_w[l]));
      max_change = std::max(max_change, change);
      log_w[l] = next;
    }
    prev_row.swap(row);
    ++it;
  }

  result.state.converged = converged;
  result.state.bcd_iterations = it;
  result.state.mu.resize(n);
  result.state.lambda.resize(n);
  result.h.resize(n);
  for (std::size_t l = 0; l < n; ++l) {
    result.state.mu[l] = log_w[l] == kInf ? kInf : te * log_w[l];
    result.state.lambda[l] = log_v[l] == -kInf ? -kInf : te * log_v[l];
    result.h[l] = log_w[l] == kInf ? 0.0 : u[l] / (2.0 * result.state.mu[l] + 1.0);
  }
  return result;
}

TransportPlan PlanFromState(const ProxDualState& state,
                            const CostKernel& kernel) {
  CheckSize(state.mu.size(), kernel.n, "plan mu");
  CheckSize(state.lambda.size(), kernel.n, "plan lambda");
  const double te = state.theta_epsilon;
  std::vector<double> log_v(kernel.n), log_w(kernel.n);
  for (std::size_t i = 0; i < kernel.n; ++i) {
    log_v[i] = state.lambda[i] / te;
    log_w[i] = state.mu[i] / te;
  }
  return TransportPlan(kernel, std::move(log_v), std::move(log_w));
}

TransportPlan ExtractTransportPlan(const ProxDualState& state,
                                   const CostKernel& kernel) {
  if (!state.converged)
    throw NumericalError("transport plan requested from an unconverged dual "
                         "state");
  return PlanFromState(state, kernel);
}

bool IsFeasible(std::span<const double> h_sq, std::span<const double> h0_sq,
                const CostKernel& kernel) {
  CheckSize(h_sq.size(), kernel.n, "feasibility h");
  CheckSize(h0_sq.size(), kernel.n, "feasibility h0");
  const std::size_t n = kernel.n;
  const std::size_t reach = kernel.reach;
  double total = 0.0;
  for (double a : h0_sq) total += a;
  const double slack = 1e-12 * std::max(total, 1e-300);
  // Columns left to right; serve each demand from the row whose window
  // closes first (the lowest index still in reach).
  std::vector<double> supply(h0_sq.begin(), h0_sq.end());
  std::size_t first = 0;
  for (std::size_t l = 0; l < n; ++l) {
    while (first < n && first + reach < l) ++first;
    double demand = h_sq[l];
    const std::size_t last = std::min(n - 1, l + reach);
    for (std::size_t k = first; k <= last && demand > 0.0; ++k) {
      const double take = std::min(demand, supply[k]);
      supply[k] -= take;
      demand -= take;
    }
    if (demand > slack) return false;
  }
  return true;
}

SEvaluation EvaluateSDetailed(std::span<const double> h,
                              std::span<const double> h0,
                              const CostKernel& kernel,
                              const SOptions& options) {
  CheckSize(h.size(), kernel.n, "S argument");
  CheckSize(h0.size(), kernel.n, "S prior");
  const std::size_t n = kernel.n;
  const std::vector<double> a = Squared(h0);
  const std::vector<double> b = Squared(h);
  SEvaluation eval;
  if (!IsFeasible(b, a, kernel)) {
    eval.value = kInf;
    eval.feasible = false;
    return eval;
  }
  const double row_scale = MaxOf(a);
  std::vector<double> log_v(n, -kInf), log_w(n, 0.0);
  std::vector<double> row, prev_row, col;
  int it = 0;
  while (true) {
    RowLogSums(kernel, log_w, a, &row);
    if (it > 0) {
      double residual = 0.0;
      for (std::size_t k = 0; k < n; ++k)
        if (a[k] > 0.0)
          residual = std::max(residual,
                              a[k] * std::abs(std::expm1(row[k] - prev_row[k])));
      eval.converged = residual <= options.tol * row_scale;
    }
    for (std::size_t k = 0; k < n; ++k)
      log_v[k] = a[k] > 0.0 ? std::log(a[k]) - row[k] : -kInf;
    if (eval.converged || it >= options.max_iters) break;
    ColLogSums(kernel, log_v, &col);
    for (std::size_t l = 0; l < n; ++l)
      log_w[l] = b[l] > 0.0 ? std::max(0.0, std::log(b[l]) - col[l]) : 0.0;
    prev_row.swap(row);
    ++it;
  }
  eval.iterations = it;
  eval.value = TransportPlan(kernel, log_v, log_w).RegularizerValue();
  return eval;
}

double EvaluateS(std::span<const double> h, std::span<const double> h0,
                 const CostKernel& kernel) {
  return EvaluateSDetailed(h, h0, kernel).value;
}

}  // namespace otrir
