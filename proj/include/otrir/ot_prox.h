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

// Entropic optimal-transport prior on the energy profile of an impulse
// response:
//
//   S(h, h0) = min_{M >= 0}  <C, M> + eps * sum(M log M - M + 1)
//              s.t.  M 1 = h0^2,  M^T 1 >= h^2,
//
// with delay cost C[k][l] = (s * (k - l))^2, and the proximal operator of
// theta * S(., h0). The prox is computed on the dual by alternating exact
// minimization over the row potential lambda and the column potential mu:
//
//   lambda = theta*eps * (log h0^2 - log(K w)),
//   mu     = 2*theta*eps * (omega(xi) - 1/(4*theta*eps))_+,
//   xi     = 1/(4*theta*eps) - log(4*theta*eps) + (log u^2 - log(K^T v)) / 2,
//
// where v = exp(lambda / (theta*eps)), w = exp(mu / (theta*eps)),
// K = exp(-C / eps) and omega is the Wright omega function. The result is
// h = u / (2 mu + 1). Every kernel product is a log-sum-exp over a band.

#ifndef OTRIR_OT_PROX_H_
#define OTRIR_OT_PROX_H_

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "otrir/types.h"

namespace otrir {

// Entries with C / eps above this are dropped from the kernel (K < 1e-20).
inline constexpr double kKernelLogCutoff = 46.0;

// Banded log-kernel -C / eps. Entry (k, l) is stored for |k - l| <= band;
// truncated entries hold -inf.
struct CostKernel {
  std::size_t n = 0;
  double epsilon = 0.1;
  double cost_scale = 1.0;
  std::size_t band = 0;
  // Largest |k - l| whose entry is kept (<= band).
  std::size_t reach = 0;
  // Debug path: band = n - 1 and no truncation.
  bool full = false;
  std::vector<double> log_band;  // n rows of (2 * band + 1) entries.

  std::size_t width() const { return 2 * band + 1; }
  double Cost(std::size_t k, std::size_t l) const;
  // -C[k][l] / eps, or -inf when outside the kept band.
  double LogK(std::size_t k, std::size_t l) const;
};

// band = ceil(sqrt(46 * eps) / s) clamped to [1, n - 1].
CostKernel BuildCostKernel(std::size_t n, double epsilon, double cost_scale);
// Untruncated kernel, for oracle checks on small n.
CostKernel BuildFullCostKernel(std::size_t n, double epsilon,
                               double cost_scale);

// Dual variables (mu, lambda) of the prox problem at a given theta*eps.
// lambda[k] = -inf where h0[k] == 0. mu[l] = +inf marks a column that no
// prior mass can reach; the prox then pins h[l] to zero.
struct ProxDualState {
  std::vector<double> mu;
  std::vector<double> lambda;
  double theta_epsilon = 0.0;
  bool converged = false;
  int bcd_iterations = 0;
};

struct BcdOptions {
  int max_iters = 500;
  // Stop when no output tap |u| / (1 + 2 mu) moves by more than
  // tol * max|u| in one sweep ...
  double tol = 1e-9;
  // ... and the row-marginal residual is <= marginal_tol * max(h0^2).
  double marginal_tol = 1e-8;
};

// M = diag(v) K diag(w), kept as log-factors and realized on demand.
class TransportPlan {
 public:
  TransportPlan(CostKernel kernel, std::vector<double> log_v,
                std::vector<double> log_w);

  const CostKernel& kernel() const { return kernel_; }
  std::span<const double> log_v() const { return log_v_; }
  std::span<const double> log_w() const { return log_w_; }

  double Entry(std::size_t k, std::size_t l) const;
  // Row-major n x n.
  std::vector<double> Dense() const;
  std::vector<double> RowSums() const;
  std::vector<double> ColSums() const;
  // <C, M> + eps * D(M), summed over all n^2 entries (dropped ones count 1).
  double RegularizerValue() const;
  double TransportCost() const;

 private:
  double LogEntry(std::size_t k, std::size_t l) const;

  CostKernel kernel_;
  std::vector<double> log_v_;
  std::vector<double> log_w_;
};

std::vector<double> Squared(std::span<const double> v);

// Exact minimization of the dual over lambda with mu held fixed. Writes
// state->lambda.
void BcdLambdaUpdate(ProxDualState* state, const CostKernel& kernel,
                     std::span<const double> h0_sq);

// Exact minimization of the dual over mu >= 0 with lambda fixed. Writes
// state->mu. u_sq[l] == 0 gives mu[l] = 0.
void BcdMuUpdate(ProxDualState* state, const CostKernel& kernel,
                 std::span<const double> u_sq);

// theta*eps <K, v w^T> - <h0^2, lambda> - <u^2, mu / (1 + 2 mu)>.
double DualObjective(std::span<const double> mu, std::span<const double> lambda,
                     const CostKernel& kernel, std::span<const double> h0_sq,
                     std::span<const double> u_sq, double theta);

struct ProxResult {
  std::vector<double> h;
  ProxDualState state;
};

// prox_{theta S(., h0)}(u), starting from warm->mu when given (mu = 0
// otherwise). Non-convergence within max_iters returns the last
// iterate with state.converged == false.
ProxResult ProxOt(std::span<const double> u, std::span<const double> h0,
                  double theta, const CostKernel& kernel,
                  const ProxDualState* warm, const BcdOptions& options = {});

// Plan of a converged prox state. Throws NumericalError if not converged.
TransportPlan ExtractTransportPlan(const ProxDualState& state,
                                   const CostKernel& kernel);

// Plan from any state (no convergence requirement).
TransportPlan PlanFromState(const ProxDualState& state,
                            const CostKernel& kernel);

// True if some M >= 0 inside the kernel band has M 1 = h0^2 and
// M^T 1 >= h^2.
bool IsFeasible(std::span<const double> h_sq, std::span<const double> h0_sq,
                const CostKernel& kernel);

struct SEvaluation {
  double value = 0.0;
  bool feasible = true;
  bool converged = false;
  int iterations = 0;
};

struct SOptions {
  int max_iters = 200000;
  double tol = 1e-11;
};

// S(h, h0) by dual ascent; value is the primal objective of the realized
// plan. Infeasible h gives value = +inf and feasible = false.
SEvaluation EvaluateSDetailed(std::span<const double> h,
                              std::span<const double> h0,
                              const CostKernel& kernel,
                              const SOptions& options = {});
double EvaluateS(std::span<const double> h, std::span<const double> h0,
                 const CostKernel& kernel);

}  // namespace otrir

#endif  // OTRIR_OT_PROX_H_
