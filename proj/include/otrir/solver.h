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

// Regularized deconvolution
//
//   min_h  1/2 ||y - x * h||^2 + eta * R(h)
//
// by forward-backward splitting with stepsize 1/||X||^2, optionally with
// momentum (restarted whenever the objective would increase).

#ifndef OTRIR_SOLVER_H_
#define OTRIR_SOLVER_H_

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "otrir/convolution.h"
#include "otrir/ot_prox.h"
#include "otrir/types.h"

namespace otrir {

class Regularizer {
 public:
  static Regularizer Tikhonov();
  static Regularizer Lasso();
  static Regularizer L2Prior(std::vector<double> prior);
  static Regularizer L1Prior(std::vector<double> prior);
  static Regularizer OtPrior(std::vector<double> prior, CostKernel kernel);
  // Builds `kind` from a config; prior is required for the prior kinds.
  static Regularizer Make(RegularizerKind kind, const EstimationConfig& config,
                          std::span<const double> prior);

  RegularizerKind kind() const { return kind_; }
  std::span<const double> prior() const { return prior_; }
  const CostKernel& kernel() const { return *kernel_; }
  bool needs_prior() const;

  // R(h). For the OT prior this is S(h, h0) (+inf when infeasible).
  double Value(std::span<const double> h) const;

 private:
  RegularizerKind kind_ = RegularizerKind::kTikhonov;
  std::vector<double> prior_;
  std::optional<CostKernel> kernel_;
};

// prox_{tau R}(u).
//   Tikhonov  u / (1 + 2 tau)
//   Lasso     soft(u, tau)
//   L2Prior   (u + 2 tau h0) / (1 + 2 tau)
//   L1Prior   h0 + soft(u - h0, tau)
//   OtPrior   ProxOt with theta = tau; `dual` is used as warm start and
//             receives the new state.
std::vector<double> ProxRegularizer(const Regularizer& reg,
                                    std::span<const double> u, double tau,
                                    ProxDualState* dual = nullptr,
                                    const BcdOptions& bcd = {});

double SoftThreshold(double v, double tau);

struct SolveReport {
  ImpulseResponse estimate;
  // Objective after each outer iteration; entry 0 is the initial point.
  std::vector<double> objective_trace;
  int outer_iterations = 0;
  long bcd_iterations_total = 0;
  int bcd_unconverged = 0;
  int restarts = 0;
  bool converged = false;
  double lipschitz = 0.0;
};

// A problem with its convolution operator and Lipschitz constant, reusable
// across regularizers and eta values. fit_rows < observation length keeps
// only the leading observations in the data term.
class PreparedProblem {
 public:
  explicit PreparedProblem(const EstimationProblem& problem,
                           std::optional<std::size_t> fit_rows = std::nullopt);

  const EstimationProblem& problem() const { return problem_; }
  const ConvolutionOperator& op() const { return op_; }
  std::size_t fit_rows() const { return fit_rows_; }
  double lipschitz() const { return lipschitz_; }

  // 1/2 ||P (y - X h)||^2 over the fit rows.
  double DataFit(std::span<const double> h) const;
  // Squared residual over the rows excluded from the fit.
  double HeldOutResidual(std::span<const double> h) const;

 private:
  EstimationProblem problem_;
  ConvolutionOperator op_;
  std::size_t fit_rows_;
  double lipschitz_;
};

SolveReport Solve(const PreparedProblem& prepared, const Regularizer& reg,
                  const EstimationConfig& config,
                  std::span<const double> initial = {});
SolveReport Solve(const EstimationProblem& problem, const Regularizer& reg,
                  const EstimationConfig& config);

// count log-spaced values from lo to hi inclusive.
std::vector<double> EtaGrid(double lo = 1e-6, double hi = 1e6, int count = 30);

enum class CvStrategy { kOracleNmse, kHoldoutResidual };

struct CvOptions {
  CvStrategy strategy = CvStrategy::kOracleNmse;
  // Low-pass applied before the oracle NMSE score; empty = none.
  std::vector<double> lowpass;
  // Fraction of trailing observations held out for kHoldoutResidual.
  double holdout_fraction = 0.25;
};

// One realization for eta selection. truth is needed by kOracleNmse, prior
// by the prior-based regularizers.
struct CvCase {
  EstimationProblem problem;
  std::vector<double> truth;
  std::vector<double> prior;
};

struct EtaSelection {
  double best_eta = 0.0;
  std::size_t best_index = 0;
  std::vector<double> grid;
  // Summed score over cases, per grid value.
  std::vector<double> scores;
  // Estimates at best_eta, one per case (refit on all observations for
  // the holdout strategy).
  std::vector<ImpulseResponse> estimates;
};

EtaSelection SelectEta(std::span<const CvCase> cases, RegularizerKind kind,
                       std::span<const double> grid,
                       const EstimationConfig& config, const CvOptions& cv);

}  // namespace otrir

#endif  // OTRIR_SOLVER_H_
