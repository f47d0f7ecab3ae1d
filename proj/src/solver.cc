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

#include "otrir/solver.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "otrir/metrics.h"

namespace otrir {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void CheckPrior(std::span<const double> prior, std::size_t n) {
  if (prior.size() != n)
    throw InvalidArgumentError("regularizer: prior has " +
                               std::to_string(prior.size()) +
                               " taps, estimate has " + std::to_string(n));
}

double SumSq(std::span<const double> v) {
  double s = 0.0;
  for (double e : v) s += e * e;
  return s;
}

}  // namespace

double SoftThreshold(double v, double tau) {
  if (v > tau) return v - tau;
  if (v < -tau) return v + tau;
  return 0.0;
}

Regularizer Regularizer::Tikhonov() {
  Regularizer r;
  r.kind_ = RegularizerKind::kTikhonov;
  return r;
}

Regularizer Regularizer::Lasso() {
  Regularizer r;
  r.kind_ = RegularizerKind::kLasso;
  return r;
}

Regularizer Regularizer::L2Prior(std::vector<double> prior) {
  Regularizer r;
  r.kind_ = RegularizerKind::kL2Prior;
  r.prior_ = std::move(prior);
  return r;
}

Regularizer Regularizer::L1Prior(std::vector<double> prior) {
  Regularizer r;
  r.kind_ = RegularizerKind::kL1Prior;
  r.prior_ = std::move(prior);
  return r;
}

Regularizer Regularizer::OtPrior(std::vector<double> prior, CostKernel kernel) {
  CheckPrior(prior, kernel.n);
  Regularizer r;
  r.kind_ = RegularizerKind::kOtPrior;
  r.prior_ = std::move(prior);
  r.kernel_ = std::move(kernel);
  return r;
}

Regularizer Regularizer::Make(RegularizerKind kind,
                              const EstimationConfig& config,
                              std::span<const double> prior) {
  std::vector<double> p(prior.begin(), prior.end());
  switch (kind) {
    case RegularizerKind::kTikhonov:
      return Tikhonov();
    case RegularizerKind::kLasso:
      return Lasso();
    case RegularizerKind::kL2Prior:
    case RegularizerKind::kL1Prior:
    case RegularizerKind::kOtPrior:
      if (p.empty())
        throw InvalidArgumentError("regularizer '" +
                                   std::string(RegularizerName(kind)) +
                                   "' requires a prior response");
      if (kind == RegularizerKind::kL2Prior) return L2Prior(std::move(p));
      if (kind == RegularizerKind::kL1Prior) return L1Prior(std::move(p));
      {
        CostKernel kernel =
            BuildCostKernel(p.size(), config.epsilon, config.cost_scale);
        return OtPrior(std::move(p), std::move(kernel));
      }
  }
  throw InvalidArgumentError("unknown regularizer kind");
}

bool Regularizer::needs_prior() const {
  return kind_ == RegularizerKind::kL2Prior ||
         kind_ == RegularizerKind::kL1Prior ||
         kind_ == RegularizerKind::kOtPrior;
}

double Regularizer::Value(std::span<const double> h) const {
  if (needs_prior()) CheckPrior(prior_, h.size());
  double s = 0.0;
  switch (kind_) {
    case RegularizerKind::kTikhonov:
      return SumSq(h);
    case RegularizerKind::kLasso:
      for (double v : h) s += std::abs(v);
      return s;
    case RegularizerKind::kL2Prior:
      for (std::size_t i = 0; i < h.size(); ++i)
        s += (h[i] - prior_[i]) * (h[i] - prior_[i]);
      return s;
    case RegularizerKind::kL1Prior:
      for (std::size_t i = 0; i < h.size(); ++i) s += std::abs(h[i] - prior_[i]);
      return s;
    case RegularizerKind::kOtPrior:
      return EvaluateS(h, prior_, *kernel_);
  }
  return s;
}

std::vector<double> ProxRegularizer(const Regularizer& reg,
                                    std::span<const double> u, double tau,
                                    ProxDualState* dual,
                                    const BcdOptions& bcd) {
  if (!(tau > 0.0)) throw InvalidArgumentError("prox: tau must be > 0");
  if (reg.needs_prior()) CheckPrior(reg.prior(), u.size());
  std::vector<double> out(u.size());
  const auto prior = reg.prior();
  switch (reg.kind()) {
    case RegularizerKind::kTikhonov:
      for (std::size_t i = 0; i < u.size(); ++i) out[i] = u[i] / (1.0 + 2.0 * tau);
      break;
    case RegularizerKind::kLasso:
      for (std::size_t i = 0; i < u.size(); ++i) out[i] = SoftThreshold(u[i], tau);
      break;
    case RegularizerKind::kL2Prior:
      for (std::size_t i = 0; i < u.size(); ++i)
        out[i] = (u[i] + 2.0 * tau * prior[i]) / (1.0 + 2.0 * tau);
      break;
    case RegularizerKind::kL1Prior:
      for (std::size_t i = 0; i < u.size(); ++i)
        out[i] = prior[i] + SoftThreshold(u[i] - prior[i], tau);
      break;
    case RegularizerKind::kOtPrior: {
      ProxResult result = ProxOt(u, prior, tau, reg.kernel(), dual, bcd);
      if (dual != nullptr) *dual = std::move(result.state);
      return std::move(result.h);
    }
  }
  return out;
}

PreparedProblem::PreparedProblem(const EstimationProblem& problem,
                                 std::optional<std::size_t> fit_rows)
    : problem_(ValidateProblem(problem)),
      op_(problem.input.samples, problem.rir_length),
      fit_rows_(std::min(fit_rows.value_or(op_.output_length()),
                         op_.output_length())),
      lipschitz_(op_.OperatorNormSq(fit_rows_)) {
  if (fit_rows_ < 1)
    throw InvalidArgumentError("prepared problem: no observations to fit");
}

double PreparedProblem::DataFit(std::span<const double> h) const {
  const std::vector<double> xh = op_.Apply(h);
  const auto& y = problem_.observation.samples;
  double s = 0.0;
  for (std::size_t i = 0; i < fit_rows_; ++i) s += (y[i] - xh[i]) * (y[i] - xh[i]);
  return 0.5 * s;
}

double PreparedProblem::HeldOutResidual(std::span<const double> h) const {
  const std::vector<double> xh = op_.Apply(h);
  const auto& y = problem_.observation.samples;
  double s = 0.0;
  for (std::size_t i = fit_rows_; i < xh.size(); ++i)
    s += (y[i] - xh[i]) * (y[i] - xh[i]);
  return s;
}

SolveReport Solve(const PreparedProblem& prepared, const Regularizer& reg,
                  const EstimationConfig& config,
                  std::span<const double> initial) {
  ValidateConfig(config);
  const std::size_t n = prepared.problem().rir_length;
  if (reg.needs_prior()) CheckPrior(reg.prior(), n);
  if (reg.kind() == RegularizerKind::kOtPrior && reg.kernel().n != n)
    throw InvalidArgumentError("solve: cost kernel size does not match rir");
  if (!initial.empty() && initial.size() != n)
    throw InvalidArgumentError("solve: initial estimate has wrong length");

  const auto& y = prepared.problem().observation.samples;
  const ConvolutionOperator& op = prepared.op();
  const double eta = config.eta;
  const double step = 1.0 / prepared.lipschitz();
  const double tau = step * eta;
  const bool is_ot = reg.kind() == RegularizerKind::kOtPrior;
  // S carries eps * n^2 from the "+1" entropy terms; the stopping rule
  // measures change relative to the h-dependent part only.
  const double offset =
      is_ot ? eta * reg.kernel().epsilon * static_cast<double>(n) *
                  static_cast<double>(n)
            : 0.0;
  BcdOptions bcd;
  bcd.max_iters = config.max_bcd_iters;
  bcd.tol = config.bcd_tol;

  SolveReport report;
  report.lipschitz = prepared.lipschitz();
  std::vector<double> h(n, 0.0);
  if (!initial.empty()) h.assign(initial.begin(), initial.end());
  double objective = prepared.DataFit(h) + eta * reg.Value(h);
  report.objective_trace.push_back(objective);

  ProxDualState dual;
  std::vector<double> z = h;  // extrapolated point (== h without momentum)
  double t = 1.0;
  std::vector<double> u(n);
  for (int it = 1; it <= config.max_outer_iters; ++it) {
    report.outer_iterations = it;
    const std::vector<double> grad = op.DataFitGradient(y, z, prepared.fit_rows());
    for (std::size_t i = 0; i < n; ++i) u[i] = z[i] - step * grad[i];
    std::vector<double> next = ProxRegularizer(reg, u, tau, &dual, bcd);
    double reg_value;
    if (is_ot) {
      report.bcd_iterations_total += dual.bcd_iterations;
      if (!dual.converged) ++report.bcd_unconverged;
      reg_value = PlanFromState(dual, reg.kernel()).RegularizerValue();
    } else {
      reg_value = reg.Value(next);
    }
    const double next_objective = prepared.DataFit(next) + eta * reg_value;
    if (!std::isfinite(next_objective))
      throw NumericalError("solve: objective became non-finite at iteration " +
                           std::to_string(it));

    if (config.use_acceleration && t > 1.0 &&
        next_objective > objective + 1e-15 * std::abs(objective)) {
      // Momentum overshot: drop the step and restart from the last iterate.
      t = 1.0;
      z = h;
      ++report.restarts;
      continue;
    }

    const double change = std::abs(objective - next_objective);
    const double scale = std::max(std::abs(next_objective - offset), 1e-300);
    if (config.use_acceleration) {
      const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
      const double beta = (t - 1.0) / t_next;
      for (std::size_t i = 0; i < n; ++i)
        z[i] = next[i] + beta * (next[i] - h[i]);
      t = t_next;
    } else {
      z = next;
    }
    h = std::move(next);
    objective = next_objective;
    report.objective_trace.push_back(objective);
    if (change <= config.outer_tol * scale) {
      report.converged = true;
      break;
    }
  }
  report.estimate.taps = std::move(h);
  report.estimate.sample_rate_hz = prepared.problem().input.sample_rate_hz;
  return report;
}

SolveReport Solve(const EstimationProblem& problem, const Regularizer& reg,
                  const EstimationConfig& config) {
  return Solve(PreparedProblem(problem), reg, config);
}

std::vector<double> EtaGrid(double lo, double hi, int count) {
  if (!(lo > 0.0) || !(hi > lo) || !std::isfinite(hi))
    throw InvalidArgumentError("eta grid: need 0 < lo < hi");
  if (count < 2) throw InvalidArgumentError("eta grid: count must be >= 2");
  std::vector<double> grid(static_cast<std::size_t>(count));
  const double a = std::log10(lo);
  const double b = std::log10(hi);
  for (int i = 0; i < count; ++i)
    grid[static_cast<std::size_t>(i)] =
        std::pow(10.0, a + (b - a) * static_cast<double>(i) / (count - 1));
  grid.front() = lo;
  grid.back() = hi;
  return grid;
}

EtaSelection SelectEta(std::span<const CvCase> cases, RegularizerKind kind,
                       std::span<const double> grid,
                       const EstimationConfig& config, const CvOptions& cv) {
  if (grid.empty()) throw InvalidArgumentError("select eta: empty grid");
  if (cases.empty()) throw InvalidArgumentError("select eta: no cases");
  const bool holdout = cv.strategy == CvStrategy::kHoldoutResidual;
  if (holdout && !(cv.holdout_fraction > 0.0 && cv.holdout_fraction < 1.0))
    throw InvalidArgumentError("select eta: holdout fraction must be in (0,1)");

  std::vector<PreparedProblem> fit_problems;
  std::vector<Regularizer> regs;
  fit_problems.reserve(cases.size());
  for (const CvCase& c : cases) {
    std::optional<std::size_t> rows;
    if (holdout) {
      const std::size_t m = c.problem.observation.size();
      rows = static_cast<std::size_t>(
          std::floor((1.0 - cv.holdout_fraction) * static_cast<double>(m)));
      if (*rows < 1 || *rows >= m)
        throw InvalidArgumentError("select eta: holdout leaves no fit rows");
    } else if (c.truth.size() != c.problem.rir_length) {
      throw InvalidArgumentError("select eta: oracle strategy needs a true "
                                 "response of rir_length taps");
    }
    fit_problems.emplace_back(c.problem, rows);
    regs.push_back(Regularizer::Make(kind, config, c.prior));
  }

  EtaSelection sel;
  sel.grid.assign(grid.begin(), grid.end());
  sel.scores.assign(grid.size(), kInf);
  double best = kInf;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    EstimationConfig cfg = config;
    cfg.eta = grid[g];
    cfg.regularizer = kind;
    double score = 0.0;
    std::vector<ImpulseResponse> estimates;
    for (std::size_t c = 0; c < cases.size(); ++c) {
      SolveReport r = Solve(fit_problems[c], regs[c], cfg);
      score += holdout ? fit_problems[c].HeldOutResidual(r.estimate.taps)
                       : NmseTerm(r.estimate.taps, cases[c].truth, cv.lowpass);
      estimates.push_back(std::move(r.estimate));
    }
    sel.scores[g] = score;
    if (score < best) {
      best = score;
      sel.best_index = g;
      sel.best_eta = grid[g];
      sel.estimates = std::move(estimates);
    }
  }
  if (holdout) {
    EstimationConfig cfg = config;
    cfg.eta = sel.best_eta;
    cfg.regularizer = kind;
    for (std::size_t c = 0; c < cases.size(); ++c)
      sel.estimates[c] =
          Solve(PreparedProblem(cases[c].problem), regs[c], cfg).estimate;
  }
  return sel;
}

}  // namespace otrir
