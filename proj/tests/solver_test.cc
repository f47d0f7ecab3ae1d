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

#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "oracles.h"
#include "otrir/metrics.h"
#include "otrir/ot_prox.h"
#include "otrir/solver.h"

namespace otrir {
namespace {

EstimationProblem MakeProblem(const std::vector<double>& x,
                              const std::vector<double>& h, double noise,
                              std::mt19937_64& rng) {
  EstimationProblem p;
  p.input.samples = x;
  p.rir_length = h.size();
  p.observation.samples = DirectConvolve(x, h);
  std::normal_distribution<double> d(0.0, noise);
  if (noise > 0.0)
    for (double& v : p.observation.samples) v += d(rng);
  return p;
}

std::vector<Regularizer> AllRegularizers(const std::vector<double>& prior,
                                         double eps, double cost_scale) {
  return {Regularizer::Tikhonov(), Regularizer::Lasso(),
          Regularizer::L2Prior(prior), Regularizer::L1Prior(prior),
          Regularizer::OtPrior(prior,
                               BuildCostKernel(prior.size(), eps, cost_scale))};
}

TEST_CASE("prox closed forms") {
  CHECK(ProxRegularizer(Regularizer::Lasso(), std::vector<double>{1.5}, 1.0) ==
        std::vector<double>{0.5});
  CHECK(ProxRegularizer(Regularizer::Lasso(), std::vector<double>{-0.3}, 1.0) ==
        std::vector<double>{0.0});
  CHECK(ProxRegularizer(Regularizer::Tikhonov(), std::vector<double>{2.0}, 0.5) ==
        std::vector<double>{1.0});
  const std::vector<double> h0 = {0.3, -0.7, 1.1};
  for (double tau : {0.01, 1.0, 100.0}) {
    const auto p = ProxRegularizer(Regularizer::L2Prior(h0), h0, tau);
    CHECK(oracle::MaxAbsDiff(p, h0) <= 1e-15);
  }
  const auto l1 = ProxRegularizer(Regularizer::L1Prior(h0),
                                  std::vector<double>{1.3, -0.7, 0.0}, 0.5);
  CHECK(l1[0] == doctest::Approx(0.8));
  CHECK(l1[1] == doctest::Approx(-0.7));
  CHECK(l1[2] == doctest::Approx(0.5));
  CHECK_THROWS_AS(ProxRegularizer(Regularizer::L2Prior(h0),
                                  std::vector<double>{1.0, 2.0}, 1.0),
                  InvalidArgumentError);
}

TEST_CASE("prior-based regularizers need a prior") {
  EstimationConfig c;
  CHECK_THROWS_AS(Regularizer::Make(RegularizerKind::kOtPrior, c, {}),
                  InvalidArgumentError);
  CHECK_THROWS_AS(Regularizer::Make(RegularizerKind::kL1Prior, c, {}),
                  InvalidArgumentError);
  CHECK_NOTHROW(Regularizer::Make(RegularizerKind::kTikhonov, c, {}));
}

TEST_CASE("proximal inequality against random candidates") {
  std::mt19937_64 rng(41);
  const std::size_t n = 6;
  const auto prior = oracle::UniformVector(n, rng, 0.3, 1.0);
  for (const Regularizer& reg : AllRegularizers(prior, 0.5, 0.5)) {
    for (double tau : {0.1, 1.0}) {
      const auto u = oracle::RandomVector(n, rng, 0.8);
      BcdOptions tight;
      tight.max_iters = 100000;
      tight.tol = 1e-13;
      tight.marginal_tol = 1e-13;
      ProxDualState dual;
      const auto p = ProxRegularizer(reg, u, tau, &dual, tight);
      auto value = [&](const std::vector<double>& z) {
        double d = 0.0;
        for (std::size_t i = 0; i < n; ++i) d += (z[i] - u[i]) * (z[i] - u[i]);
        return tau * reg.Value(z) + 0.5 * d;
      };
      const double at_p = value(p);
      REQUIRE(std::isfinite(at_p));
      for (int trial = 0; trial < 100; ++trial) {
        auto z = p;
        const double spread = trial < 50 ? 0.05 : 0.5;
        for (double& v : z) v += spread * oracle::RandomVector(1, rng)[0];
        if (reg.kind() == RegularizerKind::kOtPrior)
          for (double& v : z) v *= 0.9;
        CHECK(at_p <= value(z) + 1e-9 * std::abs(at_p));
      }
    }
  }
}

TEST_CASE("eta grid") {
  const auto g = EtaGrid();
  REQUIRE(g.size() == 30);
  CHECK(g.front() == 1e-6);
  CHECK(g.back() == 1e6);
  for (std::size_t i = 1; i + 1 < g.size(); ++i)
    CHECK(g[i + 1] / g[i] == doctest::Approx(g[1] / g[0]).epsilon(1e-12));
  const auto three = EtaGrid(1.0, 100.0, 3);
  CHECK(three[0] == 1.0);
  CHECK(three[1] == doctest::Approx(10.0).epsilon(1e-14));
  CHECK(three[2] == 100.0);
  CHECK(EtaGrid(0.5, 2.0, 2) == std::vector<double>{0.5, 2.0});
  CHECK_THROWS_AS(EtaGrid(1.0, 1.0, 5), InvalidArgumentError);
  CHECK_THROWS_AS(EtaGrid(-1.0, 1.0, 5), InvalidArgumentError);
  CHECK_THROWS_AS(EtaGrid(1.0, 2.0, 1), InvalidArgumentError);
}

TEST_CASE("vanishing eta reproduces least squares for every regularizer") {
  std::mt19937_64 rng(42);
  const auto x = oracle::RandomVector(512, rng);
  const auto h = oracle::RandomVector(16, rng, 0.5);
  const EstimationProblem p = MakeProblem(x, h, 0.0, rng);
  const Eigen::MatrixXd X = oracle::ConvolutionMatrix(x, 16);
  const auto ls = oracle::ToStd(
      X.colPivHouseholderQr().solve(oracle::ToEigen(p.observation.samples)));
  std::vector<double> prior(16);
  for (std::size_t i = 0; i < 16; ++i) prior[i] = 2.0 * h[i] + 0.1;
  EstimationConfig cfg;
  cfg.eta = 1e-12;
  for (const Regularizer& reg : AllRegularizers(prior, 0.1, 1.0)) {
    const SolveReport r = Solve(p, reg, cfg);
    CHECK(oracle::Norm(r.estimate.taps) > 0.0);
    std::vector<double> diff(16);
    for (std::size_t i = 0; i < 16; ++i) diff[i] = r.estimate.taps[i] - ls[i];
    CHECK(oracle::Norm(diff) <= 1e-3 * oracle::Norm(ls));
  }
}

TEST_CASE("identity operator with Tikhonov gives y / (1 + 2 eta)") {
  EstimationProblem p;
  p.input.samples = {1.0};
  p.observation.samples = {0.5, -1.0, 2.0, 0.25};
  p.rir_length = 4;
  EstimationConfig cfg;
  cfg.eta = 0.7;
  cfg.outer_tol = 1e-14;
  const SolveReport r = Solve(p, Regularizer::Tikhonov(), cfg);
  for (std::size_t i = 0; i < 4; ++i)
    CHECK(r.estimate.taps[i] ==
          doctest::Approx(p.observation.samples[i] / 2.4).epsilon(1e-10));
}

TEST_CASE("non-accelerated objective traces never increase") {
  std::mt19937_64 rng(43);
  const auto x = oracle::RandomVector(24, rng);
  const auto h = oracle::RandomVector(10, rng, 0.5);
  const EstimationProblem p = MakeProblem(x, h, 0.1, rng);
  auto prior = h;
  for (double& v : prior) v += 0.1;
  EstimationConfig cfg;
  cfg.eta = 0.5;
  cfg.max_outer_iters = 300;
  for (const Regularizer& reg : AllRegularizers(prior, 0.5, 0.5)) {
    const SolveReport r = Solve(p, reg, cfg);
    for (std::size_t i = 1; i < r.objective_trace.size(); ++i) {
      CHECK(std::isfinite(r.objective_trace[i]));
      CHECK(r.objective_trace[i] <= r.objective_trace[i - 1] +
                                        1e-9 * std::abs(r.objective_trace[i - 1]));
    }
  }
}

TEST_CASE("accelerated and plain runs reach the same objective") {
  std::mt19937_64 rng(44);
  const auto x = oracle::RandomVector(24, rng);
  const auto h = oracle::RandomVector(10, rng, 0.5);
  const EstimationProblem p = MakeProblem(x, h, 0.1, rng);
  auto prior = h;
  for (double& v : prior) v = 0.8 * v + 0.05;
  EstimationConfig cfg;
  cfg.eta = 0.3;
  cfg.outer_tol = 1e-12;
  cfg.max_outer_iters = 20000;
  for (const Regularizer& reg : AllRegularizers(prior, 0.5, 0.5)) {
    const SolveReport plain = Solve(p, reg, cfg);
    EstimationConfig acc = cfg;
    acc.use_acceleration = true;
    const SolveReport fast = Solve(p, reg, acc);
    const double a = plain.objective_trace.back();
    const double b = fast.objective_trace.back();
    CHECK(std::abs(a - b) <= 1e-5 * std::abs(a));
  }
}

TEST_CASE("OT solve agrees with a long reference run") {
  std::mt19937_64 rng(45);
  const auto x = oracle::RandomVector(16, rng);
  const auto h = oracle::RandomVector(8, rng, 0.5);
  const EstimationProblem p = MakeProblem(x, h, 0.05, rng);
  auto prior = h;
  for (double& v : prior) v = std::abs(v) + 0.05;
  const Regularizer reg =
      Regularizer::OtPrior(prior, BuildCostKernel(8, 0.1, 1.0));
  EstimationConfig cfg;
  cfg.eta = 0.2;
  const SolveReport r = Solve(p, reg, cfg);
  EstimationConfig ref_cfg = cfg;
  ref_cfg.max_outer_iters = 100000;
  ref_cfg.outer_tol = 1e-15;
  ref_cfg.bcd_tol = 1e-13;
  ref_cfg.max_bcd_iters = 5000;
  const SolveReport ref = Solve(p, reg, ref_cfg);
  const double a = r.objective_trace.back(), b = ref.objective_trace.back();
  const double offset = cfg.eta * 0.1 * 64.0;
  CHECK(std::abs(a - b) <= 1e-6 * std::abs(b - offset));
}

TEST_CASE("a first-order optimal start is returned unchanged") {
  std::mt19937_64 rng(46);
  const auto x = oracle::RandomVector(20, rng);
  const auto h = oracle::RandomVector(6, rng, 0.5);
  const EstimationProblem p = MakeProblem(x, h, 0.1, rng);
  EstimationConfig cfg;
  cfg.eta = 0.4;
  cfg.outer_tol = 1e-15;
  cfg.max_outer_iters = 100000;
  const PreparedProblem prepared(p);
  const auto reg = Regularizer::Lasso();
  const auto start = Solve(prepared, reg, cfg).estimate.taps;

  // Prox-gradient residual of the start.
  const double step = 1.0 / prepared.lipschitz();
  const auto grad = prepared.op().DataFitGradient(p.observation.samples, start);
  std::vector<double> moved(start.size());
  for (std::size_t i = 0; i < start.size(); ++i)
    moved[i] = SoftThreshold(start[i] - step * grad[i], step * cfg.eta);
  const double residual = oracle::MaxAbsDiff(moved, start);
  REQUIRE(residual < 1e-8);

  const SolveReport again = Solve(prepared, reg, EstimationConfig{.eta = 0.4},
                                  start);
  CHECK(again.outer_iterations == 1);
  CHECK(again.converged);
  CHECK(oracle::MaxAbsDiff(again.estimate.taps, start) <= residual + 1e-15);
}

TEST_CASE("eta selection") {
  std::mt19937_64 rng(47);
  const auto x = oracle::RandomVector(256, rng);
  const auto h = oracle::RandomVector(16, rng, 0.5);
  CvCase clean;
  clean.problem = MakeProblem(x, h, 0.0, rng);
  clean.truth = h;
  EstimationConfig cfg;
  CvOptions cv;
  const std::vector<CvCase> cases = {clean};

  const std::vector<double> single = {0.3};
  CHECK(SelectEta(cases, RegularizerKind::kTikhonov, single, cfg, cv).best_eta ==
        0.3);

  const auto grid = EtaGrid(1e-6, 1e2, 9);
  const EtaSelection noiseless =
      SelectEta(cases, RegularizerKind::kTikhonov, grid, cfg, cv);
  CHECK(noiseless.best_index == 0);

  // Short input and heavy noise: a U-shaped score curve.
  CvCase noisy;
  const auto xs = oracle::RandomVector(12, rng);
  noisy.problem = MakeProblem(xs, h, 1.0, rng);
  noisy.truth = h;
  const std::vector<CvCase> hard = {noisy};
  const auto wide = EtaGrid(1e-6, 1e6, 13);
  EstimationConfig quick;
  quick.max_outer_iters = 20000;
  const EtaSelection u_shape =
      SelectEta(hard, RegularizerKind::kTikhonov, wide, quick, cv);
  const double best = u_shape.scores[u_shape.best_index];
  CHECK(u_shape.best_index > 0);
  CHECK(u_shape.best_index + 1 < wide.size());
  CHECK(u_shape.scores.front() > best);
  CHECK(u_shape.scores.back() > best);

  CvOptions bad;
  bad.strategy = CvStrategy::kHoldoutResidual;
  bad.holdout_fraction = 1.0;
  CHECK_THROWS_AS(SelectEta(cases, RegularizerKind::kTikhonov, grid, cfg, bad),
                  InvalidArgumentError);
  bad.holdout_fraction = 0.0;
  CHECK_THROWS_AS(SelectEta(cases, RegularizerKind::kTikhonov, grid, cfg, bad),
                  InvalidArgumentError);

  CvOptions holdout;
  holdout.strategy = CvStrategy::kHoldoutResidual;
  const EtaSelection ho =
      SelectEta(cases, RegularizerKind::kTikhonov, grid, cfg, holdout);
  CHECK(ho.estimates.size() == 1);
  CHECK(NmseTerm(ho.estimates[0].taps, h, {}) < 1e-3);
}

}  // namespace
}  // namespace otrir
