#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "pairlab/types.hpp"
#include "pairlab/vec.hpp"

namespace pairlab {

enum class ProblemKind { kQuadratic, kSinePl, kRanking, kMetric };

std::string problem_kind_name(ProblemKind kind);
ProblemKind parse_problem_kind(const std::string& name);

// A synthetic pairwise loss family together with its known distribution and
// the measurable constants the optimizers and rate checks consume.
//
// Loss definitions, with dx = x - x', dy = y - y':
//   quadratic:  f(w;z,z') = (<w,dx> - dy)^2
//   sinepl:     f(w;z,z') = r^2 + 3 sin^2(r), r = <w,dx> - dy   (nonconvex)
//   ranking:    f(w;z,z') = log(1 + exp(-sign(dy) <w,dx>)),  y in {-1,+1}
//   metric:     f(w;z,z') = log(1 + exp(-y y' (1 - <M, dx dx^T>))), M = w as
//               input_dim x input_dim matrix (d = input_dim^2)
//
// Inputs are coordinatewise Rademacher; quadratic/sinepl labels are
// y = <center, x> + eps with eps ~ Normal(0, sigma^2) truncated at +-6 sigma,
// ranking/metric labels are y = sign(<label_dir, x>) with sign(0) := +1.
struct ProblemSpec {
  ProblemKind kind = ProblemKind::kQuadratic;
  int d = 0;          // parameter dimension
  int input_dim = 0;  // feature dimension (== d except metric, where d = input_dim^2)
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;

  // Population minimizer, when known exactly.
  std::optional<Vec> w_star;
  // Per-pair gradient Lipschitz constant, uniform over sample pairs.
  double beta = 0.0;
  // PL constant of the population risk, when known analytically.
  std::optional<double> mu;
  // Sub-exponential increment scale; beta / ln 2 for smooth losses.
  double gamma = 0.0;
  // Optimal population risk F(w*), when known.
  std::optional<double> f_star;
  // E ||grad f(w*; z, z')||^2, when known.
  std::optional<double> grad_sq_at_opt;
  // Hypothesis region radius: W is taken as B(w*, radius). No projection is
  // performed anywhere; iterates are monitored, not clipped.
  double radius = 10.0;

  // Data-model center for quadratic/sinepl (equals w_star when that is set)
  // and label direction for ranking/metric. Internal to sampling.
  Vec model_center;
};

ProblemSpec make_problem(ProblemKind kind, int d, double noise_sigma, std::uint64_t seed);

// n i.i.d. samples; deterministic in (spec, n, seed).
Dataset sample_dataset(const ProblemSpec& spec, int n, std::uint64_t seed);

struct LossEval {
  double value = 0.0;
  Vec grad;
};

LossEval loss_eval(const ProblemSpec& spec, const Vec& w, const Sample& z, const Sample& zp);

// Allocation-free variant for hot loops; grad must point at spec.d doubles.
void loss_eval_into(const ProblemSpec& spec, const Vec& w, const Sample& z, const Sample& zp,
                    double& value, double* grad);

enum class OracleMode { kAnalytic, kMonteCarlo };

std::string oracle_mode_name(OracleMode mode);
OracleMode parse_oracle_mode(const std::string& name);

struct OracleSettings {
  OracleMode mode = OracleMode::kAnalytic;
  int n_mc = 100000;
  std::uint64_t seed = 0;
};

struct PopulationEstimate {
  double risk = 0.0;
  Vec grad;
  double risk_se = 0.0;  // Monte Carlo standard error of risk; 0 for analytic
};

// Analytic mode is exact and available for the quadratic only:
//   F(w) = (w - w*)^T H (w - w*) + 2 Var(eps),  grad F = 2 H (w - w*),  H = 2 I.
// Monte Carlo mode averages loss_eval over n_mc independent pairs (n_mc >= 1e4).
PopulationEstimate population_oracle(const ProblemSpec& spec, const Vec& w,
                                     const OracleSettings& oracle);

// Variance of Normal(0, sigma^2) truncated at +-cut*sigma.
double truncated_normal_variance(double sigma, double cut);

// Smallest Bernstein scale b such that the estimated moments of
// ||grad f(w*; z, z')|| satisfy E X^k <= (k!/2) E X^2 b^{k-2} for k <= 8.
// Estimated from n_mc Monte Carlo pairs; requires w_star.
double estimate_d_star(const ProblemSpec& spec, int n_mc, std::uint64_t seed);

// Empirical PL constant of the population risk: min over a probe grid of
// ||grad F||^2 / (2 (F - Fhat*)), with Fhat* the best value found by long GD
// runs from random starts. Intended for the sinepl family, whose composed PL
// constant has no closed form.
double estimate_pl_constant(const ProblemSpec& spec, int probe_count, int n_mc,
                            std::uint64_t seed);

}  // namespace pairlab
