#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "pairlab/problem.hpp"
#include "pairlab/risk.hpp"

namespace pairlab {

enum class ScheduleKind { kConstant, kPolynomial, kPlFast };

std::string schedule_kind_name(ScheduleKind kind);
ScheduleKind parse_schedule_kind(const std::string& name);

// Step-size schedules:
//   constant:    eta_t = eta1
//   polynomial:  eta_t = eta1 * t^{-theta},  theta in (0, 1)
//   plfast:      eta_t = 2 / (mu (t + t0)),  t0 >= max(4 beta / mu, 1)
struct Schedule {
  ScheduleKind kind = ScheduleKind::kConstant;
  double eta1 = 0.0;
  double theta = 0.5;
  double mu = 0.0;
  double t0 = 0.0;
};

double step_size(const Schedule& s, std::int64_t t);

enum class HorizonRule { kGdGeneral, kGdPl, kSgdGeneral, kSgdPl, kSgdPlFast };

std::string horizon_rule_name(HorizonRule rule);
HorizonRule parse_horizon_rule(const std::string& name);

// Iteration horizons, proportionality constant 1, rounded, floor 1:
//   gd-general / sgd-general:  (n / d)^{1 / (2 (1 - theta))}
//   sgd-pl:                    n^{2/theta} (theta < 1/2), n^4 (theta = 1/2),
//                              n^{2/(1-theta)} (theta > 1/2)
//   sgd-pl-fast:               n^2
//   gd-pl:                     log n, taken to base 1/(1 - pl_ratio) when the
//                              PL-to-smoothness ratio mu/beta is supplied (the
//                              number of contraction steps needed to reach
//                              1/n); plain natural log n otherwise.
std::int64_t stopping_horizon(HorizonRule rule, std::int64_t n, std::int64_t d, double theta,
                              double pl_ratio = std::numeric_limits<double>::quiet_NaN());

struct TrajectoryPoint {
  std::int64_t t = 0;  // update steps completed; the stored w is the iterate after t steps
  Vec w;
  double emp_grad_norm = 0.0;
  double emp_risk = 0.0;
};

struct Trajectory {
  std::vector<TrajectoryPoint> checkpoints;
  Vec final_w;
  std::int64_t T = 0;
  Schedule schedule;
  std::uint64_t seed = 0;  // SGD only
};

// Checkpoint times {1, 2, 4, ...} up to T, plus T itself ({0} when T = 0).
struct CheckpointPlan {
  std::vector<std::int64_t> times;
  static CheckpointPlan geometric(std::int64_t T);
  static CheckpointPlan dense(std::int64_t T);  // every step; for diagnostics
};

struct NonFiniteIterateError : std::runtime_error {
  explicit NonFiniteIterateError(std::int64_t step);
  std::int64_t t;
};

struct ErmConvergenceError : std::runtime_error {
  explicit ErmConvergenceError(double achieved);
  double achieved_grad_norm;
};

// Full-gradient descent: w_{t+1} = w_t - eta_t grad F_S(w_t), t = 1..T.
Trajectory run_gd(const ProblemSpec& spec, const Dataset& ds, const Schedule& schedule,
                  std::int64_t T, const Vec& w1, const CheckpointPlan& plan,
                  bool allow_large = false);

// Per-step uniform draw of one ordered pair (i, j), i != j, from the derived
// substream ("sgd", t); update with the single-pair gradient.
Trajectory run_sgd(const ProblemSpec& spec, const Dataset& ds, const Schedule& schedule,
                   std::int64_t T, const Vec& w1, std::uint64_t seed, const CheckpointPlan& plan,
                   bool allow_large = false);

// Empirical risk minimizer: closed-form weighted least squares over pair
// differences for the quadratic, otherwise GD with eta = 1/beta until
// ||grad F_S|| <= tol (step cap 1e6; throws ErmConvergenceError on cap).
Vec solve_erm(const ProblemSpec& spec, const Dataset& ds, double tol, bool allow_large = false);

}  // namespace pairlab
