#include "pairlab/optim.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "pairlab/rng.hpp"

namespace pairlab {

namespace {
constexpr double kAdmissibilitySlack = 1.0 + 1e-12;
constexpr std::int64_t kErmStepCap = 1000000;

void validate_schedule(const Schedule& s, double beta, bool for_sgd) {
  switch (s.kind) {
    case ScheduleKind::kConstant:
    case ScheduleKind::kPolynomial: {
      if (s.eta1 <= 0.0) throw std::invalid_argument("schedule: eta1 must be positive");
      const double cap = for_sgd ? 1.0 / (2.0 * beta) : 1.0 / beta;
      if (s.eta1 > cap * kAdmissibilitySlack)
        throw std::invalid_argument("schedule: eta1 exceeds the admissible step " +
                                    std::to_string(cap));
      if (s.kind == ScheduleKind::kPolynomial && (s.theta <= 0.0 || s.theta >= 1.0))
        throw std::invalid_argument("schedule: polynomial theta must lie in (0,1)");
      break;
    }
    case ScheduleKind::kPlFast: {
      if (s.mu <= 0.0) throw std::invalid_argument("schedule: plfast mu must be positive");
      const double t0_min = std::max(4.0 * beta / s.mu, 1.0);
      if (s.t0 < t0_min / kAdmissibilitySlack)
        throw std::invalid_argument("schedule: plfast t0 must be >= max(4 beta / mu, 1)");
      break;
    }
  }
}

bool finite(double v) { return std::isfinite(v); }

// Shared trajectory recording: checkpoint time = steps completed.
struct Recorder {
  const std::vector<std::int64_t>& times;
  std::size_t next = 0;
  Trajectory& traj;

  bool wants(std::int64_t t) const { return next < times.size() && times[next] == t; }
  void record(std::int64_t t, const Vec& w, const RiskValue& rv) {
    traj.checkpoints.push_back({t, w, norm(rv.grad), rv.value});
    ++next;
  }
};

}  // namespace

std::string schedule_kind_name(ScheduleKind kind) {
  switch (kind) {
    case ScheduleKind::kConstant: return "constant";
    case ScheduleKind::kPolynomial: return "polynomial";
    case ScheduleKind::kPlFast: return "plfast";
  }
  throw std::invalid_argument("unknown schedule kind");
}

ScheduleKind parse_schedule_kind(const std::string& name) {
  if (name == "constant") return ScheduleKind::kConstant;
  if (name == "polynomial") return ScheduleKind::kPolynomial;
  if (name == "plfast") return ScheduleKind::kPlFast;
  throw std::invalid_argument("unknown schedule kind: " + name);
}

double step_size(const Schedule& s, std::int64_t t) {
  if (t < 1) throw std::invalid_argument("step_size: t must be >= 1");
  switch (s.kind) {
    case ScheduleKind::kConstant: return s.eta1;
    case ScheduleKind::kPolynomial:
      return s.eta1 * std::pow(static_cast<double>(t), -s.theta);
    case ScheduleKind::kPlFast: return 2.0 / (s.mu * (static_cast<double>(t) + s.t0));
  }
  throw std::invalid_argument("step_size: unknown schedule kind");
}

std::string horizon_rule_name(HorizonRule rule) {
  switch (rule) {
    case HorizonRule::kGdGeneral: return "gd-general";
    case HorizonRule::kGdPl: return "gd-pl";
    case HorizonRule::kSgdGeneral: return "sgd-general";
    case HorizonRule::kSgdPl: return "sgd-pl";
    case HorizonRule::kSgdPlFast: return "sgd-pl-fast";
  }
  throw std::invalid_argument("unknown horizon rule");
}

HorizonRule parse_horizon_rule(const std::string& name) {
  if (name == "gd-general") return HorizonRule::kGdGeneral;
  if (name == "gd-pl") return HorizonRule::kGdPl;
  if (name == "sgd-general") return HorizonRule::kSgdGeneral;
  if (name == "sgd-pl") return HorizonRule::kSgdPl;
  if (name == "sgd-pl-fast") return HorizonRule::kSgdPlFast;
  throw std::invalid_argument("unknown horizon rule: " + name);
}

std::int64_t stopping_horizon(HorizonRule rule, std::int64_t n, std::int64_t d, double theta,
                              double pl_ratio) {
  if (n < 2) throw std::invalid_argument("stopping_horizon: n must be >= 2");
  if (d < 1) throw std::invalid_argument("stopping_horizon: d must be >= 1");
  const double nd = static_cast<double>(n);
  double value = 0.0;
  switch (rule) {
    case HorizonRule::kGdGeneral:
    case HorizonRule::kSgdGeneral: {
      if (theta <= 0.0 || theta >= 1.0)
        throw std::invalid_argument("stopping_horizon: theta must lie in (0,1)");
      value = std::pow(nd / static_cast<double>(d), 1.0 / (2.0 * (1.0 - theta)));
      break;
    }
    case HorizonRule::kGdPl: {
      if (std::isfinite(pl_ratio)) {
        if (pl_ratio <= 0.0 || pl_ratio >= 1.0)
          throw std::invalid_argument("stopping_horizon: pl_ratio must lie in (0,1)");
        value = std::log(nd) / -std::log1p(-pl_ratio);
      } else {
        value = std::log(nd);
      }
      break;
    }
    case HorizonRule::kSgdPl: {
      if (theta <= 0.0 || theta >= 1.0)
        throw std::invalid_argument("stopping_horizon: theta must lie in (0,1)");
      if (theta < 0.5)
        value = std::pow(nd, 2.0 / theta);
      else if (theta == 0.5)
        value = std::pow(nd, 4.0);
      else
        value = std::pow(nd, 2.0 / (1.0 - theta));
      break;
    }
    case HorizonRule::kSgdPlFast: value = nd * nd; break;
  }
  if (!(value < 4.0e18))
    throw std::overflow_error("stopping_horizon: horizon does not fit in 64 bits");
  return std::max<std::int64_t>(1, std::llround(value));
}

CheckpointPlan CheckpointPlan::geometric(std::int64_t T) {
  CheckpointPlan plan;
  if (T <= 0) {
    plan.times = {0};
    return plan;
  }
  for (std::int64_t t = 1; t < T; t *= 2) plan.times.push_back(t);
  plan.times.push_back(T);
  return plan;
}

CheckpointPlan CheckpointPlan::dense(std::int64_t T) {
  CheckpointPlan plan;
  for (std::int64_t t = 0; t <= T; ++t) plan.times.push_back(t);
  return plan;
}

NonFiniteIterateError::NonFiniteIterateError(std::int64_t step)
    : std::runtime_error("non-finite iterate at step t = " + std::to_string(step)), t(step) {}

ErmConvergenceError::ErmConvergenceError(double achieved)
    : std::runtime_error("solve_erm: step cap reached, achieved ||grad F_S|| = " +
                         std::to_string(achieved)),
      achieved_grad_norm(achieved) {}

namespace {

void validate_plan(const CheckpointPlan& plan, std::int64_t T) {
  std::int64_t prev = -1;
  for (std::int64_t t : plan.times) {
    if (t < 0 || t > T) throw std::invalid_argument("checkpoint plan: time outside [0, T]");
    if (t <= prev) throw std::invalid_argument("checkpoint plan: times must strictly increase");
    prev = t;
  }
}

}  // namespace

Trajectory run_gd(const ProblemSpec& spec, const Dataset& ds, const Schedule& schedule,
                  std::int64_t T, const Vec& w1, const CheckpointPlan& plan, bool allow_large) {
  if (T < 0) throw std::invalid_argument("run_gd: T must be >= 0");
  validate_schedule(schedule, spec.beta, /*for_sgd=*/false);
  require_dim(w1, static_cast<std::size_t>(spec.d), "run_gd: w1");
  validate_plan(plan, T);

  Trajectory traj;
  traj.T = T;
  traj.schedule = schedule;
  Vec w = w1;
  Recorder rec{plan.times, 0, traj};

  for (std::int64_t t = 1; t <= T; ++t) {
    const RiskValue rv = empirical_risk(spec, ds, w, allow_large);
    if (!finite(rv.value) || !all_finite(rv.grad)) throw NonFiniteIterateError(t);
    if (rec.wants(t - 1)) rec.record(t - 1, w, rv);
    axpy(-step_size(schedule, t), rv.grad, w);
    if (!all_finite(w)) throw NonFiniteIterateError(t);
  }
  if (rec.wants(T)) {
    const RiskValue rv = empirical_risk(spec, ds, w, allow_large);
    if (!finite(rv.value) || !all_finite(rv.grad)) throw NonFiniteIterateError(T);
    rec.record(T, w, rv);
  }
  traj.final_w = std::move(w);
  return traj;
}

Trajectory run_sgd(const ProblemSpec& spec, const Dataset& ds, const Schedule& schedule,
                   std::int64_t T, const Vec& w1, std::uint64_t seed, const CheckpointPlan& plan,
                   bool allow_large) {
  if (T < 0) throw std::invalid_argument("run_sgd: T must be >= 0");
  if (ds.n() < 2) throw std::invalid_argument("run_sgd: n must be >= 2");
  validate_schedule(schedule, spec.beta, /*for_sgd=*/true);
  require_dim(w1, static_cast<std::size_t>(spec.d), "run_sgd: w1");
  validate_plan(plan, T);

  Trajectory traj;
  traj.T = T;
  traj.schedule = schedule;
  traj.seed = seed;
  Vec w = w1;
  Vec grad(spec.d);
  const std::uint64_t n = static_cast<std::uint64_t>(ds.n());
  Recorder rec{plan.times, 0, traj};

  for (std::int64_t t = 1; t <= T; ++t) {
    if (rec.wants(t - 1)) rec.record(t - 1, w, empirical_risk(spec, ds, w, allow_large));
    Xoshiro256ss rng(derive_seed(seed, {{"sgd", static_cast<std::uint64_t>(t)}}));
    const std::uint64_t i = rng.below(n);
    std::uint64_t j = rng.below(n - 1);
    if (j >= i) ++j;
    double value;
    loss_eval_into(spec, w, ds.samples[i], ds.samples[j], value, grad.data());
    axpy(-step_size(schedule, t), grad, w);
    if (!all_finite(w)) throw NonFiniteIterateError(t);
  }
  if (rec.wants(T)) rec.record(T, w, empirical_risk(spec, ds, w, allow_large));
  traj.final_w = std::move(w);
  return traj;
}

namespace {

// Weighted least squares over ordered pair differences via sufficient
// statistics: solve (sum dx dx^T) w = sum dx dy.
Vec quadratic_wls(const ProblemSpec& spec, const Dataset& ds) {
  const int n = ds.n();
  const int d = spec.d;
  Eigen::MatrixXd xtx = Eigen::MatrixXd::Zero(d, d);
  Eigen::VectorXd xty = Eigen::VectorXd::Zero(d);
  Eigen::VectorXd sx = Eigen::VectorXd::Zero(d);
  double sy = 0.0;
  for (const Sample& z : ds.samples) {
    Eigen::Map<const Eigen::VectorXd> x(z.x.data(), d);
    xtx.noalias() += x * x.transpose();
    xty.noalias() += x * z.y;
    sx += x;
    sy += z.y;
  }
  const double nn = static_cast<double>(n);
  Eigen::MatrixXd a = 2.0 * (nn * xtx - sx * sx.transpose());
  Eigen::VectorXd b = 2.0 * (nn * xty - sx * sy);
  Eigen::LDLT<Eigen::MatrixXd> ldlt(a);
  Eigen::VectorXd w;
  if (ldlt.info() == Eigen::Success) {
    w = ldlt.solve(b);
  }
  if (ldlt.info() != Eigen::Success || !w.allFinite()) {
    w = a.completeOrthogonalDecomposition().solve(b);
  }
  return Vec(w.data(), w.data() + d);
}

}  // namespace

Vec solve_erm(const ProblemSpec& spec, const Dataset& ds, double tol, bool allow_large) {
  if (!(tol > 0.0)) throw std::invalid_argument("solve_erm: tol must be positive");
  Vec w = zeros(spec.d);
  if (norm(empirical_risk(spec, ds, w, allow_large).grad) <= tol) return w;

  if (spec.kind == ProblemKind::kQuadratic) {
    Vec ls = quadratic_wls(spec, ds);
    if (norm(empirical_risk(spec, ds, ls, allow_large).grad) <= tol) return ls;
    w = std::move(ls);  // refine from the closed form if conditioning spoiled it
  }

  const double eta = 1.0 / spec.beta;
  for (std::int64_t t = 1; t <= kErmStepCap; ++t) {
    const RiskValue rv = empirical_risk(spec, ds, w, allow_large);
    if (!finite(rv.value) || !all_finite(rv.grad)) throw NonFiniteIterateError(t);
    if (norm(rv.grad) <= tol) return w;
    axpy(-eta, rv.grad, w);
  }
  throw ErmConvergenceError(norm(empirical_risk(spec, ds, w, allow_large).grad));
}

// Declared in problem.hpp; lives here so it can reuse the optimizers.
double estimate_pl_constant(const ProblemSpec& spec, int probe_count, int n_mc,
                            std::uint64_t seed) {
  if (probe_count < 1) throw std::invalid_argument("estimate_pl_constant: probe_count >= 1");
  const OracleSettings mc{OracleMode::kMonteCarlo, n_mc, derive_seed(seed, {{"pl-mc", 0}})};

  // Candidate minima from long GD runs on a fixed moderate dataset.
  const Dataset ds = sample_dataset(spec, 256, derive_seed(seed, {{"pl-data", 0}}));
  Schedule sched{ScheduleKind::kConstant, 1.0 / spec.beta};
  double f_best = std::numeric_limits<double>::infinity();
  std::vector<Vec> anchors;
  for (int k = 0; k < 10; ++k) {
    Xoshiro256ss rng(derive_seed(seed, {{"pl-start", static_cast<std::uint64_t>(k)}}));
    Vec w1(spec.d);
    for (double& c : w1) c = rng.normal();
    const Trajectory traj =
        run_gd(spec, ds, sched, 400, w1, CheckpointPlan::geometric(400));
    f_best = std::min(f_best, population_oracle(spec, traj.final_w, mc).risk);
    anchors.push_back(traj.final_w);
  }

  // Probe ring around the best-known region.
  double mu_hat = std::numeric_limits<double>::infinity();
  const Vec center = spec.w_star ? *spec.w_star : anchors.front();
  for (int k = 0; k < probe_count; ++k) {
    Xoshiro256ss rng(derive_seed(seed, {{"pl-probe", static_cast<std::uint64_t>(k)}}));
    Vec probe(center);
    const double r = 0.25 * std::pow(2.0, k % 4);
    Vec u(spec.d);
    double n2 = 0.0;
    do {
      for (double& c : u) c = rng.normal();
      n2 = squared_norm(u);
    } while (n2 == 0.0);
    axpy(r / std::sqrt(n2), u, probe);
    const PopulationEstimate est = population_oracle(spec, probe, mc);
    const double excess = est.risk - f_best;
    if (excess > 1e-6) mu_hat = std::min(mu_hat, squared_norm(est.grad) / (2.0 * excess));
  }
  if (!std::isfinite(mu_hat))
    throw std::runtime_error("estimate_pl_constant: no informative probes");
  return mu_hat;
}

}  // namespace pairlab
