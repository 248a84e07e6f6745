#include "pairlab/risk.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <cstring>
#include <stdexcept>

namespace pairlab {

namespace {
constexpr std::size_t kMaxLevels = 64;

void check_pair_count(const Dataset& ds, bool allow_large) {
  if (ds.n() < 2) throw std::invalid_argument("empirical risk needs n >= 2");
  if (ds.n() > kMaxExactPairsN && !allow_large)
    throw std::invalid_argument(
        "empirical risk: n > 4096 requires the allow-large flag (O(n^2) cost)");
}
}  // namespace

PairwiseSum::PairwiseSum(std::size_t width)
    : width_(width), levels_(kMaxLevels * width, 0.0), scratch_(width, 0.0) {}

void PairwiseSum::push(const double* term) {
  std::memcpy(scratch_.data(), term, width_ * sizeof(double));
  std::uint64_t mask = n_;
  std::size_t level = 0;
  while (mask & 1u) {
    double* lv = &levels_[level * width_];
    for (std::size_t k = 0; k < width_; ++k) scratch_[k] += lv[k];
    mask >>= 1;
    ++level;
  }
  std::memcpy(&levels_[level * width_], scratch_.data(), width_ * sizeof(double));
  ++n_;
}

void PairwiseSum::finish(double* out) const {
  for (std::size_t k = 0; k < width_; ++k) out[k] = 0.0;
  std::uint64_t mask = n_;
  std::size_t level = 0;
  while (mask) {
    if (mask & 1u) {
      const double* lv = &levels_[level * width_];
      for (std::size_t k = 0; k < width_; ++k) out[k] += lv[k];
    }
    mask >>= 1;
    ++level;
  }
}

RiskValue empirical_risk(const ProblemSpec& spec, const Dataset& ds, const Vec& w,
                         bool allow_large) {
  check_pair_count(ds, allow_large);
  require_dim(w, static_cast<std::size_t>(spec.d), "empirical_risk: w");

  const int n = ds.n();
  const std::size_t width = 1 + static_cast<std::size_t>(spec.d);
  PairwiseSum acc(width);
  std::vector<double> term(width);
  for (int i = 0; i < n; ++i) {
    const Sample& zi = ds.samples[i];
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      loss_eval_into(spec, w, zi, ds.samples[j], term[0], term.data() + 1);
      acc.push(term.data());
    }
  }
  std::vector<double> total(width);
  acc.finish(total.data());

  RiskValue rv;
  rv.n_pairs = static_cast<std::int64_t>(n) * (n - 1);
  const double inv = 1.0 / static_cast<double>(rv.n_pairs);
  rv.value = total[0] * inv;
  rv.grad.resize(spec.d);
  for (int k = 0; k < spec.d; ++k) rv.grad[k] = total[1 + k] * inv;
  return rv;
}

double uniform_gradient_gap(const ProblemSpec& spec, const Dataset& ds,
                            const std::vector<Vec>& probes, const OracleSettings& oracle,
                            bool allow_large) {
  if (probes.empty()) throw std::invalid_argument("uniform_gradient_gap: empty probe set");
  double gap = 0.0;
  for (const Vec& w : probes) {
    const RiskValue emp = empirical_risk(spec, ds, w, allow_large);
    const PopulationEstimate pop = population_oracle(spec, w, oracle);
    gap = std::max(gap, distance(pop.grad, emp.grad));
  }
  return gap;
}

std::pair<double, double> empirical_hessian_extremes(const ProblemSpec& spec, const Dataset& ds) {
  if (spec.kind != ProblemKind::kQuadratic)
    throw std::invalid_argument("empirical_hessian_extremes: quadratic kind only");
  if (ds.n() < 2) throw std::invalid_argument("empirical_hessian_extremes: n >= 2");

  const int n = ds.n();
  const int d = spec.d;
  // Hess F_S = (2 / (n(n-1))) sum_{i != j} dx dx^T = (4 / (n(n-1))) (n X^T X - s s^T),
  // with s the column sum of X.
  Eigen::MatrixXd xtx = Eigen::MatrixXd::Zero(d, d);
  Eigen::VectorXd s = Eigen::VectorXd::Zero(d);
  for (const Sample& z : ds.samples) {
    Eigen::Map<const Eigen::VectorXd> x(z.x.data(), d);
    xtx.noalias() += x * x.transpose();
    s += x;
  }
  const double scale = 4.0 / (static_cast<double>(n) * (n - 1));
  Eigen::MatrixXd hess = scale * (static_cast<double>(n) * xtx - s * s.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(hess);
  const auto& ev = eig.eigenvalues();
  return {ev.minCoeff(), ev.maxCoeff()};
}

}  // namespace pairlab
