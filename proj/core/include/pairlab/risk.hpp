#pragma once

#include <cstdint>
#include <vector>

#include "pairlab/problem.hpp"
#include "pairlab/types.hpp"
#include "pairlab/vec.hpp"

namespace pairlab {

// Exact pairwise risks are O(n^2); refuse above this unless allow_large is set.
inline constexpr int kMaxExactPairsN = 4096;

// Deterministic pairwise (tree) accumulator over a fixed push order. The
// reduction tree depends only on the push index, so a sum is reproducible to
// the last ulp regardless of how the terms were produced.
class PairwiseSum {
 public:
  explicit PairwiseSum(std::size_t width);

  void push(const double* term);
  std::uint64_t count() const { return n_; }
  // Folds the outstanding partial sums, lowest level first.
  void finish(double* out) const;

 private:
  std::size_t width_;
  std::uint64_t n_ = 0;
  std::vector<double> levels_;
  std::vector<double> scratch_;
};

struct RiskValue {
  double value = 0.0;
  Vec grad;
  std::int64_t n_pairs = 0;  // n (n - 1)
};

// Empirical risk over all ordered pairs i != j (outer i ascending, inner j
// ascending), averaged by 1 / (n (n - 1)).
RiskValue empirical_risk(const ProblemSpec& spec, const Dataset& ds, const Vec& w,
                         bool allow_large = false);

// max over probes of || grad F(probe) - grad F_S(probe) ||.
double uniform_gradient_gap(const ProblemSpec& spec, const Dataset& ds,
                            const std::vector<Vec>& probes, const OracleSettings& oracle,
                            bool allow_large = false);

// Extreme eigenvalues (min, max) of the empirical risk Hessian. Quadratic
// kind only, where the Hessian is constant in w.
std::pair<double, double> empirical_hessian_extremes(const ProblemSpec& spec, const Dataset& ds);

}  // namespace pairlab
