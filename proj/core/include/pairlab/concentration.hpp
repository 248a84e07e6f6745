#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "pairlab/problem.hpp"
#include "pairlab/types.hpp"
#include "pairlab/vec.hpp"

namespace pairlab {

enum class KernelKind { kProduct, kBoundedIndicator, kGradAtOpt };

std::string kernel_kind_name(KernelKind kind);
KernelKind parse_kernel_kind(const std::string& name);

// A pair kernel q(z, z') with a known sampling model and exact Bernstein
// parameters: sigma2 is the variance (scalar) or E||q - mean||^2 (vector),
// b = sup ||q - mean|| (admissible since k!/2 >= 1).
struct KernelSpec {
  KernelKind name = KernelKind::kProduct;
  int output_dim = 1;
  Vec mean;
  double sigma2 = 0.0;
  double b = 1.0;
  double p = 0.5;  // bounded_indicator Bernoulli parameter
  std::shared_ptr<const ProblemSpec> problem;  // grad_at_opt
};

// q = x (.) x' (componentwise), data coordinatewise Rademacher. mean 0,
// sigma2 = dim, b = sqrt(dim).
KernelSpec make_product_kernel(int dim);

// q = x x' in {0,1} on Bernoulli(p) scalars. mean p^2, sigma2 = p^2 (1 - p^2),
// b = max(p^2, 1 - p^2).
KernelSpec make_bounded_indicator_kernel(double p);

// q = grad f(w*; z, z') for a problem with known w_star (mean 0).
KernelSpec make_grad_at_opt_kernel(const ProblemSpec& spec);

Dataset sample_kernel_dataset(const KernelSpec& kernel, int n, std::uint64_t seed);

void kernel_eval_into(const KernelSpec& kernel, const Sample& z, const Sample& zp, double* out);

// Exact average of the kernel over all ordered pairs i != j.
Vec u_statistic(const KernelSpec& kernel, const Dataset& ds);

// Block form from the permutation representation of an order-2 U-statistic:
// (1 / floor(n/2)) sum_i q(z_{perm[i]}, z_{perm[i + floor(n/2)]}).
Vec block_statistic(const KernelSpec& kernel, const Dataset& ds, const std::vector<int>& perm);

// sqrt(2 sigma2 u / floor(n/2)) + b u / floor(n/2).
double scalar_tail_threshold(double sigma2, double b, int n, double u);

// sqrt(2 sigma2 log(2/delta) / floor(n/2)) + b log(2/delta) / floor(n/2).
double vector_deviation_threshold(double sigma2, double b, int n, double delta);

struct TailPoint {
  double u = 0.0;
  double exceedance = 0.0;  // empirical frequency of deviations at the threshold
  double bound = 0.0;       // e^{-u}
  double mc_se = 0.0;       // sqrt(bound (1 - bound) / reps)
};

struct TailReport {
  KernelKind kernel = KernelKind::kProduct;
  int n = 0;
  int reps = 0;
  std::vector<TailPoint> points;
};

// Monte Carlo exceedance frequencies of the deviation at the Bernstein
// threshold. Scalar kernels test the one-sided event, vector kernels the norm
// deviation at delta = 2 e^{-u}. Replicates use derived per-rep seeds, so the
// counts are independent of worker count.
TailReport mc_tail_check(const KernelSpec& kernel, int n, int reps,
                         const std::vector<double>& u_grid, std::uint64_t seed, int jobs = 1);

struct ElementarySums {
  double lhs = 0.0;
  double rhs = 0.0;
  bool ok = false;
};

// Partial sum sum_{k=1}^t k^{-theta} against its closed-form bound:
// t^{1-theta}/(1-theta) for theta in (0,1), log(e t) at theta = 1,
// theta/(theta-1) for theta > 1.
ElementarySums elementary_sums_check(double theta, std::int64_t t);

}  // namespace pairlab
