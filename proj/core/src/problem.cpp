#include "pairlab/problem.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "pairlab/rng.hpp"

namespace pairlab {

namespace {

constexpr double kNoiseCut = 6.0;

double sign_or_one(double v) { return v < 0.0 ? -1.0 : 1.0; }

// log(1 + exp(-t)) without overflow.
double logistic_loss(double t) {
  if (t > 0.0) return std::log1p(std::exp(-t));
  return -t + std::log1p(std::exp(t));
}

// d/dt log(1 + exp(-t)) = -1 / (1 + exp(t)).
double logistic_loss_grad(double t) { return -1.0 / (1.0 + std::exp(t)); }

Vec draw_unit_vector(Xoshiro256ss& rng, int dim) {
  Vec v(dim);
  double n2 = 0.0;
  do {
    for (double& c : v) c = rng.normal();
    n2 = squared_norm(v);
  } while (n2 == 0.0);
  const double inv = 1.0 / std::sqrt(n2);
  for (double& c : v) c *= inv;
  return v;
}

}  // namespace

std::string problem_kind_name(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::kQuadratic: return "quadratic";
    case ProblemKind::kSinePl: return "sinepl";
    case ProblemKind::kRanking: return "ranking";
    case ProblemKind::kMetric: return "metric";
  }
  throw std::invalid_argument("unknown problem kind");
}

ProblemKind parse_problem_kind(const std::string& name) {
  if (name == "quadratic") return ProblemKind::kQuadratic;
  if (name == "sinepl") return ProblemKind::kSinePl;
  if (name == "ranking") return ProblemKind::kRanking;
  if (name == "metric") return ProblemKind::kMetric;
  throw std::invalid_argument("unknown problem kind: " + name);
}

std::string oracle_mode_name(OracleMode mode) {
  return mode == OracleMode::kAnalytic ? "analytic" : "montecarlo";
}

OracleMode parse_oracle_mode(const std::string& name) {
  if (name == "analytic") return OracleMode::kAnalytic;
  if (name == "montecarlo") return OracleMode::kMonteCarlo;
  throw std::invalid_argument("unknown oracle mode: " + name);
}

double truncated_normal_variance(double sigma, double cut) {
  if (sigma == 0.0) return 0.0;
  // Var = sigma^2 (1 - 2 c phi(c) / (2 Phi(c) - 1)) for symmetric truncation.
  const double phi = std::exp(-0.5 * cut * cut) / std::sqrt(2.0 * std::numbers::pi);
  const double mass = std::erf(cut / std::numbers::sqrt2);
  return sigma * sigma * (1.0 - 2.0 * cut * phi / mass);
}

ProblemSpec make_problem(ProblemKind kind, int d, double noise_sigma, std::uint64_t seed) {
  if (d < 1) throw std::invalid_argument("make_problem: d must be >= 1");
  if (noise_sigma < 0.0) throw std::invalid_argument("make_problem: noise_sigma must be >= 0");

  ProblemSpec spec;
  spec.kind = kind;
  spec.d = d;
  spec.noise_sigma = noise_sigma;
  spec.seed = seed;
  spec.radius = 10.0;

  int input_dim = d;
  if (kind == ProblemKind::kMetric) {
    const int k = static_cast<int>(std::lround(std::sqrt(static_cast<double>(d))));
    if (k < 1 || k * k != d)
      throw std::invalid_argument("make_problem: metric requires d to be a perfect square");
    input_dim = k;
  }
  spec.input_dim = input_dim;

  Xoshiro256ss rng(derive_seed(seed, {{"problem", 0}}));
  spec.model_center = draw_unit_vector(rng, input_dim);

  // Per-pair smoothness: sup over pairs of the loss Hessian norm, with
  // ||dx||^2 <= 4 * input_dim for Rademacher inputs.
  const double max_dx2 = 4.0 * static_cast<double>(input_dim);
  const double noise_var = truncated_normal_variance(noise_sigma, kNoiseCut);

  switch (kind) {
    case ProblemKind::kQuadratic:
      spec.beta = 2.0 * max_dx2;
      spec.mu = 4.0;  // 2 * lambda_min(E dx dx^T) = 2 * 2
      spec.w_star = spec.model_center;
      spec.f_star = 2.0 * noise_var;
      spec.grad_sq_at_opt = 16.0 * static_cast<double>(d) * noise_var;
      break;
    case ProblemKind::kSinePl:
      // |d^2/dr^2 (r^2 + 3 sin^2 r)| = |2 + 6 cos 2r| <= 8.
      spec.beta = 8.0 * max_dx2;
      if (noise_sigma == 0.0) {
        spec.w_star = spec.model_center;
        spec.f_star = 0.0;
        spec.grad_sq_at_opt = 0.0;
      }
      break;
    case ProblemKind::kRanking:
      // logistic curvature <= 1/4.
      spec.beta = 0.25 * max_dx2;
      break;
    case ProblemKind::kMetric:
      spec.beta = 0.25 * max_dx2 * max_dx2;
      break;
  }
  spec.gamma = spec.beta / std::numbers::ln2;
  return spec;
}

Dataset sample_dataset(const ProblemSpec& spec, int n, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("sample_dataset: n must be >= 2");

  Dataset ds;
  ds.seed = seed;
  ds.samples.resize(n);
  Xoshiro256ss rng(seed);
  for (Sample& s : ds.samples) {
    s.x.resize(spec.input_dim);
    for (double& c : s.x) c = rng.rademacher();
    const double score = dot(spec.model_center, s.x);
    switch (spec.kind) {
      case ProblemKind::kQuadratic:
      case ProblemKind::kSinePl:
        s.y = score + rng.truncated_normal(spec.noise_sigma, kNoiseCut);
        break;
      case ProblemKind::kRanking:
      case ProblemKind::kMetric:
        s.y = sign_or_one(score);
        break;
    }
  }
  return ds;
}

void loss_eval_into(const ProblemSpec& spec, const Vec& w, const Sample& z, const Sample& zp,
                    double& value, double* grad) {
  const int d = spec.d;
  const int m = spec.input_dim;
  switch (spec.kind) {
    case ProblemKind::kQuadratic: {
      double r = -(z.y - zp.y);
      for (int k = 0; k < d; ++k) r += w[k] * (z.x[k] - zp.x[k]);
      value = r * r;
      const double c = 2.0 * r;
      for (int k = 0; k < d; ++k) grad[k] = c * (z.x[k] - zp.x[k]);
      return;
    }
    case ProblemKind::kSinePl: {
      double r = -(z.y - zp.y);
      for (int k = 0; k < d; ++k) r += w[k] * (z.x[k] - zp.x[k]);
      const double s = std::sin(r);
      value = r * r + 3.0 * s * s;
      const double c = 2.0 * r + 3.0 * std::sin(2.0 * r);
      for (int k = 0; k < d; ++k) grad[k] = c * (z.x[k] - zp.x[k]);
      return;
    }
    case ProblemKind::kRanking: {
      const double dy = z.y - zp.y;
      const double s = dy > 0.0 ? 1.0 : (dy < 0.0 ? -1.0 : 0.0);
      double margin = 0.0;
      for (int k = 0; k < d; ++k) margin += w[k] * (z.x[k] - zp.x[k]);
      const double t = s * margin;
      value = logistic_loss(t);
      const double c = logistic_loss_grad(t) * s;
      for (int k = 0; k < d; ++k) grad[k] = c * (z.x[k] - zp.x[k]);
      return;
    }
    case ProblemKind::kMetric: {
      // h = <M, dx dx^T> with M = w reshaped row-major (m x m).
      double h = 0.0;
      for (int a = 0; a < m; ++a) {
        const double da = z.x[a] - zp.x[a];
        for (int b = 0; b < m; ++b) h += w[a * m + b] * da * (z.x[b] - zp.x[b]);
      }
      const double p = z.y * zp.y;
      const double t = p * (1.0 - h);
      value = logistic_loss(t);
      const double c = -logistic_loss_grad(t) * p;
      for (int a = 0; a < m; ++a) {
        const double da = z.x[a] - zp.x[a];
        for (int b = 0; b < m; ++b) grad[a * m + b] = c * da * (z.x[b] - zp.x[b]);
      }
      return;
    }
  }
  throw std::invalid_argument("loss_eval: unknown problem kind");
}

LossEval loss_eval(const ProblemSpec& spec, const Vec& w, const Sample& z, const Sample& zp) {
  require_dim(w, static_cast<std::size_t>(spec.d), "loss_eval: w");
  require_dim(z.x, static_cast<std::size_t>(spec.input_dim), "loss_eval: z.x");
  require_dim(zp.x, static_cast<std::size_t>(spec.input_dim), "loss_eval: z'.x");
  LossEval e;
  e.grad.resize(spec.d);
  loss_eval_into(spec, w, z, zp, e.value, e.grad.data());
  return e;
}

PopulationEstimate population_oracle(const ProblemSpec& spec, const Vec& w,
                                     const OracleSettings& oracle) {
  require_dim(w, static_cast<std::size_t>(spec.d), "population_oracle: w");
  PopulationEstimate out;
  out.grad.assign(spec.d, 0.0);

  if (oracle.mode == OracleMode::kAnalytic) {
    if (spec.kind != ProblemKind::kQuadratic)
      throw std::invalid_argument("population_oracle: analytic mode requires the quadratic kind");
    const Vec& ws = *spec.w_star;
    double q = 0.0;
    for (int k = 0; k < spec.d; ++k) {
      const double dk = w[k] - ws[k];
      q += dk * dk;        // (w - w*)^T H (w - w*) with H = 2 I
      out.grad[k] = 4.0 * dk;  // 2 H (w - w*)
    }
    out.risk = 2.0 * q + 2.0 * truncated_normal_variance(spec.noise_sigma, kNoiseCut);
    return out;
  }

  if (oracle.n_mc < 10000)
    throw std::invalid_argument("population_oracle: montecarlo requires n_mc >= 1e4");

  Xoshiro256ss rng(oracle.seed);
  // Draw pairs two samples at a time from the model; Welford for the SE.
  Sample z, zp;
  z.x.resize(spec.input_dim);
  zp.x.resize(spec.input_dim);
  Vec g(spec.d);
  double mean = 0.0, m2 = 0.0;
  auto draw = [&](Sample& s) {
    for (double& c : s.x) c = rng.rademacher();
    const double score = dot(spec.model_center, s.x);
    if (spec.kind == ProblemKind::kQuadratic || spec.kind == ProblemKind::kSinePl)
      s.y = score + rng.truncated_normal(spec.noise_sigma, kNoiseCut);
    else
      s.y = sign_or_one(score);
  };
  for (int i = 0; i < oracle.n_mc; ++i) {
    draw(z);
    draw(zp);
    double v;
    loss_eval_into(spec, w, z, zp, v, g.data());
    const double delta = v - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta * (v - mean);
    axpy(1.0, g, out.grad);
  }
  out.risk = mean;
  const double n = static_cast<double>(oracle.n_mc);
  out.risk_se = std::sqrt(std::max(m2 / std::max(n - 1.0, 1.0), 0.0) / n);
  for (double& c : out.grad) c /= n;
  return out;
}

double estimate_d_star(const ProblemSpec& spec, int n_mc, std::uint64_t seed) {
  if (!spec.w_star) throw std::invalid_argument("estimate_d_star: w_star unknown for this problem");
  if (n_mc < 1000) throw std::invalid_argument("estimate_d_star: n_mc must be >= 1000");

  Xoshiro256ss rng(seed);
  Sample z, zp;
  z.x.resize(spec.input_dim);
  zp.x.resize(spec.input_dim);
  Vec g(spec.d);
  // Moments of X = ||grad f(w*; z, z')|| for k = 2..8.
  constexpr int kMaxMoment = 8;
  double moments[kMaxMoment + 1] = {0.0};
  auto draw = [&](Sample& s) {
    for (double& c : s.x) c = rng.rademacher();
    const double score = dot(spec.model_center, s.x);
    if (spec.kind == ProblemKind::kQuadratic || spec.kind == ProblemKind::kSinePl)
      s.y = score + rng.truncated_normal(spec.noise_sigma, kNoiseCut);
    else
      s.y = sign_or_one(score);
  };
  for (int i = 0; i < n_mc; ++i) {
    draw(z);
    draw(zp);
    double v;
    loss_eval_into(spec, *spec.w_star, z, zp, v, g.data());
    const double x = norm(g);
    double p = x * x;
    for (int k = 2; k <= kMaxMoment; ++k) {
      moments[k] += p;
      p *= x;
    }
  }
  for (int k = 2; k <= kMaxMoment; ++k) moments[k] /= static_cast<double>(n_mc);
  if (moments[2] <= 0.0) return 0.0;  // degenerate gradient at the optimum

  double d_star = 0.0;
  double factorial = 2.0;  // k!
  for (int k = 3; k <= kMaxMoment; ++k) {
    factorial *= static_cast<double>(k);
    const double ratio = moments[k] / (0.5 * factorial * moments[2]);
    d_star = std::max(d_star, std::pow(ratio, 1.0 / static_cast<double>(k - 2)));
  }
  return d_star;
}

}  // namespace pairlab
