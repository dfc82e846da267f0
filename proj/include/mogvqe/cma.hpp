#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "mogvqe/rng.hpp"

namespace mogvqe {

enum class CmaMode : std::uint8_t { Full, Separable };

enum class CmaStop : std::uint8_t { Tolerance, Budget, Stagnation };

inline const char* to_string(CmaStop s) {
  switch (s) {
    case CmaStop::Tolerance: return "tolerance";
    case CmaStop::Budget: return "budget";
    default: return "stagnation";
  }
}

struct CmaOptions {
  double sigma0 = 0.5;
  double f_tolerance = 1e-5;   // best-f range over the trailing window
  long max_evaluations = 0;    // 0 -> 500 * dimension
  int lambda = 0;              // 0 -> 4 + floor(3 ln n)
  CmaMode mode = CmaMode::Full;
  std::uint64_t seed = 0;
};

struct CmaResult {
  std::vector<double> x_best;
  double f_best = std::numeric_limits<double>::infinity();
  long evaluations_used = 0;
  CmaStop termination_reason = CmaStop::Budget;
};

/// Per-generation snapshot for optional tracing.
struct CmaGenerationInfo {
  int generation;
  double generation_best_f;
  double best_f_so_far;
  double sigma;
  const std::vector<double>& mean;
};

using CmaObjective = std::function<double(const std::vector<double>&)>;
using CmaTraceFn = std::function<void(const CmaGenerationInfo&)>;

/// (mu/mu_w, lambda)-CMA-ES with cumulative step-size adaptation and rank-one
/// plus rank-mu covariance updates; standard published default parameters.
/// Separable mode keeps the covariance diagonal, with learning rates scaled by
/// (n+2)/3, so each iteration costs O(n * lambda).
inline CmaResult minimize(const CmaObjective& objective, const std::vector<double>& x0,
                          const CmaOptions& opts, const CmaTraceFn& trace = nullptr) {
  const int n = static_cast<int>(x0.size());
  if (n < 1) throw std::invalid_argument("cma minimize: zero-dimension input");
  if (opts.sigma0 <= 0) throw std::invalid_argument("cma minimize: sigma0 must be positive");
  if (opts.f_tolerance <= 0) throw std::invalid_argument("cma minimize: f_tolerance must be positive");

  const int lambda = opts.lambda > 0 ? opts.lambda : 4 + static_cast<int>(3.0 * std::log(n));
  if (lambda < 2) throw std::invalid_argument("cma minimize: lambda must be >= 2");
  const long budget = std::max<long>(1, opts.max_evaluations > 0 ? opts.max_evaluations
                                                                 : 500L * n);
  const bool separable = opts.mode == CmaMode::Separable;

  // Recombination weights and learning rates.
  const int mu = lambda / 2;
  std::vector<double> weights(mu);
  for (int i = 0; i < mu; ++i)
    weights[i] = std::log((lambda + 1) / 2.0) - std::log(i + 1.0);
  const double wsum = std::accumulate(weights.begin(), weights.end(), 0.0);
  for (double& w : weights) w /= wsum;
  const double mu_eff =
      1.0 / std::inner_product(weights.begin(), weights.end(), weights.begin(), 0.0);

  const double c_sigma = (mu_eff + 2.0) / (n + mu_eff + 5.0);
  const double d_sigma =
      1.0 + 2.0 * std::max(0.0, std::sqrt((mu_eff - 1.0) / (n + 1.0)) - 1.0) + c_sigma;
  const double c_c = (4.0 + mu_eff / n) / (n + 4.0 + 2.0 * mu_eff / n);
  double c_1 = 2.0 / ((n + 1.3) * (n + 1.3) + mu_eff);
  double c_mu = std::min(1.0 - c_1, 2.0 * (mu_eff - 2.0 + 1.0 / mu_eff) /
                                        ((n + 2.0) * (n + 2.0) + mu_eff));
  if (separable) {
    const double scale = (n + 2.0) / 3.0;
    c_1 = std::min(1.0, c_1 * scale);
    c_mu = std::min(1.0 - c_1, c_mu * scale);
  }
  const double chi_n = std::sqrt(static_cast<double>(n)) *
                       (1.0 - 1.0 / (4.0 * n) + 1.0 / (21.0 * n * n));

  Rng rng(opts.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  Eigen::VectorXd mean = Eigen::Map<const Eigen::VectorXd>(x0.data(), n);
  double sigma = opts.sigma0;
  Eigen::VectorXd p_sigma = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd p_c = Eigen::VectorXd::Zero(n);

  Eigen::MatrixXd cov;       // full mode
  Eigen::MatrixXd basis;     // eigenvectors of cov
  Eigen::VectorXd scales;    // sqrt eigenvalues (full) or sqrt diagonal (separable)
  Eigen::VectorXd cov_diag;  // separable mode
  if (separable) {
    cov_diag = Eigen::VectorXd::Ones(n);
    scales = Eigen::VectorXd::Ones(n);
  } else {
    cov = Eigen::MatrixXd::Identity(n, n);
    basis = Eigen::MatrixXd::Identity(n, n);
    scales = Eigen::VectorXd::Ones(n);
  }
  long last_decomposition_eval = 0;

  CmaResult result;
  auto evaluate = [&](const Eigen::VectorXd& x) {
    std::vector<double> xv(x.data(), x.data() + n);
    const double f = objective(xv);
    if (!std::isfinite(f))
      throw std::runtime_error("cma minimize: objective returned a non-finite value");
    ++result.evaluations_used;
    if (f < result.f_best) {
      result.f_best = f;
      result.x_best = std::move(xv);
    }
    return f;
  };

  evaluate(mean);  // baseline so the result is defined for any budget

  const int window = 10 + static_cast<int>(std::ceil(30.0 * n / lambda));
  std::deque<double> gen_best_history;

  std::vector<Eigen::VectorXd> ys(lambda);
  std::vector<double> fs(lambda);
  std::vector<int> order(lambda);

  result.termination_reason = CmaStop::Budget;
  for (int gen = 0; result.evaluations_used + lambda <= budget; ++gen) {
    // Sample and evaluate.
    for (int k = 0; k < lambda; ++k) {
      Eigen::VectorXd z(n);
      for (int i = 0; i < n; ++i) z[i] = gauss(rng);
      if (separable)
        ys[k] = scales.cwiseProduct(z);
      else
        ys[k] = basis * scales.cwiseProduct(z);
      fs[k] = evaluate(mean + sigma * ys[k]);
    }
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      return fs[a] != fs[b] ? fs[a] < fs[b] : a < b;
    });

    Eigen::VectorXd y_w = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < mu; ++i) y_w += weights[i] * ys[order[i]];
    mean += sigma * y_w;

    // Step-size path uses C^{-1/2} y_w.
    Eigen::VectorXd y_white;
    if (separable)
      y_white = y_w.cwiseQuotient(scales);
    else
      y_white = basis * (basis.transpose() * y_w).cwiseQuotient(scales);
    p_sigma = (1.0 - c_sigma) * p_sigma +
              std::sqrt(c_sigma * (2.0 - c_sigma) * mu_eff) * y_white;

    const double ps_norm = p_sigma.norm();
    const double expected = std::sqrt(1.0 - std::pow(1.0 - c_sigma, 2.0 * (gen + 1)));
    const bool h_sigma = ps_norm / expected < (1.4 + 2.0 / (n + 1.0)) * chi_n;

    p_c = (1.0 - c_c) * p_c;
    if (h_sigma) p_c += std::sqrt(c_c * (2.0 - c_c) * mu_eff) * y_w;
    const double h_correction = h_sigma ? 0.0 : c_c * (2.0 - c_c);

    if (separable) {
      Eigen::VectorXd rank_mu = Eigen::VectorXd::Zero(n);
      for (int i = 0; i < mu; ++i)
        rank_mu += weights[i] * ys[order[i]].cwiseProduct(ys[order[i]]);
      cov_diag = (1.0 - c_1 - c_mu + c_1 * h_correction) * cov_diag +
                 c_1 * p_c.cwiseProduct(p_c) + c_mu * rank_mu;
      scales = cov_diag.cwiseMax(1e-30).cwiseSqrt();
    } else {
      Eigen::MatrixXd rank_mu = Eigen::MatrixXd::Zero(n, n);
      for (int i = 0; i < mu; ++i)
        rank_mu += weights[i] * (ys[order[i]] * ys[order[i]].transpose());
      cov = (1.0 - c_1 - c_mu + c_1 * h_correction) * cov +
            c_1 * (p_c * p_c.transpose()) + c_mu * rank_mu;
      if (result.evaluations_used - last_decomposition_eval >
          lambda / ((c_1 + c_mu) * n * 10.0)) {
        last_decomposition_eval = result.evaluations_used;
        cov = 0.5 * (cov + cov.transpose().eval());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
        basis = eig.eigenvectors();
        scales = eig.eigenvalues().cwiseMax(1e-30).cwiseSqrt();
      }
    }

    sigma *= std::exp(std::min(1.0, (c_sigma / d_sigma) * (ps_norm / chi_n - 1.0)));

    const double gen_best = fs[order[0]];
    if (trace) {
      std::vector<double> mv(mean.data(), mean.data() + n);
      trace(CmaGenerationInfo{gen, gen_best, result.f_best, sigma, mv});
    }

    gen_best_history.push_back(gen_best);
    if (static_cast<int>(gen_best_history.size()) > window) gen_best_history.pop_front();
    if (static_cast<int>(gen_best_history.size()) == window) {
      const auto [lo, hi] = std::minmax_element(gen_best_history.begin(), gen_best_history.end());
      if (*hi - *lo < opts.f_tolerance) {
        result.termination_reason = CmaStop::Tolerance;
        return result;
      }
    }

    const double spread = sigma * scales.maxCoeff();
    const double condition = scales.maxCoeff() / std::max(scales.minCoeff(), 1e-300);
    if (!std::isfinite(sigma) || !mean.allFinite() || spread < 1e-16 || sigma > 1e18 ||
        condition > 1e7) {
      result.termination_reason = CmaStop::Stagnation;
      return result;
    }
  }
  return result;
}

using CmaStartSampler = std::function<std::vector<double>(Rng&)>;

/// Best of n_restarts independent runs; restart r runs with seed opts.seed + r
/// and a start drawn sequentially from a sampler stream derived from opts.seed.
inline CmaResult minimize_restarts(const CmaObjective& objective,
                                   const CmaStartSampler& x0_sampler, const CmaOptions& opts,
                                   int n_restarts, const CmaTraceFn& trace = nullptr) {
  if (n_restarts < 1) throw std::invalid_argument("minimize_restarts: n_restarts must be >= 1");
  Rng sample_rng(detail::splitmix64(opts.seed ^ 0xa5a5a5a5a5a5a5a5ULL));
  CmaResult best;
  long total_evaluations = 0;
  for (int r = 0; r < n_restarts; ++r) {
    const std::vector<double> x0 = x0_sampler(sample_rng);
    CmaOptions run_opts = opts;
    run_opts.seed = opts.seed + static_cast<std::uint64_t>(r);
    CmaResult res = minimize(objective, x0, run_opts, trace);
    total_evaluations += res.evaluations_used;
    if (r == 0 || res.f_best < best.f_best) {
      const long sum = total_evaluations;
      best = std::move(res);
      best.evaluations_used = sum;
    } else {
      best.evaluations_used = total_evaluations;
    }
  }
  return best;
}

}  // namespace mogvqe
