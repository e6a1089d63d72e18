#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "defm/likelihood.hpp"
#include "defm/panel.hpp"
#include "defm/terms.hpp"

namespace defm {

struct FitOptions {
  int max_iterations = 200;
  double grad_tol = 1e-6;        // stop when max|gradient| < grad_tol
  double loglik_tol = 1e-10;     // or when |delta loglik| < loglik_tol
  int max_step_halvings = 50;
  double separation_threshold = 15.0;  // |theta_j| beyond this flags separation
  std::size_t max_outcomes = kDefaultMaxOutcomes;
  bool use_cache = true;
  int threads = 0;
  bool strict_gaps = false;  // recorded for reporting only
};

struct FitResult {
  std::vector<std::string> term_names;
  std::vector<double> theta;
  std::vector<double> std_errors;
  std::vector<double> vcov;  // d x d row-major, (-H)^-1 (pseudo-inverse if flagged)
  double loglik = 0.0;
  double aic = 0.0;  // 2d - 2 loglik
  double bic = 0.0;  // d log(n_transitions) - 2 loglik
  std::size_t n_obs = 0;          // waves entering the likelihood
  std::size_t n_transitions = 0;  // events
  bool converged = false;
  bool singular_hessian = false;
  std::vector<std::size_t> separation;  // indices with |theta_j| > threshold
  int iterations = 0;
  double gradient_norm = 0.0;  // max|gradient| at the final iterate
  std::uint64_t data_hash = 0;

  std::size_t dim() const { return theta.size(); }
};

/// Newton-Raphson from theta = 0 with step-halving; falls back to a scaled
/// gradient step when the Hessian solve fails. Standard errors come from
/// sqrt(diag((-H)^-1)) at the optimum. Non-convergence is returned as a
/// flagged result with the best iterate, not thrown.
FitResult fit_mle(const std::vector<TransitionRecord>& transitions,
                  const CompiledModel& model, const FitOptions& options = {});

struct LrTest {
  double statistic = 0.0;
  int df = 0;
  double p_value = 1.0;
};

/// Likelihood-ratio test of a reduced model against a full model fitted on
/// identical data. The reduced term set must be a strict subset.
LrTest lr_test(const FitResult& full, const FitResult& reduced);

/// Chi-square upper tail (exposed for reuse in reports and tests).
double chi_squared_upper_tail(double statistic, int df);

}  // namespace defm
