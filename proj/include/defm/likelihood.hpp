#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "defm/panel.hpp"
#include "defm/support.hpp"
#include "defm/terms.hpp"

namespace defm {

struct EvalOptions {
  std::size_t max_outcomes = kDefaultMaxOutcomes;
  bool use_cache = true;  // share StatMatrix across equal (prev, covariates)
  int threads = 0;        // 0 = hardware concurrency
};

/// log kappa(theta) = log sum over support rows of exp(theta' s), with max
/// subtraction; summed in support-row order.
double log_normalizing_constant(std::span<const double> theta,
                                const StatMatrix& stats);

/// theta' s(observed) - log kappa. Always <= 0.
double transition_logprob(std::span<const double> theta,
                          const StatMatrix& stats, std::size_t observed_row);

/// Exact conditional log-likelihood, score and observed information for a
/// transition set. The likelihood conditions on each individual's first
/// observed wave; every transition contributes theta's_obs - log kappa(prev).
///
/// Evaluation is deterministic and independent of the worker count: each
/// support is summed in row order, per-transition contributions are
/// accumulated in index order within fixed blocks of 256, and block partials
/// are combined with a fixed binary tree (see pairwise_sum).
class LikelihoodEvaluator {
 public:
  LikelihoodEvaluator(const std::vector<TransitionRecord>& transitions,
                      const TermSet& terms, const ForbidRules& forbids,
                      EvalOptions options = {});
  ~LikelihoodEvaluator();
  LikelihoodEvaluator(const LikelihoodEvaluator&) = delete;
  LikelihoodEvaluator& operator=(const LikelihoodEvaluator&) = delete;

  std::size_t dim() const;
  std::size_t n_transitions() const;

  double loglik(std::span<const double> theta) const;
  /// Returns loglik; writes the score into grad (length d).
  double loglik_grad(std::span<const double> theta,
                     std::span<double> grad) const;
  /// Returns loglik; writes score and Hessian (d x d row-major, symmetric
  /// negative semidefinite).
  double loglik_grad_hess(std::span<const double> theta,
                          std::span<double> grad,
                          std::span<double> hess) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Convenience wrappers matching the evaluator one-shot.
double total_loglik(std::span<const double> theta,
                    const std::vector<TransitionRecord>& transitions,
                    const TermSet& terms, const ForbidRules& forbids,
                    EvalOptions options = {});
std::vector<double> gradient(std::span<const double> theta,
                             const std::vector<TransitionRecord>& transitions,
                             const TermSet& terms, const ForbidRules& forbids,
                             EvalOptions options = {});
std::vector<double> hessian(std::span<const double> theta,
                            const std::vector<TransitionRecord>& transitions,
                            const TermSet& terms, const ForbidRules& forbids,
                            EvalOptions options = {});

}  // namespace defm
