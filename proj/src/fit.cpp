#include "defm/fit.hpp"

#include <Eigen/Dense>
#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <set>

#include "defm/errors.hpp"

namespace defm {

namespace {

std::uint64_t hash_transitions(const std::vector<TransitionRecord>& ts) {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](const void* p, std::size_t n) {
    const unsigned char* b = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= b[i];
      h *= 1099511628211ull;
    }
  };
  for (const auto& t : ts) {
    mix(t.individual_id.data(), t.individual_id.size());
    mix(&t.time, sizeof t.time);
    mix(t.prev.data(), t.prev.size());
    mix(t.cur.data(), t.cur.size());
    if (!t.x.empty()) mix(t.x.data(), t.x.size() * sizeof(double));
  }
  return h;
}

std::size_t count_individuals(const std::vector<TransitionRecord>& ts) {
  std::set<std::string> ids;
  for (const auto& t : ts) ids.insert(t.individual_id);
  return ids.size();
}

}  // namespace

double chi_squared_upper_tail(double statistic, int df) {
  if (statistic <= 0.0) return 1.0;
  boost::math::chi_squared dist(static_cast<double>(df));
  return boost::math::cdf(boost::math::complement(dist, statistic));
}

FitResult fit_mle(const std::vector<TransitionRecord>& transitions,
                  const CompiledModel& model, const FitOptions& options) {
  const std::size_t d = model.terms.size();
  if (d == 0) fail(errc::invalid_argument, "model has no terms");
  if (transitions.empty())
    fail(errc::invalid_argument, "no transitions to fit");

  EvalOptions eval_opts;
  eval_opts.max_outcomes = options.max_outcomes;
  eval_opts.use_cache = options.use_cache;
  eval_opts.threads = options.threads;
  LikelihoodEvaluator eval(transitions, model.terms, model.forbids, eval_opts);

  using Eigen::MatrixXd;
  using Eigen::VectorXd;

  VectorXd theta = VectorXd::Zero(d);
  VectorXd grad(d);
  MatrixXd hess(d, d);
  auto evaluate = [&](const VectorXd& at) {
    return eval.loglik_grad_hess(
        std::span<const double>(at.data(), d), std::span<double>(grad.data(), d),
        std::span<double>(hess.data(), d * d));
  };

  double ll = evaluate(theta);
  bool converged = false;
  int iterations = 0;

  for (int iter = 1; iter <= options.max_iterations; ++iter) {
    const double gnorm = grad.lpNorm<Eigen::Infinity>();
    if (gnorm < options.grad_tol) {
      converged = true;
      break;
    }
    iterations = iter;

    VectorXd delta;
    Eigen::LDLT<MatrixXd> ldlt(-hess);
    bool newton_ok = ldlt.info() == Eigen::Success;
    if (newton_ok) {
      delta = ldlt.solve(grad);
      newton_ok = delta.allFinite() && delta.dot(grad) > 0.0;
    }
    if (!newton_ok) {
      // Singular or indefinite curvature: scaled steepest ascent.
      const double scale = std::max(1.0, (-hess).diagonal().maxCoeff());
      delta = grad / scale;
    }

    double step = 1.0;
    bool accepted = false;
    double ll_new = ll;
    for (int h = 0; h <= options.max_step_halvings; ++h) {
      const VectorXd cand = theta + step * delta;
      const double cand_ll =
          eval.loglik(std::span<const double>(cand.data(), d));
      if (std::isfinite(cand_ll) && cand_ll > ll) {
        theta = cand;
        ll_new = cand_ll;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // no ascent step found; flags decided below

    const double delta_ll = ll_new - ll;
    ll = evaluate(theta);
    if (std::abs(delta_ll) < options.loglik_tol) {
      converged = true;
      break;
    }
  }
  if (!converged && grad.lpNorm<Eigen::Infinity>() < options.grad_tol)
    converged = true;

  FitResult result;
  result.term_names = model.terms.term_names();
  result.theta.assign(theta.data(), theta.data() + d);
  result.loglik = ll;
  result.iterations = iterations;
  result.converged = converged;
  result.gradient_norm = grad.lpNorm<Eigen::Infinity>();
  result.n_transitions = transitions.size();
  result.n_obs = transitions.size() + count_individuals(transitions);
  result.aic = 2.0 * static_cast<double>(d) - 2.0 * ll;
  result.bic = static_cast<double>(d) *
                   std::log(static_cast<double>(result.n_transitions)) -
               2.0 * ll;
  result.data_hash = hash_transitions(transitions);

  // Variance: (-H)^-1; pseudo-inverse with a flag when not invertible.
  MatrixXd info = -hess;
  MatrixXd vcov;
  Eigen::LDLT<MatrixXd> ldlt(info);
  bool ok = ldlt.info() == Eigen::Success;
  if (ok) {
    const VectorXd dvec = ldlt.vectorD();
    const double dmax = dvec.maxCoeff();
    ok = dvec.minCoeff() > std::max(dmax, 1.0) * 1e-12;
  }
  if (ok) {
    vcov = ldlt.solve(MatrixXd::Identity(d, d));
  } else {
    result.singular_hessian = true;
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(info);
    const VectorXd ev = es.eigenvalues();
    const double tol = std::max(ev.cwiseAbs().maxCoeff(), 1.0) * 1e-12;
    VectorXd inv_ev = VectorXd::Zero(d);
    for (std::size_t j = 0; j < d; ++j)
      if (ev(j) > tol) inv_ev(j) = 1.0 / ev(j);
    vcov = es.eigenvectors() * inv_ev.asDiagonal() *
           es.eigenvectors().transpose();
  }
  result.vcov.assign(vcov.data(), vcov.data() + d * d);
  // Eigen stores column-major; vcov is symmetric so row-major readers agree.
  result.std_errors.resize(d);
  for (std::size_t j = 0; j < d; ++j)
    result.std_errors[j] = std::sqrt(std::max(0.0, vcov(j, j)));

  for (std::size_t j = 0; j < d; ++j)
    if (std::abs(result.theta[j]) > options.separation_threshold)
      result.separation.push_back(j);

  return result;
}

LrTest lr_test(const FitResult& full, const FitResult& reduced) {
  if (full.data_hash != reduced.data_hash ||
      full.n_transitions != reduced.n_transitions)
    fail(errc::data_mismatch,
         "likelihood-ratio test requires both fits on identical data");
  std::set<std::string> full_terms(full.term_names.begin(),
                                   full.term_names.end());
  for (const auto& name : reduced.term_names)
    if (!full_terms.count(name))
      fail(errc::not_nested,
           "reduced model term '" + name + "' is not part of the full model");
  if (reduced.dim() > full.dim())
    fail(errc::not_nested, "reduced model has more terms than the full model");

  LrTest out;
  out.statistic = 2.0 * (full.loglik - reduced.loglik);
  if (out.statistic < -1e-8)
    fail(errc::not_nested,
         "full-model loglik is below the reduced model; models are not "
         "nested or fits did not converge");
  out.df = static_cast<int>(full.dim() - reduced.dim());
  out.p_value =
      out.df == 0 ? 1.0 : chi_squared_upper_tail(std::max(0.0, out.statistic),
                                                 out.df);
  return out;
}

}  // namespace defm
