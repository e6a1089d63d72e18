#include "defm/likelihood.hpp"

#include <cmath>
#include <cstring>

#include "defm/errors.hpp"
#include "defm/parallel.hpp"

namespace defm {

namespace {

constexpr std::size_t kBlock = 256;  // transitions per reduction leaf

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

// Per-matrix, per-theta quantities shared by every transition with the same
// previous state and covariate values.
struct MatrixEval {
  double log_kappa = 0.0;
  std::vector<double> eta;   // theta' s per support row
  std::vector<double> mean;  // E_theta[s], length d
  std::vector<double> m2;    // E_theta[s s'], d x d row-major
};

}  // namespace

double log_normalizing_constant(std::span<const double> theta,
                                const StatMatrix& stats) {
  double max_eta = -std::numeric_limits<double>::infinity();
  const std::size_t n = stats.size();
  std::vector<double> eta(n);
  for (std::size_t i = 0; i < n; ++i) {
    eta[i] = dot(theta.data(), stats.row(i), stats.d);
    if (eta[i] > max_eta) max_eta = eta[i];
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += std::exp(eta[i] - max_eta);
  return max_eta + std::log(sum);
}

double transition_logprob(std::span<const double> theta,
                          const StatMatrix& stats, std::size_t observed_row) {
  if (observed_row >= stats.size())
    fail(errc::observed_state_excluded,
         "observed row index out of support range");
  return dot(theta.data(), stats.row(observed_row), stats.d) -
         log_normalizing_constant(theta, stats);
}

struct LikelihoodEvaluator::Impl {
  TermSet terms;        // copy: evaluator owns its model view
  ForbidRules forbids;
  EvalOptions options;
  std::vector<const StatMatrix*> matrices;
  std::vector<std::unique_ptr<StatMatrix>> owned;  // uncached mode
  std::unique_ptr<StatMatrixCache> cache;
  // Per transition: which matrix, and the observed support row.
  std::vector<std::uint32_t> matrix_index;
  std::vector<std::uint32_t> observed_row;

  std::size_t d() const { return terms.size(); }
  std::size_t n() const { return matrix_index.size(); }

  void build(const std::vector<TransitionRecord>& transitions) {
    matrix_index.reserve(transitions.size());
    observed_row.reserve(transitions.size());
    if (options.use_cache) {
      cache = std::make_unique<StatMatrixCache>(terms, forbids,
                                                options.max_outcomes);
      std::unordered_map<const StatMatrix*, std::uint32_t> index_of;
      for (const auto& rec : transitions) {
        const StatMatrix& m = cache->get(rec.prev, rec.x);
        auto [it, inserted] = index_of.emplace(
            &m, static_cast<std::uint32_t>(matrices.size()));
        if (inserted) matrices.push_back(&m);
        matrix_index.push_back(it->second);
        record_observed(rec, m);
      }
    } else {
      for (const auto& rec : transitions) {
        auto support = enumerate_support(terms.n_outcomes(), rec.prev, forbids,
                                         options.max_outcomes);
        owned.push_back(std::make_unique<StatMatrix>(
            build_stat_matrix(terms, support, rec.x.data())));
        matrices.push_back(owned.back().get());
        matrix_index.push_back(static_cast<std::uint32_t>(matrices.size() - 1));
        record_observed(rec, *matrices.back());
      }
    }
  }

  void record_observed(const TransitionRecord& rec, const StatMatrix& m) {
    const int row = m.find_state(encode_state(rec.cur));
    if (row < 0)
      fail(errc::observed_state_excluded,
           "individual '" + rec.individual_id + "', wave " +
               std::to_string(rec.time) +
               ": observed state is excluded from the support by the forbid "
               "rules");
    observed_row.push_back(static_cast<std::uint32_t>(row));
  }

  // need: 0 = loglik, 1 = +grad, 2 = +hess
  double evaluate(std::span<const double> theta, int need, double* grad,
                  double* hess) const {
    const std::size_t dd = d();
    if (theta.size() != dd)
      fail(errc::invalid_argument, "theta length does not match term count");

    // Phase 1: per-matrix quantities, parallel over matrices.
    std::vector<MatrixEval> evals(matrices.size());
    parallel_for_blocks(
        matrices.size(), 1, options.threads,
        [&](std::size_t, std::size_t begin, std::size_t) {
          const StatMatrix& m = *matrices[begin];
          MatrixEval& e = evals[begin];
          const std::size_t rows = m.size();
          e.eta.resize(rows);
          double max_eta = -std::numeric_limits<double>::infinity();
          for (std::size_t i = 0; i < rows; ++i) {
            e.eta[i] = dot(theta.data(), m.row(i), dd);
            if (e.eta[i] > max_eta) max_eta = e.eta[i];
          }
          double sum = 0.0;
          for (std::size_t i = 0; i < rows; ++i)
            sum += std::exp(e.eta[i] - max_eta);
          e.log_kappa = max_eta + std::log(sum);
          if (need >= 1) {
            e.mean.assign(dd, 0.0);
            if (need >= 2) e.m2.assign(dd * dd, 0.0);
            for (std::size_t i = 0; i < rows; ++i) {
              const double p = std::exp(e.eta[i] - e.log_kappa);
              const double* s = m.row(i);
              for (std::size_t a = 0; a < dd; ++a)
                e.mean[a] += p * s[a];
              if (need >= 2)
                for (std::size_t a = 0; a < dd; ++a) {
                  const double pa = p * s[a];
                  double* m2row = e.m2.data() + a * dd;
                  for (std::size_t b = 0; b < dd; ++b) m2row[b] += pa * s[b];
                }
            }
          }
        });

    // Phase 2: per-transition contributions accumulated in index order
    // within fixed blocks; block partials live in per-block slots.
    const std::size_t n_items = n();
    const std::size_t n_blocks = n_items == 0 ? 0 : (n_items + kBlock - 1) / kBlock;
    std::vector<double> block_ll(n_blocks, 0.0);
    std::vector<double> block_grad(need >= 1 ? n_blocks * dd : 0, 0.0);
    std::vector<double> block_hess(need >= 2 ? n_blocks * dd * dd : 0, 0.0);

    parallel_for_blocks(
        n_items, kBlock, options.threads,
        [&](std::size_t b, std::size_t begin, std::size_t end) {
          double ll = 0.0;
          double* g = need >= 1 ? block_grad.data() + b * dd : nullptr;
          double* h = need >= 2 ? block_hess.data() + b * dd * dd : nullptr;
          for (std::size_t i = begin; i < end; ++i) {
            const MatrixEval& e = evals[matrix_index[i]];
            const StatMatrix& m = *matrices[matrix_index[i]];
            const std::size_t obs = observed_row[i];
            ll += e.eta[obs] - e.log_kappa;
            if (need >= 1) {
              const double* s = m.row(obs);
              for (std::size_t a = 0; a < dd; ++a) g[a] += s[a] - e.mean[a];
            }
            if (need >= 2) {
              for (std::size_t a = 0; a < dd; ++a) {
                const double ma = e.mean[a];
                const double* m2row = e.m2.data() + a * dd;
                double* hrow = h + a * dd;
                for (std::size_t bcol = 0; bcol < dd; ++bcol)
                  hrow[bcol] -= m2row[bcol] - ma * e.mean[bcol];
              }
            }
          }
          block_ll[b] = ll;
        });

    // Phase 3: combine block partials with the fixed binary tree.
    const double total = pairwise_sum(block_ll.data(), n_blocks);
    if (need >= 1) {
      std::vector<double> coord(n_blocks);
      for (std::size_t a = 0; a < dd; ++a) {
        for (std::size_t b = 0; b < n_blocks; ++b)
          coord[b] = block_grad[b * dd + a];
        grad[a] = pairwise_sum(coord.data(), n_blocks);
      }
      if (need >= 2) {
        for (std::size_t a = 0; a < dd * dd; ++a) {
          for (std::size_t b = 0; b < n_blocks; ++b)
            coord[b] = block_hess[b * dd * dd + a];
          hess[a] = pairwise_sum(coord.data(), n_blocks);
        }
      }
    }
    return total;
  }
};

LikelihoodEvaluator::LikelihoodEvaluator(
    const std::vector<TransitionRecord>& transitions, const TermSet& terms,
    const ForbidRules& forbids, EvalOptions options)
    : impl_(std::make_unique<Impl>()) {
  impl_->terms = terms;
  impl_->forbids = forbids;
  impl_->options = options;
  impl_->build(transitions);
}

LikelihoodEvaluator::~LikelihoodEvaluator() = default;

std::size_t LikelihoodEvaluator::dim() const { return impl_->d(); }
std::size_t LikelihoodEvaluator::n_transitions() const { return impl_->n(); }

double LikelihoodEvaluator::loglik(std::span<const double> theta) const {
  return impl_->evaluate(theta, 0, nullptr, nullptr);
}

double LikelihoodEvaluator::loglik_grad(std::span<const double> theta,
                                        std::span<double> grad) const {
  if (grad.size() != impl_->d())
    fail(errc::invalid_argument, "gradient buffer has wrong length");
  return impl_->evaluate(theta, 1, grad.data(), nullptr);
}

double LikelihoodEvaluator::loglik_grad_hess(std::span<const double> theta,
                                             std::span<double> grad,
                                             std::span<double> hess) const {
  if (grad.size() != impl_->d() || hess.size() != impl_->d() * impl_->d())
    fail(errc::invalid_argument, "derivative buffer has wrong length");
  return impl_->evaluate(theta, 2, grad.data(), hess.data());
}

double total_loglik(std::span<const double> theta,
                    const std::vector<TransitionRecord>& transitions,
                    const TermSet& terms, const ForbidRules& forbids,
                    EvalOptions options) {
  if (transitions.empty()) return 0.0;
  return LikelihoodEvaluator(transitions, terms, forbids, options)
      .loglik(theta);
}

std::vector<double> gradient(std::span<const double> theta,
                             const std::vector<TransitionRecord>& transitions,
                             const TermSet& terms, const ForbidRules& forbids,
                             EvalOptions options) {
  std::vector<double> g(terms.size(), 0.0);
  if (transitions.empty()) return g;
  LikelihoodEvaluator(transitions, terms, forbids, options)
      .loglik_grad(theta, g);
  return g;
}

std::vector<double> hessian(std::span<const double> theta,
                            const std::vector<TransitionRecord>& transitions,
                            const TermSet& terms, const ForbidRules& forbids,
                            EvalOptions options) {
  std::vector<double> g(terms.size(), 0.0);
  std::vector<double> h(terms.size() * terms.size(), 0.0);
  if (transitions.empty()) return h;
  LikelihoodEvaluator(transitions, terms, forbids, options)
      .loglik_grad_hess(theta, g, h);
  return h;
}

}  // namespace defm
