#include "defm/simulate.hpp"

#include <cmath>

#include "defm/errors.hpp"
#include "defm/parallel.hpp"

namespace defm {

std::size_t sample_support_row(std::span<const double> theta,
                               const StatMatrix& stats, PhiloxRng& rng) {
  const std::size_t n = stats.size();
  std::vector<double> eta(n);
  double max_eta = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    const double* row = stats.row(i);
    for (std::size_t j = 0; j < stats.d; ++j) s += theta[j] * row[j];
    eta[i] = s;
    if (s > max_eta) max_eta = s;
  }
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    eta[i] = std::exp(eta[i] - max_eta);
    total += eta[i];
  }
  const double u = rng.uniform01() * total;
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    acc += eta[i];
    if (u < acc) return i;
  }
  return n - 1;
}

std::vector<std::uint8_t> sample_transition_exact(
    std::span<const double> theta, std::span<const std::uint8_t> prev,
    std::span<const double> x, const TermSet& terms, const ForbidRules& forbids,
    PhiloxRng& rng, std::size_t max_outcomes) {
  terms.require_covariates(x.size());
  const auto support =
      enumerate_support(terms.n_outcomes(), prev, forbids, max_outcomes);
  const auto stats = build_stat_matrix(terms, support, x.data());
  const std::size_t row = sample_support_row(theta, stats, rng);
  return support.state(row);
}

std::vector<std::uint8_t> sample_transition_gibbs(
    std::span<const double> theta, std::span<const std::uint8_t> prev,
    std::span<const double> x, const TermSet& terms, const ForbidRules& forbids,
    int sweeps, PhiloxRng& rng) {
  if (!forbids.empty())
    fail(errc::forbids_unsupported,
         "the Gibbs sampler cannot honor forbid rules; use the exact sampler");
  if (sweeps < 1) fail(errc::invalid_argument, "gibbs sweeps must be >= 1");

  const std::size_t K = terms.n_outcomes();
  const std::uint32_t prev_code = encode_state(prev);
  std::uint32_t cur_code = prev_code;
  std::vector<double> delta(terms.size());
  for (int sweep = 0; sweep < sweeps; ++sweep) {
    for (std::size_t k = 0; k < K; ++k) {
      change_stats_into(terms, prev_code, cur_code, k, x.data(), delta.data());
      double lo = 0.0;
      for (std::size_t j = 0; j < delta.size(); ++j) lo += theta[j] * delta[j];
      const double p1 = 1.0 / (1.0 + std::exp(-lo));
      const std::uint32_t bit = 1u << (K - 1 - k);
      if (rng.uniform01() < p1)
        cur_code |= bit;
      else
        cur_code &= ~bit;
    }
  }
  return decode_state(cur_code, K);
}

PanelDataset simulate_panel(const SimConfig& config,
                            const CompiledModel& model) {
  const std::size_t K = model.terms.n_outcomes();
  const std::size_t n = config.n_individuals;
  if (config.n_waves < 2)
    fail(errc::invalid_argument, "simulation needs at least 2 waves");
  if (config.theta.size() != model.terms.size())
    fail(errc::invalid_argument, "theta length does not match term count");
  if (!config.initial_states.empty() && config.initial_states.size() != n)
    fail(errc::invalid_argument, "initial_states must cover every individual");
  if (!config.covariates.empty() && config.covariates.size() != n)
    fail(errc::invalid_argument, "covariates must cover every individual");
  if (config.sampler == SamplerKind::gibbs && !model.forbids.empty())
    fail(errc::forbids_unsupported,
         "the Gibbs sampler cannot honor forbid rules; use the exact sampler");
  const bool has_covariates = !config.covariates.empty();
  if (has_covariates)
    for (const auto& per_wave : config.covariates)
      if (per_wave.size() != static_cast<std::size_t>(config.n_waves))
        fail(errc::invalid_argument,
             "covariates must provide one vector per wave");

  PanelDataset data;
  data.outcome_names = model.terms.outcome_names;
  data.covariate_names = model.terms.covariate_names;
  data.individuals.resize(n);

  const std::vector<double> no_x;
  // Chunks of individuals share a StatMatrix cache; determinism comes from
  // the per-individual substreams, not from scheduling.
  parallel_for_blocks(
      n, 64, config.threads,
      [&](std::size_t, std::size_t begin, std::size_t end) {
        StatMatrixCache cache(model.terms, model.forbids, config.max_outcomes);
        for (std::size_t i = begin; i < end; ++i) {
          PhiloxRng rng(config.seed, i);
          IndividualSeries& series = data.individuals[i];
          series.id = std::to_string(i + 1);
          series.waves.resize(config.n_waves);

          std::vector<std::uint8_t> state =
              config.initial_states.empty()
                  ? std::vector<std::uint8_t>(K, 0)
                  : config.initial_states[i];
          if (state.size() != K)
            fail(errc::invalid_argument,
                 "initial state length does not match the model");

          for (int w = 0; w < config.n_waves; ++w) {
            if (w > 0) {
              const auto& x =
                  has_covariates ? config.covariates[i][w] : no_x;
              if (config.sampler == SamplerKind::exact) {
                const StatMatrix& stats = cache.get(state, x);
                const std::size_t row =
                    sample_support_row(config.theta, stats, rng);
                state = decode_state(stats.state_codes[row], K);
              } else {
                state = sample_transition_gibbs(config.theta, state, x,
                                                model.terms, model.forbids,
                                                config.gibbs_sweeps, rng);
              }
            }
            Wave& wave = series.waves[w];
            wave.time = w + 1;
            wave.y = state;
            if (has_covariates) wave.x = config.covariates[i][w];
          }
        }
      });

  return data;
}

}  // namespace defm
