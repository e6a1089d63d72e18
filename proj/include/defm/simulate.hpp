#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "defm/panel.hpp"
#include "defm/rng.hpp"
#include "defm/support.hpp"
#include "defm/terms.hpp"

namespace defm {

enum class SamplerKind { exact, gibbs };

struct SimConfig {
  std::vector<double> theta;
  std::size_t n_individuals = 0;
  int n_waves = 2;
  /// Wave-1 state per individual (n x K). Empty = all-zero states.
  std::vector<std::vector<std::uint8_t>> initial_states;
  /// Covariates per individual per wave (n x n_waves x C). Empty = none.
  std::vector<std::vector<std::vector<double>>> covariates;
  std::uint64_t seed = 0;
  SamplerKind sampler = SamplerKind::exact;
  int gibbs_sweeps = 50;
  int threads = 0;
  std::size_t max_outcomes = kDefaultMaxOutcomes;
};

/// Draws one current state from the exact categorical distribution over the
/// (forbid-restricted) support. Consumes exactly one uniform.
std::vector<std::uint8_t> sample_transition_exact(
    std::span<const double> theta, std::span<const std::uint8_t> prev,
    std::span<const double> x, const TermSet& terms, const ForbidRules& forbids,
    PhiloxRng& rng, std::size_t max_outcomes = kDefaultMaxOutcomes);

/// Row index drawn from an already-built stat matrix (hot path for panels).
std::size_t sample_support_row(std::span<const double> theta,
                               const StatMatrix& stats, PhiloxRng& rng);

/// Gibbs sampler: starting from cur = prev, `sweeps` full passes over the
/// cells, each set to 1 with probability 1/(1+exp(-theta' delta_chi)).
/// Cell-wise updates cannot honor pattern-pair support restrictions, so
/// forbid rules are rejected rather than approximated.
std::vector<std::uint8_t> sample_transition_gibbs(
    std::span<const double> theta, std::span<const std::uint8_t> prev,
    std::span<const double> x, const TermSet& terms, const ForbidRules& forbids,
    int sweeps, PhiloxRng& rng);

/// Forward-simulates the Markov chain: wave 1 is the initial state, each
/// later wave is drawn conditional on the previous one. The seed fully
/// determines the output; individual i always uses substream i, so results
/// do not depend on the worker count.
PanelDataset simulate_panel(const SimConfig& config, const CompiledModel& model);

}  // namespace defm
