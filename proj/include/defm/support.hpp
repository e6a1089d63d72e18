#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <unordered_map>
#include <vector>

#include "defm/terms.hpp"

namespace defm {

/// 2^K states must be enumerable; beyond this the model class needs
/// sampling-based estimation instead of exact likelihoods.
inline constexpr std::size_t kDefaultMaxOutcomes = 20;

/// Candidate current states given a previous state, after forbid rules.
struct SupportSet {
  std::vector<std::uint8_t> prev;
  std::vector<std::uint32_t> state_codes;  // ascending binary encoding

  std::size_t size() const { return state_codes.size(); }
  std::vector<std::uint8_t> state(std::size_t i) const {
    return decode_state(state_codes[i], prev.size());
  }
};

SupportSet enumerate_support(std::size_t K, std::span<const std::uint8_t> prev,
                             const ForbidRules& forbids,
                             std::size_t max_outcomes = kDefaultMaxOutcomes);

/// Statistic rows for every support state of one previous state, under one
/// set of covariate values. Shared across transitions with equal previous
/// state and equal referenced-covariate values.
struct StatMatrix {
  std::uint32_t prev_code = 0;
  std::size_t d = 0;
  std::vector<std::uint32_t> state_codes;  // support, ascending
  std::vector<double> rows;                // size() x d, row-major

  std::size_t size() const { return state_codes.size(); }
  const double* row(std::size_t i) const { return rows.data() + i * d; }
  /// Row index of a state code, or -1 if the state is not in the support.
  int find_state(std::uint32_t code) const;
};

StatMatrix build_stat_matrix(const TermSet& terms, const SupportSet& support,
                             const double* x);

/// Keyed by (previous state, values of covariates referenced by any term);
/// key equality is exact, so cached and uncached evaluation agree bit for
/// bit. Not thread-safe during insertion: populate in a single pass, then
/// share read-only.
class StatMatrixCache {
 public:
  StatMatrixCache(const TermSet& terms, const ForbidRules& forbids,
                  std::size_t max_outcomes = kDefaultMaxOutcomes);

  const StatMatrix& get(std::span<const std::uint8_t> prev,
                        std::span<const double> x);

  std::size_t entries() const { return matrices_.size(); }

 private:
  struct Key {
    std::uint32_t prev_code;
    std::vector<double> covariates;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const;
  };

  const TermSet& terms_;
  const ForbidRules& forbids_;
  std::size_t max_outcomes_;
  std::vector<int> referenced_;
  std::unordered_map<Key, std::unique_ptr<StatMatrix>, KeyHash> matrices_;
};

}  // namespace defm
